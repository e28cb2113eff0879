"""
Packet and Route Selection Tests

Path helpers, RREP annotation, route entry states and trust-aware selection.
"""

import pytest

from src.grayhole_guard.exceptions import RouteStateError
from src.grayhole_guard.kernel import Topology
from src.grayhole_guard.packets import (BlacklistMsg, DataPacket, Rrep, Rreq,
                                        next_hop, packet_kind, previous_hop)
from src.grayhole_guard.routing import (RouteEntry, RouteState,
                                        best_destination_route,
                                        is_connected_path, select_first,
                                        select_route)


def test_path_helpers():
    route = (5, 8, 4, 3, 9)
    assert next_hop(route, 5) == 8
    assert next_hop(route, 9) is None
    assert previous_hop(route, 8) == 5
    assert previous_hop(route, 5) is None


def test_rreq_extension_keeps_identity():
    rreq = Rreq(origin=0, sequence=1, destination=4, source_route=(0,))
    extended = rreq.extend(2)
    assert extended.source_route == (0, 2)
    assert extended.rreq_id == rreq.rreq_id == (0, 1)


def test_rrep_annotations_count_low_hops():
    rrep = Rrep((0, 1), responder=4, route=(0, 2, 4))
    rrep = rrep.annotate("High").annotate("Low")
    assert rrep.trust_annotations == ("High", "Low")
    assert rrep.low_count == 1
    assert rrep.from_destination
    assert not Rrep((0, 1), responder=2, route=(0, 2, 4)).from_destination


def test_packet_labels():
    assert packet_kind(Rreq(0, 1, 3, (0,))) == "RREQ"
    assert packet_kind(DataPacket(0, 0, (0, 1), 0)) == "DATA"
    assert packet_kind(BlacklistMsg(convicted=3, issuer=1)) == "BLACKLIST"


def test_a_node_cannot_blacklist_itself():
    with pytest.raises(ValueError):
        BlacklistMsg(convicted=3, issuer=3)


def test_selection_prefers_fewer_low_hops_over_length():
    short_low = Rrep((0, 1), 9, (0, 1, 9), ("Low",))
    long_clean = Rrep((0, 1), 9, (0, 2, 3, 9), ("High", "High", "High"))

    chosen = select_route(0, [short_low, long_clean])

    assert chosen.path == (0, 2, 3, 9)
    assert chosen.state == RouteState.CANDIDATE
    assert chosen.trust_summary == 0


def test_selection_prefers_destination_replies():
    intermediate = Rrep((0, 1), 2, (0, 2, 9))
    destination = Rrep((0, 1), 9, (0, 1, 3, 9), ("Low",))
    assert select_route(0, [intermediate, destination]).path == (0, 1, 3, 9)


def test_selection_breaks_ties_lexicographically():
    a = Rrep((0, 1), 9, (0, 2, 9))
    b = Rrep((0, 1), 9, (0, 1, 9))
    assert select_route(0, [a, b]).path == (0, 1, 9)


def test_equal_length_ties_go_to_the_earlier_reply():
    early = Rrep((0, 1), 9, (0, 7, 9)).stamped(4)
    late = Rrep((0, 1), 9, (0, 1, 9)).stamped(30)
    longer = Rrep((0, 1), 9, (0, 1, 2, 9)).stamped(1)

    assert select_route(0, [late, longer, early]).path == (0, 7, 9)


@pytest.mark.parametrize("order", [(0, 1, 2), (2, 1, 0), (1, 2, 0)])
def test_selection_ignores_candidate_order(order):
    candidates = [
        Rrep((0, 1), 9, (0, 4, 9), ("High",)).stamped(24),
        Rrep((0, 1), 9, (0, 6, 9), ("High",)).stamped(4),
        Rrep((0, 1), 9, (0, 2, 9), ("Low",)).stamped(4),
    ]
    assert select_route(0, [candidates[i] for i in order]).path == (0, 6, 9)


def test_selection_needs_a_candidate():
    with pytest.raises(ValueError):
        select_route(0, [])


def test_plain_aodv_takes_the_first_reply():
    a = Rrep((0, 1), 9, (0, 5, 6, 9), ("Low",))
    b = Rrep((0, 1), 9, (0, 1, 9))
    assert select_first([a, b]).path == (0, 5, 6, 9)


def test_route_state_transitions():
    entry = RouteEntry(destination=9, path=(0, 1, 9))
    entry.transition(RouteState.TESTED_VALID)
    with pytest.raises(RouteStateError):
        entry.transition(RouteState.INFECTED)

    entry.transition(RouteState.PURGED)
    assert not entry.usable
    assert entry.hops == 2
    assert entry.contains(1)


def test_connected_path_check():
    topology = Topology({0: (0.0, 0.0), 1: (40.0, 0.0), 2: (80.0, 0.0)})
    assert is_connected_path((0, 1, 2), topology)
    assert not is_connected_path((0, 2), topology)


def test_destination_answers_along_the_best_copy():
    lows = {(0, 1, 9): 1, (0, 2, 3, 9): 0, (0, 4, 9): 0}
    assert best_destination_route(lows, lows.get) == (0, 4, 9)
    assert best_destination_route([], lows.get) is None
