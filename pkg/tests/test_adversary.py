"""
Gray Hole Adversary Tests

Role sampling, fake replies and the attacker reactions to each traffic class.
"""

import numpy as np
import pytest

from src.grayhole_guard.adversary import (ControlReaction, NodeBehavior, Role,
                                          assign_roles, attacker_count,
                                          attacker_handle_control,
                                          attacker_handle_data,
                                          attacker_handle_rreq,
                                          attacker_handle_rreq_forwarding,
                                          fake_route, relays_control,
                                          supplies_table)
from src.grayhole_guard.detection import sha256
from src.grayhole_guard.exceptions import ConfigurationError
from src.grayhole_guard.kernel import Topology
from src.grayhole_guard.packets import ControlPacket, Rreq


def _line(n):
    return Topology({i: (40.0 * i, 0.0) for i in range(n)})


def _packet():
    challenge = b"c" * 16
    return ControlPacket(1, 0, 2, challenge, sha256(challenge), (0, 2, 5))


@pytest.mark.parametrize(
    "n,ratio,expected",
    [(100, 0.08, 8), (50, 0.05, 3), (10, 0.0, 0), (7, 0.5, 4)],
)
def test_attacker_count_rounds_half_up(n, ratio, expected):
    assert attacker_count(n, ratio) == expected


def test_role_assignment_is_seeded():
    topology = _line(20)
    template = NodeBehavior.gray_hole()

    first, truth = assign_roles(topology, 0.2, template, np.random.default_rng(5))
    second, _ = assign_roles(topology, 0.2, template, np.random.default_rng(5))

    assert first == second
    assert len(truth.malicious) == 4
    assert all(first[i].malicious == (i in truth) for i in topology.ids)


def test_excluded_endpoints_stay_honest():
    topology = _line(10)
    behaviors, truth = assign_roles(
        topology, 0.5, NodeBehavior.gray_hole(), np.random.default_rng(1), exclude=(0, 9)
    )
    assert 0 not in truth and 9 not in truth
    assert len(truth.malicious) == 5
    assert not behaviors[0].malicious


def test_cooperative_pairs_point_at_each_other():
    topology = _line(10)
    behaviors, truth = assign_roles(
        topology, 0.4, NodeBehavior.gray_hole(), np.random.default_rng(2), cooperative_pairs=2
    )
    cooperative = [i for i, b in behaviors.items() if b.role == Role.COOPERATIVE]

    assert sorted(cooperative) == sorted(truth.malicious)
    for node_id in cooperative:
        partner = behaviors[node_id].partner
        assert behaviors[partner].partner == node_id
        assert behaviors[node_id].control_reaction == ControlReaction.SHIELD_PARTNER


def test_too_many_attackers_is_a_configuration_error():
    with pytest.raises(ConfigurationError):
        assign_roles(_line(4), 0.75, NodeBehavior.gray_hole(), np.random.default_rng(0))
    with pytest.raises(ConfigurationError):
        assign_roles(
            _line(4), 0.5, NodeBehavior.gray_hole(), np.random.default_rng(0), exclude=(0, 1, 2)
        )


def test_fake_reply_spoofs_the_destination():
    rreq = Rreq(origin=0, sequence=1, destination=9, source_route=(0, 2))
    single = NodeBehavior.gray_hole()
    paired = single.paired_with(6)

    assert fake_route(single, 4, rreq) == (0, 2, 4, 9)
    assert fake_route(paired, 4, rreq) == (0, 2, 4, 6, 9)
    assert fake_route(single.paired_with(2), 4, rreq) == (0, 2, 4, 9)

    rrep = attacker_handle_rreq(single, 4, rreq)
    assert rrep.responder == 9
    assert rrep.from_destination
    assert attacker_handle_rreq(NodeBehavior.honest(), 4, rreq) is None
    assert attacker_handle_rreq(NodeBehavior.gray_hole(fast_reply=False), 4, rreq) is None


def test_drop_probabilities_at_the_extremes():
    rng = np.random.default_rng(0)
    always = NodeBehavior.gray_hole(data_drop_prob=1.0, rreq_drop_prob=1.0)
    never = NodeBehavior.gray_hole(data_drop_prob=0.0, rreq_drop_prob=0.0)

    assert attacker_handle_data(always, rng)
    assert not attacker_handle_rreq_forwarding(always, rng)
    assert not attacker_handle_data(never, rng)
    assert attacker_handle_rreq_forwarding(never, rng)
    assert not attacker_handle_data(NodeBehavior.honest(), rng)


def test_class_based_attacker_drops_data_only():
    rng = np.random.default_rng(0)
    attacker = NodeBehavior.gray_hole(data_drop_prob=0.0, rreq_drop_prob=1.0, class_based=True)

    assert attacker_handle_data(attacker, rng)
    assert attacker_handle_rreq_forwarding(attacker, rng)
    assert attacker_handle_control(attacker, _packet(), rng).digest == sha256(b"c" * 16)
    assert supplies_table(attacker)
    assert relays_control(attacker, None)


def test_control_reactions():
    rng = np.random.default_rng(0)
    packet = _packet()
    expected = sha256(packet.challenge)

    def react(reaction):
        return attacker_handle_control(
            NodeBehavior.gray_hole(control_reaction=reaction), packet, rng
        )

    assert attacker_handle_control(NodeBehavior.honest(), packet, rng) == (expected, True)
    assert react(ControlReaction.SILENT_DROP) == (None, False)
    assert react(ControlReaction.FORWARD_NO_RESPONSE) == (None, True)
    wrong = react(ControlReaction.WRONG_DIGEST)
    assert wrong.forward and wrong.digest != expected
    assert react(ControlReaction.SHIELD_PARTNER) == (expected, True)


def test_table_supply_and_relaying():
    silent = NodeBehavior.gray_hole()
    shield = NodeBehavior.gray_hole().paired_with(3)

    assert not supplies_table(silent)
    assert not relays_control(silent, None)
    assert supplies_table(shield)
    assert relays_control(shield, None)
    assert relays_control(shield, 5)
    assert not relays_control(shield, 3)
    assert relays_control(NodeBehavior.honest(), 3)
