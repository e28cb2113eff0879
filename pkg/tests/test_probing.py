"""
Route Probing Tests

The P_BH score over every round-outcome sequence, and the probe session.
"""

import itertools

import pytest

from src.grayhole_guard.exceptions import ProbeStateError
from src.grayhole_guard.probing import (ProbeSession, Verdict, ack_timeout,
                                        classify_route, initialize_pbh,
                                        round_ok, update_pbh)

# (round 1, round 2, round 3) -> final p_bh
EXPECTED_SCORES = {
    (True, True, True): 0,
    (True, True, False): 20,
    (True, False, True): 0,
    (True, False, False): 40,
    (False, True, True): 0,
    (False, True, False): 70,
    (False, False, True): 70,
    (False, False, False): 140,
}


@pytest.mark.parametrize("outcomes", list(itertools.product([True, False], repeat=3)))
def test_every_round_sequence(outcomes):
    score = initialize_pbh(outcomes[0], route=(0, 1, 2))
    for result in outcomes[1:]:
        update_pbh(score, result)

    assert score.p_bh == EXPECTED_SCORES[outcomes]
    assert score.rounds_done == 3
    expected = Verdict.INFECTED if score.p_bh >= 50 else Verdict.VALID
    assert classify_route(score) == expected


def test_all_success_is_valid_and_two_late_failures_are_not_enough():
    clean = initialize_pbh(True)
    update_pbh(clean, True)
    update_pbh(clean, True)
    assert classify_route(clean) == Verdict.VALID

    late = initialize_pbh(True)
    update_pbh(late, False)
    update_pbh(late, False)
    assert late.p_bh == 40
    assert classify_route(late) == Verdict.VALID


def test_score_history_and_threshold_equality():
    score = initialize_pbh(False)
    update_pbh(score, True)
    assert score.history == [100, 50]
    update_pbh(score, True)
    assert score.history == [100, 50, 0]

    at_threshold = initialize_pbh(False)
    update_pbh(at_threshold, True)
    at_threshold.rounds_done = 3
    assert classify_route(at_threshold) == Verdict.INFECTED


def test_updates_after_the_schedule_are_rejected():
    score = initialize_pbh(True)
    update_pbh(score, True)
    update_pbh(score, True)
    with pytest.raises(ProbeStateError):
        update_pbh(score, True)


def test_classification_before_the_last_round_is_rejected():
    score = initialize_pbh(True)
    with pytest.raises(ProbeStateError):
        classify_route(score)


def test_a_short_ack_fails_the_round():
    assert round_ok(10, 10)
    assert not round_ok(9, 10)
    assert not round_ok(None, 10)
    assert initialize_pbh(round_ok(9, 10)).p_bh == 100


def test_ack_timeout_covers_the_round_trip():
    assert ack_timeout(hops=4, per_hop_delay=2, gather_ms=2, margin_ms=10) == 28


def test_probe_session_runs_three_rounds():
    session = ProbeSession(probe_id=1, source=0, route=(0, 1, 2), n_blocks=10)

    assert session.next_round() == 1
    assert session.record_round(None) == Verdict.PENDING
    assert session.next_round() == 2
    assert session.record_round(10) == Verdict.PENDING
    assert session.next_round() == 3
    assert session.record_round(4) == Verdict.INFECTED

    assert [row["p_bh"] for row in session.log] == [100, 50, 70]
    assert [row["ack_blocks"] for row in session.log] == [None, 10, 4]
    assert session.log[-1]["verdict"] == "infected"
    assert session.finished


def test_probe_session_needs_blocks():
    with pytest.raises(ValueError):
        ProbeSession(probe_id=1, source=0, route=(0, 1), n_blocks=0)
