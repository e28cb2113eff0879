"""
Gray Hole Detection Tests

Digest vectors, hop judgement, table arbitration and the challenge session.
"""

import pytest

from src.grayhole_guard.detection import (DetectionSession, OutcomeKind,
                                          VerdictBasis, arbitrate, judge_hop,
                                          sha256)
from src.grayhole_guard.trust import TableSnapshot

CHALLENGE = bytes(range(16))
ROUTE = (0, 1, 2, 3)


@pytest.mark.parametrize(
    "message,expected",
    [
        (b"", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"),
        (b"abc", "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"),
        (b"a" * 1_000_000, "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0"),
    ],
)
def test_sha256_vectors(message, expected):
    assert sha256(message).hex() == expected
    assert len(sha256(message)) == 32


def test_judge_hop_outcomes():
    expected = sha256(CHALLENGE)

    assert judge_hop(ROUTE, 1, expected, expected) is None
    assert judge_hop(ROUTE, 3, expected, expected).kind == OutcomeKind.CLEAN

    wrong = judge_hop(ROUTE, 2, expected, sha256(b"other"))
    assert wrong.kind == OutcomeKind.MALICIOUS
    assert wrong.suspect == 2

    silent = judge_hop(ROUTE, 2, expected, None)
    assert silent.kind == OutcomeKind.ARBITRATION
    assert silent.pair == (1, 2)


def test_arbitration_rules_in_order():
    clean = TableSnapshot(1, [])
    low_y = TableSnapshot(1, [(2, 1, 0)])
    forwards = TableSnapshot(1, [(2, 2, 3)])

    assert arbitrate(1, 2, None, None) == (1, VerdictBasis.X_REFUSED)
    assert arbitrate(1, 2, clean, None) == (2, VerdictBasis.Y_REFUSED)
    assert arbitrate(1, 2, low_y, clean) == (2, VerdictBasis.Y_LOW)
    assert arbitrate(1, 2, forwards, clean) == (1, VerdictBasis.Y_FORWARDS)
    assert arbitrate(1, 2, clean, clean) == (2, VerdictBasis.DEFAULT)


def _session(route=ROUTE):
    return DetectionSession(session_id=7, route=route, challenge=CHALLENGE, started_at=100)


def test_session_walks_every_hop_to_a_clean_outcome():
    session = _session()
    expected = sha256(CHALLENGE)

    # responses may arrive out of order
    session.record_response(3, expected)
    session.record_response(2, expected)
    assert session.advance() is None
    session.record_response(1, expected)

    assert session.advance().kind == OutcomeKind.CLEAN
    assert session.done
    assert session.convicted is None
    assert session.log_row()["hop_verdicts"] == "1:ok 2:ok 3:ok"
    assert session.outcome_label() == "clean"


def test_first_packet_and_deadlines():
    session = _session()
    packet = session.first_packet()

    assert packet.node_id == 0
    assert packet.id_next == 1
    assert packet.digest_field == sha256(CHALLENGE)
    assert session.deadline(2, per_hop_delay=2, margin_ms=10) == 118


def test_wrong_digest_convicts_the_responder():
    session = _session()
    session.record_response(1, sha256(CHALLENGE))
    session.record_response(2, b"\x00" * 32)
    session.advance()

    assert session.convicted == 2
    assert session.basis == VerdictBasis.WRONG_DIGEST.value
    assert session.outcome_label() == "malicious(2) via wrong-digest"


def test_silent_first_hop_convicts_it_directly():
    session = _session()
    session.time_out(1)

    assert session.convicted == 1
    assert session.basis == VerdictBasis.SOURCE_UPSTREAM.value
    assert not session.needs_tables


def test_silent_destination_convicts_its_upstream():
    session = _session()
    expected = sha256(CHALLENGE)
    session.record_response(1, expected)
    session.record_response(2, expected)
    session.advance()
    session.time_out(3)

    assert session.convicted == 2
    assert session.basis == VerdictBasis.DESTINATION_DOWNSTREAM.value


def test_silent_middle_hop_waits_for_both_tables():
    session = _session()
    session.record_response(1, sha256(CHALLENGE))
    session.advance()

    assert session.time_out(1) is None
    assert session.time_out(2).pair == (1, 2)
    assert session.needs_tables
    assert session.outcome_label() == "arbitration-pending"

    session.record_table(1, TableSnapshot(1, [(2, 0, 0)]))
    assert session.try_arbitrate() is None
    session.record_table(2, None)

    assert session.try_arbitrate() == 2
    assert session.basis == VerdictBasis.Y_REFUSED.value
    assert session.done


def test_late_timeout_is_ignored_once_answered():
    session = _session()
    session.record_response(1, sha256(CHALLENGE))
    assert session.time_out(1) is None
    assert session.outcome is None
