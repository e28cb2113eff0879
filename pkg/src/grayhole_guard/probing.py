"""
Route Probing

This module contains the blackhole-suspicion score of a route and the
probe session that sends multi-block test packets along a selected route.

Schedule: one initialization round followed by two update rounds. A round
succeeds only when the acknowledgment reports every block.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from .exceptions import ProbeStateError
from .packets import Path

logger = logging.getLogger(__name__)

PBH_VERIFIED_INIT = 0
PBH_UNVERIFIED_INIT = 100
PBH_SUCCESS_DELTA = -50
PBH_FAILURE_DELTA = 20
PBH_INFECTED_THRESHOLD = 50
TOTAL_ROUNDS = 3


class Verdict(str, Enum):
    PENDING = "pending"
    VALID = "valid"
    INFECTED = "infected"


@dataclass
class RouteScore:
    """P_BH value of one route plus its round history."""

    route: Path
    p_bh: int = 0
    rounds_done: int = 0
    verdict: Verdict = Verdict.PENDING
    history: List[int] = field(default_factory=list)


def round_ok(received_blocks: Optional[int], n_blocks: int) -> bool:
    """A round passes only on an acknowledgment covering every block."""
    return received_blocks is not None and received_blocks >= n_blocks


def initialize_pbh(first_round_ok: bool, route: Path = ()) -> RouteScore:
    p_bh = PBH_VERIFIED_INIT if first_round_ok else PBH_UNVERIFIED_INIT
    return RouteScore(route=route, p_bh=p_bh, rounds_done=1, history=[p_bh])


def update_pbh(score: RouteScore, round_result: bool) -> RouteScore:
    """
    Apply one update round to score.

    Raises:
        ProbeStateError: if every round has already been applied
    """
    if score.rounds_done >= TOTAL_ROUNDS or score.verdict != Verdict.PENDING:
        raise ProbeStateError(f"Route {score.route} already has a verdict")
    if round_result:
        score.p_bh = max(0, score.p_bh + PBH_SUCCESS_DELTA)
    else:
        score.p_bh += PBH_FAILURE_DELTA
    score.rounds_done += 1
    score.history.append(score.p_bh)
    return score


def classify_route(score: RouteScore) -> Verdict:
    """Infected iff p_bh >= 50 after the full schedule."""
    if score.rounds_done < TOTAL_ROUNDS:
        raise ProbeStateError(
            f"Route {score.route} classified after {score.rounds_done} of {TOTAL_ROUNDS} rounds"
        )
    if score.verdict == Verdict.PENDING:
        score.verdict = (
            Verdict.INFECTED if score.p_bh >= PBH_INFECTED_THRESHOLD else Verdict.VALID
        )
    return score.verdict


def ack_timeout(hops: int, per_hop_delay: int, gather_ms: int, margin_ms: int) -> int:
    """Round-trip budget for one probe round over a route of `hops` hops."""
    return 2 * hops * per_hop_delay + gather_ms + margin_ms


class ProbeSession:
    """Per-(source, route) probe state machine driven by acks and timeouts."""

    def __init__(self, probe_id: int, source: int, route: Path, n_blocks: int):
        if n_blocks < 1:
            raise ValueError("n_blocks must be at least 1")
        self.probe_id = probe_id
        self.source = source
        self.route = route
        self.n_blocks = n_blocks
        self.round_no = 0
        self.score: Optional[RouteScore] = None
        self.log: List[dict] = []

    @property
    def finished(self) -> bool:
        return self.score is not None and self.score.rounds_done >= TOTAL_ROUNDS

    def next_round(self) -> int:
        self.round_no += 1
        return self.round_no

    def record_round(self, received_blocks: Optional[int]) -> Verdict:
        """
        Judge the current round from the ack (None when it timed out).

        Returns:
            The route verdict, still pending until the last round
        """
        passed = round_ok(received_blocks, self.n_blocks)
        if self.score is None:
            self.score = initialize_pbh(passed, self.route)
        else:
            update_pbh(self.score, passed)
        verdict = classify_route(self.score) if self.finished else Verdict.PENDING
        self.log.append(
            {
                "probe_id": self.probe_id,
                "route": self.route,
                "round": self.round_no,
                "ack_blocks": received_blocks,
                "p_bh": self.score.p_bh,
                "verdict": verdict.value,
            }
        )
        logger.debug(
            "Probe %s round %s: ack=%s p_bh=%s", self.probe_id, self.round_no,
            received_blocks, self.score.p_bh,
        )
        return verdict
