"""
Gray Hole Detection

This module contains the hop-by-hop SHA-256 challenge session run over an
infected route and the monitoring-table arbitration used when a hop stays
silent.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from .packets import ControlPacket, Path
from .trust import TableSnapshot, TrustLevel

logger = logging.getLogger(__name__)

CHALLENGE_BYTES = 16


def sha256(message: bytes) -> bytes:
    """SHA-256 digest of message (32 bytes)."""
    return hashlib.sha256(message).digest()


class OutcomeKind(str, Enum):
    CLEAN = "clean"
    MALICIOUS = "malicious"
    ARBITRATION = "arbitration"


@dataclass(frozen=True)
class DetectionOutcome:
    """Result of judging a hop; `suspect` is set for malicious verdicts."""

    route: Path
    kind: OutcomeKind
    suspect: Optional[int] = None
    pair: Optional[Tuple[int, int]] = None

    @classmethod
    def clean(cls, route: Path) -> "DetectionOutcome":
        return cls(route, OutcomeKind.CLEAN)

    @classmethod
    def malicious(cls, route: Path, node_id: int) -> "DetectionOutcome":
        if node_id not in route:
            raise ValueError(f"Suspect {node_id} is not on route {route}")
        return cls(route, OutcomeKind.MALICIOUS, suspect=node_id)

    @classmethod
    def arbitration(cls, route: Path, x: int, y: int) -> "DetectionOutcome":
        return cls(route, OutcomeKind.ARBITRATION, pair=(x, y))


def judge_hop(
    route: Path, hop: int, expected: bytes, digest: Optional[bytes]
) -> Optional[DetectionOutcome]:
    """
    Judge the response (or timeout, digest=None) of route[hop].

    Returns:
        An outcome, or None when the session should continue with hop + 1
    """
    node_id = route[hop]
    if digest is None:
        return DetectionOutcome.arbitration(route, route[hop - 1], node_id)
    if digest != expected:
        return DetectionOutcome.malicious(route, node_id)
    if hop == len(route) - 1:
        return DetectionOutcome.clean(route)
    return None


class VerdictBasis(str, Enum):
    WRONG_DIGEST = "wrong-digest"
    X_REFUSED = "x-refused"
    Y_REFUSED = "y-refused"
    Y_LOW = "y-low-at-x"
    Y_FORWARDS = "y-forwards-everything"
    DEFAULT = "default-downstream"
    SOURCE_UPSTREAM = "source-upstream"
    DESTINATION_DOWNSTREAM = "destination-downstream"


def arbitrate(
    x: int,
    y: int,
    table_x: Optional[TableSnapshot],
    table_y: Optional[TableSnapshot],
) -> Tuple[int, VerdictBasis]:
    """
    Decide which of two adjacent route nodes is malicious.

    Args:
        x: Upstream node that delivered the control packet
        y: Downstream node that did not answer
        table_x: x's monitoring table, or None if x refused to supply it
        table_y: y's monitoring table, or None if y refused to supply it

    Returns:
        (convicted node id, rule that decided it)
    """
    if table_x is None:
        return x, VerdictBasis.X_REFUSED
    if table_y is None:
        return y, VerdictBasis.Y_REFUSED
    if table_x.classify(y) == TrustLevel.LOW:
        return y, VerdictBasis.Y_LOW
    rreq_t, rreq_c = table_x.counts(y)
    if rreq_t >= 1 and rreq_c >= rreq_t:
        return x, VerdictBasis.Y_FORWARDS
    return y, VerdictBasis.DEFAULT


@dataclass
class DetectionSession:
    """Challenge session of one source over one infected route."""

    session_id: int
    route: Path
    challenge: bytes
    started_at: int
    hop: int = 1
    outcome: Optional[DetectionOutcome] = None
    convicted: Optional[int] = None
    basis: Optional[str] = None
    responses: Dict[int, bytes] = field(default_factory=dict)
    hop_verdicts: List[str] = field(default_factory=list)
    tables: Dict[int, Optional[TableSnapshot]] = field(default_factory=dict)

    @property
    def source(self) -> int:
        return self.route[0]

    @property
    def expected(self) -> bytes:
        return sha256(self.challenge)

    @property
    def done(self) -> bool:
        return self.convicted is not None or (
            self.outcome is not None and self.outcome.kind == OutcomeKind.CLEAN
        )

    def first_packet(self) -> ControlPacket:
        return ControlPacket(
            session_id=self.session_id,
            node_id=self.source,
            id_next=self.route[1],
            challenge=self.challenge,
            digest_field=self.expected,
            route=self.route,
        )

    def deadline(self, hop: int, per_hop_delay: int, margin_ms: int) -> int:
        return self.started_at + 2 * hop * per_hop_delay + margin_ms

    def record_response(self, responder: int, digest: bytes) -> None:
        if responder in self.route:
            self.responses.setdefault(self.route.index(responder), digest)

    def advance(self) -> Optional[DetectionOutcome]:
        """
        Consume buffered responses in hop order.

        Returns:
            The outcome once one is reached, else None
        """
        while self.outcome is None and self.hop in self.responses:
            result = judge_hop(self.route, self.hop, self.expected, self.responses[self.hop])
            if result is None:
                self.hop_verdicts.append(f"{self.route[self.hop]}:ok")
                self.hop += 1
            else:
                self._settle(result)
        return self.outcome

    def time_out(self, hop: int) -> Optional[DetectionOutcome]:
        """Deadline of hop passed; only effective while the session waits on it."""
        if self.outcome is not None or hop != self.hop or hop in self.responses:
            return None
        self._settle(judge_hop(self.route, hop, self.expected, None))
        return self.outcome

    def _settle(self, outcome: DetectionOutcome) -> None:
        self.outcome = outcome
        node_id = self.route[self.hop]
        if outcome.kind == OutcomeKind.CLEAN:
            self.hop_verdicts.append(f"{node_id}:ok")
        elif outcome.kind == OutcomeKind.MALICIOUS:
            self.hop_verdicts.append(f"{node_id}:wrong-digest")
            self.convict(outcome.suspect, VerdictBasis.WRONG_DIGEST)
        else:
            self.hop_verdicts.append(f"{node_id}:timeout")
            x, y = outcome.pair
            if x == self.source:
                self.convict(y, VerdictBasis.SOURCE_UPSTREAM)
            elif y == self.route[-1]:
                self.convict(x, VerdictBasis.DESTINATION_DOWNSTREAM)

    @property
    def needs_tables(self) -> bool:
        return (
            self.outcome is not None
            and self.outcome.kind == OutcomeKind.ARBITRATION
            and self.convicted is None
        )

    def record_table(self, node_id: int, snapshot: Optional[TableSnapshot]) -> None:
        self.tables.setdefault(node_id, snapshot)

    def try_arbitrate(self) -> Optional[int]:
        """Run arbitration once both table fetches have settled."""
        if not self.needs_tables:
            return self.convicted
        x, y = self.outcome.pair
        if x not in self.tables or y not in self.tables:
            return None
        convicted, basis = arbitrate(x, y, self.tables[x], self.tables[y])
        self.convict(convicted, basis)
        return convicted

    def convict(self, node_id: int, basis: VerdictBasis) -> None:
        self.convicted = node_id
        self.basis = basis.value
        logger.info(
            "Session %s on route %s convicts node %s (%s)",
            self.session_id, self.route, node_id, basis.value,
        )

    def log_row(self) -> dict:
        return {
            "session_id": self.session_id,
            "route": self.route,
            "hop_verdicts": " ".join(self.hop_verdicts),
            "challenge": self.challenge.hex(),
            "outcome": self.outcome_label(),
        }

    def outcome_label(self) -> str:
        if self.outcome is None:
            return "aborted"
        if self.outcome.kind == OutcomeKind.CLEAN:
            return "clean"
        if self.convicted is None:
            return "arbitration-pending"
        return f"malicious({self.convicted}) via {self.basis}"
