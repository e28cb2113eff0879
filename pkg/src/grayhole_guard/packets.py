"""
Packet Definitions

This module contains the immutable packet types exchanged by the simulated
nodes: discovery (RREQ/RREP), data and test blocks, Phase 3 control traffic
and blacklist broadcasts.

Routed packets carry their full node-id path. The holder at position i of
the path forwards downstream to path[i + 1] or upstream to path[i - 1].
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

RreqId = Tuple[int, int]
Path = Tuple[int, ...]


@dataclass(frozen=True)
class Rreq:
    """Route request flooded by an origin; source_route grows hop by hop."""

    origin: int
    sequence: int
    destination: int
    source_route: Path

    @property
    def rreq_id(self) -> RreqId:
        return (self.origin, self.sequence)

    def extend(self, node_id: int) -> "Rreq":
        """Copy of this request with node_id appended to the source route."""
        return replace(self, source_route=self.source_route + (node_id,))


@dataclass(frozen=True)
class Rrep:
    """Route reply travelling upstream along route towards route[0]."""

    rreq_id: RreqId
    responder: int
    route: Path
    trust_annotations: Tuple[str, ...] = ()
    received_at: int = 0

    @property
    def from_destination(self) -> bool:
        return self.responder == self.route[-1]

    @property
    def destination(self) -> int:
        return self.route[-1]

    def annotate(self, level: str) -> "Rrep":
        return replace(self, trust_annotations=self.trust_annotations + (level,))

    def stamped(self, at: int) -> "Rrep":
        """Copy carrying the time it reached its origin."""
        return replace(self, received_at=at)

    @property
    def low_count(self) -> int:
        return sum(1 for level in self.trust_annotations if level == "Low")


@dataclass(frozen=True)
class DataPacket:
    """CBR payload packet."""

    flow_id: int
    sequence: int
    route: Path
    created_at: int
    size: int = 256


@dataclass(frozen=True)
class TestBlock:
    """One block of a Phase 2 test packet."""

    probe_id: int
    round_no: int
    block: int
    route: Path


@dataclass(frozen=True)
class ProbeAck:
    """Destination acknowledgment with the number of blocks it received."""

    probe_id: int
    round_no: int
    received_blocks: int
    route: Path


@dataclass(frozen=True)
class ControlPacket:
    """Phase 3 hop probe: creator, next hop and the session challenge."""

    session_id: int
    node_id: int
    id_next: int
    challenge: bytes
    digest_field: bytes
    route: Path


@dataclass(frozen=True)
class HopResponse:
    """Digest computed by a probed hop, routed back to the session source."""

    session_id: int
    responder: int
    digest: bytes
    route: Path


@dataclass(frozen=True)
class TableRequest:
    """Arbitration request for a node's monitoring table."""

    session_id: int
    target: int
    route: Path


@dataclass(frozen=True)
class TableReply:
    """Monitoring table rows (neighbor, rreq_t, rreq_c) returned to the source."""

    session_id: int
    responder: int
    rows: Tuple[Tuple[int, int, int], ...]
    route: Path


@dataclass(frozen=True)
class BlacklistMsg:
    """Network-wide conviction notice."""

    convicted: int
    issuer: int
    session_id: int = field(default=0)

    def __post_init__(self):
        if self.convicted == self.issuer:
            raise ValueError("A node cannot blacklist itself")


def next_hop(route: Path, holder: int) -> Optional[int]:
    """Downstream neighbor of holder on route, or None at the tail."""
    index = route.index(holder)
    return route[index + 1] if index + 1 < len(route) else None


def previous_hop(route: Path, holder: int) -> Optional[int]:
    """Upstream neighbor of holder on route, or None at the head."""
    index = route.index(holder)
    return route[index - 1] if index > 0 else None


def packet_kind(packet) -> str:
    """Short type label used by the packet trace."""
    return {
        Rreq: "RREQ",
        Rrep: "RREP",
        DataPacket: "DATA",
        TestBlock: "TEST",
        ProbeAck: "ACK",
        ControlPacket: "CTRL",
        HopResponse: "HOPRESP",
        TableRequest: "TBLREQ",
        TableReply: "TBLREP",
        BlacklistMsg: "BLACKLIST",
    }.get(type(packet), type(packet).__name__)
