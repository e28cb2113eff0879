"""
Gray Hole Adversary

This module contains the node roles, the attacker parameters and the
decisions a simple or cooperative gray hole takes on discovery, data and
Phase 3 control traffic. Ground truth about who is malicious lives here and
is read only by scoring.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, FrozenSet, Iterable, NamedTuple, Optional, Tuple

import numpy as np

from .detection import CHALLENGE_BYTES, sha256
from .exceptions import ConfigurationError
from .kernel import Topology
from .packets import ControlPacket, Rreq, Rrep

logger = logging.getLogger(__name__)


class Role(str, Enum):
    HONEST = "honest"
    SIMPLE = "simple_grayhole"
    COOPERATIVE = "cooperative_grayhole"


class ControlReaction(str, Enum):
    """How an attacker treats Phase 3 traffic."""

    SILENT_DROP = "silent_drop"
    WRONG_DIGEST = "wrong_digest"
    FORWARD_NO_RESPONSE = "forward_no_response"
    SHIELD_PARTNER = "shield_partner"


@dataclass(frozen=True)
class NodeBehavior:
    """Role and drop parameters of one node."""

    role: Role = Role.HONEST
    data_drop_prob: float = 0.0
    rreq_drop_prob: float = 0.0
    control_reaction: Optional[ControlReaction] = None
    fast_reply: bool = False
    partner: Optional[int] = None
    class_based: bool = False

    @property
    def malicious(self) -> bool:
        return self.role != Role.HONEST

    @classmethod
    def honest(cls) -> "NodeBehavior":
        return cls()

    @classmethod
    def gray_hole(
        cls,
        data_drop_prob: float = 0.5,
        rreq_drop_prob: float = 0.5,
        control_reaction: ControlReaction = ControlReaction.SILENT_DROP,
        fast_reply: bool = True,
        class_based: bool = False,
    ) -> "NodeBehavior":
        return cls(
            role=Role.SIMPLE,
            data_drop_prob=data_drop_prob,
            rreq_drop_prob=rreq_drop_prob,
            control_reaction=control_reaction,
            fast_reply=fast_reply,
            class_based=class_based,
        )

    def paired_with(self, partner: int) -> "NodeBehavior":
        return replace(
            self,
            role=Role.COOPERATIVE,
            partner=partner,
            control_reaction=ControlReaction.SHIELD_PARTNER,
        )


@dataclass(frozen=True)
class GroundTruth:
    """Truly malicious node ids of a run."""

    malicious: FrozenSet[int]

    @classmethod
    def from_behaviors(cls, behaviors: Dict[int, NodeBehavior]) -> "GroundTruth":
        return cls(frozenset(i for i, b in behaviors.items() if b.malicious))

    def __contains__(self, node_id: int) -> bool:
        return node_id in self.malicious


class ControlAction(NamedTuple):
    """What a node does with a control packet addressed to it."""

    digest: Optional[bytes]
    forward: bool


def _coin(rng: np.random.Generator, prob: float) -> bool:
    if prob <= 0.0:
        return False
    if prob >= 1.0:
        return True
    return bool(rng.random() < prob)


def attacker_count(node_count: int, ratio: float) -> int:
    """Attackers for a ratio, rounded half up."""
    return int(math.floor(ratio * node_count + 0.5))


def assign_roles(
    topology: Topology,
    ratio: float,
    template: NodeBehavior,
    rng: np.random.Generator,
    cooperative_pairs: int = 0,
    exclude: Iterable[int] = (),
) -> Tuple[Dict[int, NodeBehavior], GroundTruth]:
    """
    Sample round(ratio * n) attackers and pair some of them.

    Args:
        topology: Network whose node ids are assigned
        ratio: Malicious node ratio in [0, 1]
        template: Behavior given to every attacker
        rng: Role sampling stream
        cooperative_pairs: Number of colluding pairs to form, nearest first
        exclude: Ids that must stay honest (fixed flow endpoints)

    Returns:
        (behavior per node id, ground truth)
    """
    ids = sorted(topology.ids)
    excluded = set(exclude)
    eligible = [i for i in ids if i not in excluded]
    count = attacker_count(len(ids), ratio)
    honest_left = len(ids) - count
    if count > len(eligible) or honest_left < 2:
        raise ConfigurationError(
            f"{count} attackers among {len(ids)} nodes leaves no room for honest flow endpoints"
        )

    chosen = sorted(int(i) for i in rng.choice(eligible, size=count, replace=False)) if count else []
    behaviors = {i: NodeBehavior.honest() for i in ids}
    for node_id in chosen:
        behaviors[node_id] = template

    unpaired = list(chosen)
    formed = 0
    while formed < cooperative_pairs and len(unpaired) >= 2:
        first = unpaired.pop(0)
        partner = min(unpaired, key=lambda other: (topology.distance(first, other), other))
        unpaired.remove(partner)
        behaviors[first] = template.paired_with(partner)
        behaviors[partner] = template.paired_with(first)
        formed += 1
    if formed < cooperative_pairs:
        logger.warning("Only %d of %d cooperative pairs could be formed", formed, cooperative_pairs)

    return behaviors, GroundTruth.from_behaviors(behaviors)


def fake_route(attacker: NodeBehavior, node_id: int, rreq: Rreq) -> Tuple[int, ...]:
    """Route a fast-replying attacker advertises: itself, its partner, then the destination."""
    route = rreq.source_route + (node_id,)
    if attacker.partner is not None and attacker.partner not in route:
        route += (attacker.partner,)
    return route + (rreq.destination,)


def attacker_handle_rreq(attacker: NodeBehavior, node_id: int, rreq: Rreq) -> Optional[Rrep]:
    """Immediate fake RREP claiming to come from the destination, if fast_reply."""
    if not attacker.malicious or not attacker.fast_reply:
        return None
    return Rrep(rreq_id=rreq.rreq_id, responder=rreq.destination, route=fake_route(attacker, node_id, rreq))


def attacker_handle_rreq_forwarding(attacker: NodeBehavior, rng: np.random.Generator) -> bool:
    """True when the attacker rebroadcasts the RREQ."""
    if not attacker.malicious or attacker.class_based:
        return True
    return not _coin(rng, attacker.rreq_drop_prob)


def attacker_handle_data(attacker: NodeBehavior, rng: np.random.Generator) -> bool:
    """True when a data packet or test block is dropped."""
    if not attacker.malicious:
        return False
    if attacker.class_based:
        return True
    return _coin(rng, attacker.data_drop_prob)


def attacker_handle_control(
    attacker: NodeBehavior, packet: ControlPacket, rng: np.random.Generator
) -> ControlAction:
    """Response digest (None for no response) and whether to pass the probe on."""
    honest = ControlAction(sha256(packet.challenge), True)
    if not attacker.malicious or attacker.class_based:
        return honest
    reaction = attacker.control_reaction
    if reaction == ControlReaction.SILENT_DROP:
        return ControlAction(None, False)
    if reaction == ControlReaction.WRONG_DIGEST:
        return ControlAction(sha256(rng.bytes(CHALLENGE_BYTES)), True)
    if reaction == ControlReaction.FORWARD_NO_RESPONSE:
        return ControlAction(None, True)
    return honest


def supplies_table(attacker: NodeBehavior) -> bool:
    """Whether the node answers a monitoring-table request."""
    if not attacker.malicious or attacker.class_based:
        return True
    return attacker.control_reaction != ControlReaction.SILENT_DROP


def relays_control(attacker: NodeBehavior, originator: Optional[int]) -> bool:
    """
    Whether the node relays Phase 3 traffic of another node.

    originator is the node that produced the response being relayed (None
    for requests travelling downstream).
    """
    if not attacker.malicious or attacker.class_based:
        return True
    if attacker.control_reaction == ControlReaction.SILENT_DROP:
        return False
    if attacker.control_reaction == ControlReaction.SHIELD_PARTNER:
        return originator is None or originator != attacker.partner
    return True
