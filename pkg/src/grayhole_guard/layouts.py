"""
Scripted Layouts

This module contains hand-placed topologies with fixed roles and flows:
the nine-node suspicious-node layout, the simple and cooperative attack
layouts, and the tree-shaped chains used for exhaustive checks.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .adversary import ControlReaction, NodeBehavior
from .exceptions import ConfigurationError
from .kernel import Topology

CHAIN_SPACING = 40.0
LEAF_OFFSET = 45.0
CHAIN_BASELINE = 50.0


def always_drop() -> NodeBehavior:
    """Gray hole that drops every relayed RREQ and data packet."""
    return NodeBehavior.gray_hole(
        data_drop_prob=1.0,
        rreq_drop_prob=1.0,
        control_reaction=ControlReaction.SILENT_DROP,
        fast_reply=True,
    )


@dataclass
class ScriptedLayout:
    """Fixed positions, roles and flows."""

    name: str
    description: str
    positions: Dict[int, Tuple[float, float]]
    flows: List[Tuple[int, int]]
    behaviors: Dict[int, NodeBehavior] = field(default_factory=dict)
    range_m: float = 50.0

    def topology(self) -> Topology:
        return Topology(self.positions, range_m=self.range_m)

    def all_behaviors(self) -> Dict[int, NodeBehavior]:
        return {node_id: self.behaviors.get(node_id, NodeBehavior.honest()) for node_id in self.positions}

    @property
    def attackers(self) -> List[int]:
        return sorted(i for i, b in self.behaviors.items() if b.malicious)


def suspicious_node_layout(attacker: Optional[NodeBehavior] = None) -> ScriptedLayout:
    """
    Nine nodes; source 5 reaches destination 9 only through node 3.

    Node 3 is the gray hole. After the first discovery node 4 holds
    5: (0, 0), 8: (0, 1) and 3: (1, 0) in its monitoring table.
    """
    return ScriptedLayout(
        name="suspicious_node",
        description="Nine-node layout with one gray hole between source 5 and destination 9",
        positions={
            1: (0.0, 40.0),
            2: (120.0, 40.0),
            3: (120.0, 0.0),
            4: (80.0, 0.0),
            5: (0.0, 0.0),
            6: (200.0, 40.0),
            7: (200.0, 0.0),
            8: (40.0, 0.0),
            9: (160.0, 0.0),
        },
        flows=[(5, 9)],
        behaviors={3: attacker or always_drop()},
    )


def simple_attack_layout(attacker: Optional[NodeBehavior] = None) -> ScriptedLayout:
    """Source 0 and destination 2 with gray hole 1 on the short path and 3-4 as the detour."""
    return ScriptedLayout(
        name="simple_attack",
        description="One gray hole on the two-hop path, an honest three-hop detour",
        positions={
            0: (0.0, 40.0),
            1: (45.0, 40.0),
            2: (90.0, 40.0),
            3: (25.0, 0.0),
            4: (65.0, 0.0),
        },
        flows=[(0, 2)],
        behaviors={1: attacker or always_drop()},
    )


def cooperative_attack_layout(attacker: Optional[NodeBehavior] = None) -> ScriptedLayout:
    """Line 0..5 with colluding nodes 2 and 3 shielding each other."""
    template = attacker or NodeBehavior.gray_hole(data_drop_prob=1.0, rreq_drop_prob=0.5)
    return ScriptedLayout(
        name="cooperative_attack",
        description="Six-node line, nodes 2 and 3 collude as a cooperative pair",
        positions={i: (CHAIN_SPACING * i, CHAIN_BASELINE) for i in range(6)},
        flows=[(0, 5)],
        behaviors={2: template.paired_with(3), 3: template.paired_with(2)},
    )


def chain_layout(
    length: int,
    attacker_index: int,
    leaves: Sequence[int] = (),
    attacker: Optional[NodeBehavior] = None,
) -> ScriptedLayout:
    """
    A chain 0..length-1 with single leaves hung off some chain nodes.

    Leaves alternate sides by chain position, so the graph is a tree and the
    chain is the unique path between its ends. Leaf ids follow the chain ids.

    Args:
        length: Chain nodes, at least 3
        attacker_index: Interior chain position of the gray hole
        leaves: Chain positions that get a leaf
        attacker: Gray hole behavior (always-drop by default)
    """
    if length < 3:
        raise ConfigurationError("A chain needs at least 3 nodes")
    if not 0 < attacker_index < length - 1:
        raise ConfigurationError("The attacker must sit strictly inside the chain")
    positions = {i: (CHAIN_SPACING * i, CHAIN_BASELINE) for i in range(length)}
    for offset, anchor in enumerate(sorted(set(leaves))):
        if not 0 <= anchor < length:
            raise ConfigurationError(f"Leaf anchor {anchor} is outside the chain")
        side = LEAF_OFFSET if anchor % 2 == 0 else -LEAF_OFFSET
        positions[length + offset] = (CHAIN_SPACING * anchor, CHAIN_BASELINE + side)
    return ScriptedLayout(
        name="chain",
        description=f"Chain of {length} with {len(set(leaves))} leaves, gray hole at {attacker_index}",
        positions=positions,
        flows=[(0, length - 1)],
        behaviors={attacker_index: attacker or always_drop()},
    )


LAYOUTS: Dict[str, Callable[[], ScriptedLayout]] = {
    "suspicious_node": suspicious_node_layout,
    "simple_attack": simple_attack_layout,
    "cooperative_attack": cooperative_attack_layout,
}


def get_layout(name: str) -> ScriptedLayout:
    try:
        return LAYOUTS[name]()
    except KeyError:
        raise ConfigurationError(
            f"Unknown layout '{name}'. Available: {', '.join(sorted(LAYOUTS))}"
        ) from None
