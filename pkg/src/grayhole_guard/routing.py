"""
Route Entries and Selection

This module contains the route entry state machine and the trust-aware
choice among the RREPs an origin collected for one discovery.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

from .exceptions import RouteStateError
from .packets import Path, Rrep


class RouteState(str, Enum):
    """Lifecycle of a candidate route."""

    CANDIDATE = "candidate"
    TESTED_VALID = "tested-valid"
    INFECTED = "infected"
    PURGED = "purged"


_ALLOWED = {
    RouteState.CANDIDATE: {RouteState.TESTED_VALID, RouteState.INFECTED},
    RouteState.TESTED_VALID: set(),
    RouteState.INFECTED: set(),
    RouteState.PURGED: set(),
}


@dataclass
class RouteEntry:
    """A route known to an origin."""

    destination: int
    path: Path
    trust_summary: int = 0
    state: RouteState = RouteState.CANDIDATE
    from_destination: bool = True

    def transition(self, new_state: RouteState) -> None:
        """
        Move to new_state.

        Raises:
            RouteStateError: if the transition is not allowed
        """
        if new_state == RouteState.PURGED:
            self.state = new_state
            return
        if new_state not in _ALLOWED[self.state]:
            raise RouteStateError(
                f"Route {self.path}: illegal transition {self.state.value} -> {new_state.value}"
            )
        self.state = new_state

    @property
    def usable(self) -> bool:
        return self.state != RouteState.PURGED

    def contains(self, node_id: int) -> bool:
        return node_id in self.path

    @property
    def hops(self) -> int:
        return len(self.path) - 1

    @classmethod
    def from_rrep(cls, rrep: Rrep) -> "RouteEntry":
        return cls(
            destination=rrep.destination,
            path=rrep.route,
            trust_summary=rrep.low_count,
            from_destination=rrep.from_destination,
        )


def selection_key(rrep: Rrep):
    """Destination replies first, then fewest Low hops, shorter, earlier, lexicographic."""
    return (not rrep.from_destination, rrep.low_count, len(rrep.route), rrep.received_at, rrep.route)


def select_route(origin: int, candidates: Sequence[Rrep]) -> RouteEntry:
    """
    Pick the most trusted candidate RREP collected by origin.

    Args:
        origin: Node that issued the discovery
        candidates: RREPs received during the wait window, any order

    Returns:
        RouteEntry in state candidate for the chosen route
    """
    if not candidates:
        raise ValueError(f"Node {origin} has no candidate route to select from")
    return RouteEntry.from_rrep(min(candidates, key=selection_key))


def select_first(candidates: Sequence[Rrep]) -> RouteEntry:
    """Plain AODV choice: the earliest RREP that arrived."""
    if not candidates:
        raise ValueError("No candidate route to select from")
    return RouteEntry.from_rrep(candidates[0])


def is_connected_path(path: Path, topology) -> bool:
    """True when every consecutive pair on path are radio neighbors."""
    return all(topology.are_neighbors(a, b) for a, b in zip(path, path[1:]))


def best_destination_route(routes: Iterable[Path], low_count_of) -> Optional[Path]:
    """
    Route a destination answers along among the request copies it collected.

    Args:
        routes: Candidate paths origin -> destination
        low_count_of: Callable giving the Low-hop count of a path

    Returns:
        Best path, or None when there is no copy
    """
    routes = list(routes)
    if not routes:
        return None
    return min(routes, key=lambda path: (low_count_of(path), len(path), path))
