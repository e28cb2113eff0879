"""
Quarantine

This module contains the per-node blacklist and the purge of routing state
that references a convicted node.
"""

import logging
from typing import Iterable, List, Set

from .routing import RouteEntry, RouteState

logger = logging.getLogger(__name__)


class Blacklist:
    """Monotone set of convicted node ids held by one node."""

    def __init__(self, owner: int):
        self.owner = owner
        self._ids: Set[int] = set()

    def add(self, node_id: int) -> bool:
        """Record node_id; False when it was already known."""
        if node_id in self._ids:
            return False
        self._ids.add(node_id)
        return True

    def __contains__(self, node_id: int) -> bool:
        return node_id in self._ids

    def __len__(self) -> int:
        return len(self._ids)

    @property
    def ids(self) -> List[int]:
        return sorted(self._ids)


def is_tainted(path: Iterable[int], blacklist: Blacklist) -> bool:
    """True when any node on path is blacklisted."""
    if not len(blacklist):
        return False
    return any(node_id in blacklist for node_id in path)


def apply_blacklist(routes: Iterable[RouteEntry], convicted: int) -> List[RouteEntry]:
    """
    Purge every route entry whose path contains convicted.

    Returns:
        The entries that were purged by this call
    """
    purged = []
    for entry in routes:
        if entry.state != RouteState.PURGED and entry.contains(convicted):
            entry.transition(RouteState.PURGED)
            purged.append(entry)
    if purged:
        logger.debug("Purged %d route(s) through node %s", len(purged), convicted)
    return purged
