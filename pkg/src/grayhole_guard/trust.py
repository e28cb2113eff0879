"""
Trust Monitoring

This module contains the per-node monitoring tables of neighbor RREQ
behavior and the High/Low trust classification derived from them.

A node's entry for neighbor Y counts the RREQs the node handed to Y
(rreq_t) and the RREQ forwards by Y that the node overheard (rreq_c).
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Hashable, Iterable, List, NamedTuple, Optional, Tuple

TRUST_THRESHOLD = 0


class TrustLevel(str, Enum):
    """Two-valued trust classification."""

    HIGH = "High"
    LOW = "Low"


@dataclass
class MonitorEntry:
    """Counters kept for one neighbor."""

    neighbor: int
    rreq_t: int = 0
    rreq_c: int = 0

    @property
    def score(self) -> int:
        return self.rreq_t - self.rreq_c


def classify_counts(rreq_t: int, rreq_c: int) -> TrustLevel:
    """High iff rreq_t - rreq_c <= TRUST_THRESHOLD."""
    if rreq_t - rreq_c <= TRUST_THRESHOLD:
        return TrustLevel.HIGH
    return TrustLevel.LOW


class _Mark(NamedTuple):
    """Where and when one half of a delivery/forward pair was counted."""

    epoch: int
    entry: MonitorEntry
    at: int


def _counts_of(entries: Dict[int, MonitorEntry]) -> Dict[int, Tuple[int, int]]:
    return {neighbor: (entry.rreq_t, entry.rreq_c) for neighbor, entry in sorted(entries.items())}


class MonitoringTable:
    """
    Monitoring table owned by one node, reset every epoch.

    Deliveries and overheard forwards that name their request id are paired
    per neighbor: the forward is credited to the epoch holding the matching
    delivery, whichever of the two was seen first. A delivery younger than
    settle_ms is not yet evidence against the neighbor, because its forward
    can still be on the air.
    """

    def __init__(self, owner: int, settle_ms: int = 0):
        self.owner = owner
        self.settle_ms = int(settle_ms)
        self.entries: Dict[int, MonitorEntry] = {}
        self.epoch = 0
        self.clock = 0
        self._closed: List[Tuple[int, Dict[int, MonitorEntry]]] = []
        self._handed: Dict[int, Dict[Hashable, _Mark]] = {}
        self._heard: Dict[int, Dict[Hashable, _Mark]] = {}

    def entry(self, neighbor: int) -> MonitorEntry:
        found = self.entries.get(neighbor)
        if found is None:
            found = MonitorEntry(neighbor)
            self.entries[neighbor] = found
        return found

    def insert(self, neighbor: int) -> None:
        """Add neighbor with zero counters if it is not present yet."""
        if neighbor != self.owner:
            self.entry(neighbor)

    def record_delivery(self, neighbor: int, request: Optional[Hashable] = None) -> None:
        entry = self.entry(neighbor)
        entry.rreq_t += 1
        if request is None:
            return
        heard = self._heard.get(neighbor, {}).pop(request, None)
        if heard is None:
            self._handed.setdefault(neighbor, {})[request] = _Mark(self.epoch, entry, self.clock)
        elif heard.entry is not entry:
            heard.entry.rreq_c -= 1
            entry.rreq_c += 1

    def record_overheard_forward(self, neighbor: int, request: Optional[Hashable] = None) -> None:
        handed = None
        if request is not None:
            handed = self._handed.get(neighbor, {}).pop(request, None)
        target = handed.entry if handed is not None else self.entry(neighbor)
        target.rreq_c += 1
        if request is not None and handed is None:
            self._heard.setdefault(neighbor, {})[request] = _Mark(self.epoch, target, self.clock)

    def counts(self, neighbor: int) -> Tuple[int, int]:
        found = self.entries.get(neighbor)
        if found is None:
            return (0, 0)
        return (found.rreq_t, found.rreq_c)

    def unsettled(self, neighbor: int) -> int:
        """Current-epoch deliveries to neighbor still inside the settle window."""
        if self.settle_ms <= 0:
            return 0
        return sum(
            1
            for mark in self._handed.get(neighbor, {}).values()
            if mark.epoch == self.epoch and self.clock - mark.at <= self.settle_ms
        )

    def settled_counts(self, neighbor: int) -> Tuple[int, int]:
        rreq_t, rreq_c = self.counts(neighbor)
        return (rreq_t - self.unsettled(neighbor), rreq_c)

    def trust_score(self, neighbor: int) -> int:
        rreq_t, rreq_c = self.counts(neighbor)
        return rreq_t - rreq_c

    def classify(self, neighbor: int) -> TrustLevel:
        return classify_counts(*self.settled_counts(neighbor))

    def periodic_refresh(self) -> None:
        """Close the current epoch: keep its counters in history, then reset."""
        closing = self.epoch
        if self.entries:
            self._closed.append((closing, self.entries))
        self.entries = {}
        self.epoch += 1
        self._forget_before(closing)

    def _forget_before(self, epoch: int) -> None:
        for marks in (self._handed, self._heard):
            for neighbor in list(marks):
                kept = {key: mark for key, mark in marks[neighbor].items() if mark.epoch >= epoch}
                if kept:
                    marks[neighbor] = kept
                else:
                    del marks[neighbor]

    def roll(self, now: int, epoch_ms: int) -> None:
        """
        Bring the table to the epoch containing `now`.

        Equivalent to a refresh timer firing every epoch_ms; empty epochs are
        skipped in one step.
        """
        self.clock = max(self.clock, now)
        target = now // epoch_ms
        if target <= self.epoch:
            return
        self.periodic_refresh()
        self.epoch = target

    @property
    def history(self) -> List[Tuple[int, Dict[int, Tuple[int, int]]]]:
        """Closed epochs as (epoch, {neighbor: (rreq_t, rreq_c)})."""
        return [(epoch, _counts_of(entries)) for epoch, entries in self._closed]

    def classify_at(self, epoch: int, neighbor: int) -> TrustLevel:
        """Classification of neighbor in a past or the current epoch."""
        if epoch == self.epoch:
            return self.classify(neighbor)
        for closed_epoch, entries in self._closed:
            if closed_epoch == epoch:
                found = entries.get(neighbor)
                return classify_counts(found.rreq_t, found.rreq_c) if found else TrustLevel.HIGH
        return TrustLevel.HIGH

    def as_counts(self) -> Dict[int, Tuple[int, int]]:
        return _counts_of(self.entries)

    def rows(self) -> Tuple[Tuple[int, int, int], ...]:
        """Current entries as (neighbor, rreq_t, rreq_c), sorted by neighbor."""
        return tuple((n, t, c) for n, (t, c) in self.as_counts().items())

    def dump_rows(self, include_current: bool = True) -> List[dict]:
        """History plus current epoch as owner/neighbor/rreq_t/rreq_c/epoch rows."""
        epochs = self.history
        if include_current and self.entries:
            epochs.append((self.epoch, self.as_counts()))
        return [
            {
                "owner": self.owner,
                "neighbor": neighbor,
                "rreq_t": rreq_t,
                "rreq_c": rreq_c,
                "epoch": epoch,
            }
            for epoch, counts in epochs
            for neighbor, (rreq_t, rreq_c) in counts.items()
        ]


class TableSnapshot:
    """Read-only view of table rows received during arbitration."""

    def __init__(self, owner: int, rows: Iterable[Tuple[int, int, int]]):
        self.owner = owner
        self._counts = {neighbor: (t, c) for neighbor, t, c in rows}

    def counts(self, neighbor: int) -> Tuple[int, int]:
        return self._counts.get(neighbor, (0, 0))

    def classify(self, neighbor: int) -> TrustLevel:
        return classify_counts(*self.counts(neighbor))


def record_delivery(table: MonitoringTable, neighbor: int) -> MonitoringTable:
    table.record_delivery(neighbor)
    return table


def record_overheard_forward(table: MonitoringTable, neighbor: int) -> MonitoringTable:
    table.record_overheard_forward(neighbor)
    return table


def trust_score(table: MonitoringTable, neighbor: int) -> int:
    return table.trust_score(neighbor)


def classify(table: MonitoringTable, neighbor: int) -> TrustLevel:
    return table.classify(neighbor)


def periodic_refresh(table: MonitoringTable) -> MonitoringTable:
    table.periodic_refresh()
    return table
