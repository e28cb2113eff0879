"""
Simulation Kernel

This module contains the deterministic discrete-event engine, the seeded
random streams, uniform node placement and the unit-disk radio on which all
protocol modules run.
"""

import heapq
import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Set, Tuple

import numpy as np

from .exceptions import SchedulingError, UnknownNodeError

logger = logging.getLogger(__name__)

# Spawn keys for the independent random substreams of one run.
STREAM_ROLES = 1
STREAM_RADIO = 2
STREAM_TRAFFIC = 3
STREAM_CHALLENGE = 4
STREAM_NODE = 5


@dataclass
class SimClock:
    """Simulated time in integer milliseconds."""

    now: int = 0


@dataclass(order=True)
class Event:
    """A scheduled protocol action, ordered by (fire_time, sequence)."""

    fire_time: int
    sequence: int
    target: Optional[int] = field(default=None, compare=False)
    payload: Any = field(default=None, compare=False)


@dataclass(frozen=True)
class Delivery:
    """Radio delivery of a packet from sender to the event target."""

    sender: int
    packet: Any


@dataclass(frozen=True)
class Timer:
    """A callback fired at the event time."""

    callback: Callable[[], None]
    label: str = "timer"


class Simulator:
    """Single-threaded event loop with a deterministic total order."""

    def __init__(self, handler: Optional[Callable[[Event], None]] = None):
        self.clock = SimClock()
        self.handler = handler
        self._queue: List[Event] = []
        self._sequence = itertools.count(1)
        self.dispatched = 0

    @property
    def now(self) -> int:
        return self.clock.now

    def schedule(self, fire_time: int, target: Optional[int] = None, payload: Any = None) -> int:
        """
        Queue an event and return its id (the sequence number).

        Raises:
            SchedulingError: if fire_time lies before the current time
        """
        if fire_time < self.clock.now:
            raise SchedulingError(
                f"Cannot schedule at t={fire_time} ms, clock is at t={self.clock.now} ms"
            )
        event = Event(int(fire_time), next(self._sequence), target, payload)
        heapq.heappush(self._queue, event)
        return event.sequence

    def call_at(self, fire_time: int, callback: Callable[[], None], label: str = "timer") -> int:
        """Schedule a timer callback."""
        return self.schedule(fire_time, None, Timer(callback, label))

    def call_later(self, delay: int, callback: Callable[[], None], label: str = "timer") -> int:
        """Schedule a timer callback relative to now."""
        return self.call_at(self.clock.now + int(delay), callback, label)

    def pending(self) -> int:
        return len(self._queue)

    def run_until(self, t_end: int) -> int:
        """
        Dispatch every event with fire_time <= t_end.

        Returns:
            Number of events dispatched by this call
        """
        if t_end < self.clock.now:
            raise SchedulingError(f"run_until({t_end}) is before now={self.clock.now}")

        count = 0
        last_fire: Optional[int] = None
        while self._queue and self._queue[0].fire_time <= t_end:
            event = heapq.heappop(self._queue)
            self.clock.now = event.fire_time
            last_fire = event.fire_time
            self._dispatch(event)
            count += 1

        self.clock.now = t_end if last_fire is None else min(t_end, last_fire)
        self.dispatched += count
        return count

    def _dispatch(self, event: Event) -> None:
        if isinstance(event.payload, Timer):
            event.payload.callback()
        elif self.handler is not None:
            self.handler(event)


class RandomStreams:
    """Named, independent numpy generators derived from one run seed."""

    def __init__(self, seed: int):
        self.seed = int(seed)

    def stream(self, kind: int, key: int = 0) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=(int(kind), int(key)))
        return np.random.default_rng(sequence)


class Topology:
    """Static node positions with a boundary-inclusive unit-disk neighbor relation."""

    def __init__(
        self,
        positions: Dict[int, Tuple[float, float]],
        range_m: float = 50.0,
        area: Optional[Tuple[float, float]] = None,
    ):
        if not positions:
            raise ValueError("A topology needs at least one node")
        self.ids: List[int] = list(positions)
        self._index = {node_id: i for i, node_id in enumerate(self.ids)}
        self.coords = np.array([positions[i] for i in self.ids], dtype=float)
        self.range_m = float(range_m)
        if area is None:
            area = (float(self.coords[:, 0].max()), float(self.coords[:, 1].max()))
        self.area = (float(area[0]), float(area[1]))
        self._neighbors: Dict[int, Set[int]] = {}
        self._sorted: Dict[int, List[int]] = {}

    @property
    def positions(self) -> Dict[int, Tuple[float, float]]:
        return {node_id: (float(x), float(y)) for node_id, (x, y) in zip(self.ids, self.coords)}

    def __contains__(self, node_id: int) -> bool:
        return node_id in self._index

    def __len__(self) -> int:
        return len(self.ids)

    def distance(self, a: int, b: int) -> float:
        pa = self.coords[self._row(a)]
        pb = self.coords[self._row(b)]
        return float(np.hypot(pa[0] - pb[0], pa[1] - pb[1]))

    def neighbors(self, node_id: int) -> Set[int]:
        """All other nodes within range of node_id (distance <= range)."""
        cached = self._neighbors.get(node_id)
        if cached is not None:
            return cached
        row = self._row(node_id)
        delta = self.coords - self.coords[row]
        dist = np.hypot(delta[:, 0], delta[:, 1])
        found = {self.ids[i] for i in np.nonzero(dist <= self.range_m)[0] if i != row}
        self._neighbors[node_id] = found
        return found

    def sorted_neighbors(self, node_id: int) -> List[int]:
        ordered = self._sorted.get(node_id)
        if ordered is None:
            ordered = sorted(self.neighbors(node_id))
            self._sorted[node_id] = ordered
        return ordered

    def are_neighbors(self, a: int, b: int) -> bool:
        return b in self.neighbors(a)

    def _row(self, node_id: int) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None


def place_uniform(
    n: int, area: Tuple[float, float], seed: int, range_m: float = 50.0
) -> Topology:
    """Place n nodes i.i.d. uniformly over the area; ids are 0..n-1."""
    width, height = area
    if n < 1 or width <= 0 or height <= 0:
        raise ValueError("place_uniform needs n >= 1 and a positive area")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, width, size=n)
    ys = rng.uniform(0.0, height, size=n)
    positions = {i: (float(xs[i]), float(ys[i])) for i in range(n)}
    return Topology(positions, range_m=range_m, area=(width, height))


def neighbors(topology: Topology, x: int) -> Set[int]:
    """Neighbor set of x in the topology."""
    return topology.neighbors(x)


class Radio:
    """Ideal broadcast MAC with a fixed per-hop delay and optional link loss."""

    def __init__(
        self,
        simulator: Simulator,
        topology: Topology,
        per_hop_delay: int = 2,
        loss_prob: float = 0.0,
        rng: Optional[np.random.Generator] = None,
    ):
        self.simulator = simulator
        self.topology = topology
        self.per_hop_delay = int(per_hop_delay)
        self.loss_prob = float(loss_prob)
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def _lost(self) -> bool:
        if self.loss_prob <= 0.0:
            return False
        if self.loss_prob >= 1.0:
            return True
        return bool(self.rng.random() < self.loss_prob)

    def broadcast(self, sender: int, packet: Any) -> List[int]:
        """
        Deliver packet to every neighbor of sender after one hop delay.

        Returns:
            Ids of the neighbors a delivery was scheduled for
        """
        if sender not in self.topology:
            raise UnknownNodeError(sender)
        fire_time = self.simulator.now + self.per_hop_delay
        delivered = []
        for receiver in self.topology.sorted_neighbors(sender):
            if self._lost():
                continue
            self.simulator.schedule(fire_time, receiver, Delivery(sender, packet))
            delivered.append(receiver)
        return delivered

    def unicast(self, sender: int, receiver: int, packet: Any) -> bool:
        """Deliver packet to a single neighbor; False if not in range or lost."""
        if not self.topology.are_neighbors(sender, receiver):
            return False
        if self._lost():
            return False
        self.simulator.schedule(
            self.simulator.now + self.per_hop_delay, receiver, Delivery(sender, packet)
        )
        return True


def broadcast(radio: Radio, sender: int, packet: Any) -> List[int]:
    """Broadcast through a radio; module-level form of Radio.broadcast."""
    return radio.broadcast(sender, packet)

