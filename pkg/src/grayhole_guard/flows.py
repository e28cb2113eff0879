"""
Flow Control

This module contains the source-side state machine of one CBR flow:
discovery with retries and backoff, trust-aware route selection, route
probing, hop challenge sessions with table arbitration, quarantine and the
bounded data queue.
"""

import logging
from collections import deque
from enum import Enum
from typing import TYPE_CHECKING, Callable, Deque, List, Optional, Tuple

from .detection import CHALLENGE_BYTES, DetectionSession, OutcomeKind
from .packets import (DataPacket, HopResponse, ProbeAck, Rrep, RreqId,
                      TableReply, TableRequest, TestBlock)
from .probing import ProbeSession, Verdict, ack_timeout
from .quarantine import is_tainted
from .routing import RouteEntry, RouteState, select_first, select_route
from .trust import TableSnapshot

if TYPE_CHECKING:
    from .network import Network
    from .node import Node

logger = logging.getLogger(__name__)


class FlowState(str, Enum):
    IDLE = "idle"
    DISCOVERING = "discovering"
    PROBING = "probing"
    DETECTING = "detecting"
    ACTIVE = "active"
    BACKOFF = "backoff"
    STOPPED = "stopped"


class FlowController:
    """One CBR flow owned by its source node."""

    def __init__(self, flow_id: int, source: int, destination: int, network: "Network", start_at: int):
        if source == destination:
            raise ValueError("A flow needs two distinct endpoints")
        self.flow_id = flow_id
        self.source = source
        self.destination = destination
        self.network = network
        self.start_at = start_at
        self.state = FlowState.IDLE
        self.queue: Deque[Tuple[int, int]] = deque()
        self.attempts = 0
        self.candidates: List[Rrep] = []
        self.route: Optional[RouteEntry] = None
        self.probe: Optional[ProbeSession] = None
        self.session: Optional[DetectionSession] = None
        self.current_rreq: Optional[RreqId] = None
        self._generation = 0
        self._next_sequence = 0

    # Plumbing
    @property
    def config(self):
        return self.network.config

    @property
    def node(self) -> "Node":
        return self.network.nodes[self.source]

    @property
    def now(self) -> int:
        return self.network.sim.now

    def _count(self, name: str, amount: int = 1) -> None:
        self.network.counters[name] += amount

    def _enter(self, state: FlowState) -> int:
        """Switch state; timers armed under an older generation become stale."""
        self.state = state
        self._generation += 1
        return self._generation

    def _guarded(self, callback: Callable[[], None]) -> Callable[[], None]:
        generation = self._generation

        def fire():
            if generation == self._generation:
                callback()

        return fire

    def start(self) -> None:
        self.network.sim.call_at(self.start_at, self._begin, f"flow-{self.flow_id}-start")

    def _begin(self) -> None:
        self._generate()
        self.discover()

    # Traffic
    @property
    def interval_ms(self) -> float:
        return 1000.0 / self.config.traffic.rate_pps

    def _generate(self) -> None:
        sequence = self._next_sequence
        self._next_sequence += 1
        self.network.stats.record_sent()
        if self.state == FlowState.ACTIVE:
            self._transmit(sequence, self.now)
        elif len(self.queue) < self.config.traffic.queue_limit:
            self.queue.append((sequence, self.now))
        else:
            self._count("queue_overflow")

        following = self.start_at + int(round(self._next_sequence * self.interval_ms))
        if following < self.network.end_time:
            self.network.sim.call_at(following, self._generate, "cbr")

    def _transmit(self, sequence: int, created_at: int) -> None:
        packet = DataPacket(
            flow_id=self.flow_id,
            sequence=sequence,
            route=self.route.path,
            created_at=created_at,
            size=self.config.packet_size,
        )
        self._count("data_forwarded")
        self.node.send_data(packet)

    def _flush(self) -> None:
        while self.queue and self.state == FlowState.ACTIVE:
            sequence, created_at = self.queue.popleft()
            self._transmit(sequence, created_at)

    def _drop_queue(self) -> None:
        if self.queue:
            self._count("dropped_no_route", len(self.queue))
            self.queue.clear()

    # Discovery
    def discover(self) -> None:
        if self.destination in self.node.blacklist or self.source in self.node.blacklist:
            self._enter(FlowState.STOPPED)
            self._drop_queue()
            return
        self._enter(FlowState.DISCOVERING)
        self.candidates = []
        self.route = None
        rreq = self.node.originate_rreq(self.destination)
        self.current_rreq = rreq.rreq_id
        self.network.discoveries[rreq.rreq_id] = self
        self._count("discoveries")
        self.network.sim.call_later(
            self.config.rrep_wait_ms, self._guarded(self._close_window), "rrep-window"
        )

    def on_rrep(self, rrep: Rrep) -> None:
        if self.state != FlowState.DISCOVERING or rrep.rreq_id != self.current_rreq:
            self._count("rrep_late")
            return
        if is_tainted(rrep.route, self.node.blacklist):
            return
        if self.config.defense:
            self.candidates.append(rrep)
        else:
            self._activate(select_first([rrep]))

    def _close_window(self) -> None:
        usable = [r for r in self.candidates if not is_tainted(r.route, self.node.blacklist)]
        if not usable:
            self._retry()
            return
        self.route = select_route(self.source, usable)
        self._count("routes_selected")
        self._start_probe()

    def _retry(self) -> None:
        self.attempts += 1
        if self.attempts <= self.config.rreq_retries:
            self._count("discovery_retries")
            self.discover()
            return
        self.attempts = 0
        self._drop_queue()
        self._enter(FlowState.BACKOFF)
        self._count("discovery_backoffs")
        self.network.sim.call_later(
            self.config.discovery_backoff_ms, self._guarded(self.discover), "discovery-backoff"
        )

    def _activate(self, route: RouteEntry) -> None:
        self.route = route
        self._enter(FlowState.ACTIVE)
        self.attempts = 0
        self.node.route_table[self.destination] = route
        self._count("routes_activated")
        self._flush()

    # Phase 2
    def _start_probe(self) -> None:
        self._enter(FlowState.PROBING)
        probe_id = self.network.next_probe_id()
        self.probe = ProbeSession(probe_id, self.source, self.route.path, self.config.n_blocks)
        self.network.probes[probe_id] = self
        self._count("probes")
        self._probe_round()

    def _probe_round(self) -> None:
        round_no = self.probe.next_round()
        for block in range(1, self.probe.n_blocks + 1):
            self.node.send_downstream(
                TestBlock(self.probe.probe_id, round_no, block, self.route.path), self.route.path
            )
        self._count("test_blocks_sent", self.probe.n_blocks)
        timeout = ack_timeout(
            self.route.hops,
            self.config.per_hop_delay_ms,
            self.config.block_gather_ms,
            self.config.probe_margin_ms,
        )
        probe = self.probe
        self.network.sim.call_later(
            timeout, self._guarded(lambda: self._round_timeout(probe, round_no)), "probe-timeout"
        )

    def _awaiting(self, probe: ProbeSession, round_no: int) -> bool:
        done = 0 if probe.score is None else probe.score.rounds_done
        return (
            self.state == FlowState.PROBING
            and probe is self.probe
            and probe.round_no == round_no
            and done < round_no
        )

    def on_ack(self, ack: ProbeAck) -> None:
        if self.probe is None or ack.probe_id != self.probe.probe_id:
            return
        if not self._awaiting(self.probe, ack.round_no):
            self._count("ack_late")
            return
        self._judge_round(ack.received_blocks)

    def _round_timeout(self, probe: ProbeSession, round_no: int) -> None:
        if self._awaiting(probe, round_no):
            self._judge_round(None)

    def _judge_round(self, received_blocks: Optional[int]) -> None:
        verdict = self.probe.record_round(received_blocks)
        self.network.recorder.probe(self.probe.log[-1])
        if verdict == Verdict.PENDING:
            self._probe_round()
            return
        if verdict == Verdict.VALID:
            self.route.transition(RouteState.TESTED_VALID)
            self._count("valid_routes")
            self._activate(self.route)
            return
        self.route.transition(RouteState.INFECTED)
        self._count("infected_routes")
        logger.info("Flow %s: route %s infected (p_bh=%s)", self.flow_id, self.route.path, self.probe.score.p_bh)
        self._start_detection()

    # Phase 3
    def _start_detection(self) -> None:
        if self.route.hops < 2:
            self._count("clean_detections")
            self._activate(self.route)
            return
        self._enter(FlowState.DETECTING)
        session_id = self.network.next_session_id()
        self.session = DetectionSession(
            session_id=session_id,
            route=self.route.path,
            challenge=self.network.challenge_rng.bytes(CHALLENGE_BYTES),
            started_at=self.now,
        )
        self.network.sessions[session_id] = self
        self._count("detection_sessions")
        self.node.send_downstream(self.session.first_packet(), self.route.path)
        self._arm_hop(self.session.hop)

    def _arm_hop(self, hop: int) -> None:
        session = self.session
        deadline = session.deadline(hop, self.config.per_hop_delay_ms, self.config.detection_margin_ms)
        self.network.sim.call_at(
            max(deadline, self.now), self._guarded(lambda: self._hop_timeout(session, hop)), "hop-deadline"
        )

    def on_hop_response(self, response: HopResponse) -> None:
        session = self.session
        if self.state != FlowState.DETECTING or session is None or response.session_id != session.session_id:
            return
        if session.outcome is not None:
            return
        before = session.hop
        session.record_response(response.responder, response.digest)
        outcome = session.advance()
        passed = list(range(before, session.hop))
        if outcome is not None and outcome.kind == OutcomeKind.CLEAN:
            passed.append(session.hop)
        table = self.node.monitoring_table()
        for hop in passed:
            table.record_delivery(session.route[hop])
            table.record_overheard_forward(session.route[hop])
        if outcome is None:
            if session.hop != before:
                self._arm_hop(session.hop)
            return
        self._settle_session()

    def _hop_timeout(self, session: DetectionSession, hop: int) -> None:
        if session is not self.session:
            return
        if session.time_out(hop) is not None:
            self._settle_session()

    def _settle_session(self) -> None:
        session = self.session
        if session.outcome.kind == OutcomeKind.CLEAN:
            self._count("clean_detections")
            self.network.recorder.detection(session.log_row())
            self._activate(self.route)
            return
        if session.convicted is not None:
            self._convict()
            return
        for node_id in session.outcome.pair:
            self._fetch_table(session, node_id)

    def _fetch_table(self, session: DetectionSession, node_id: int) -> None:
        index = session.route.index(node_id)
        self._count("table_requests")
        self.node.send_downstream(TableRequest(session.session_id, node_id, session.route), session.route)
        deadline = self.now + 2 * index * self.config.per_hop_delay_ms + self.config.detection_margin_ms
        self.network.sim.call_at(
            deadline, self._guarded(lambda: self._table_timeout(session, node_id)), "table-deadline"
        )

    def on_table_reply(self, reply: TableReply) -> None:
        session = self.session
        if self.state != FlowState.DETECTING or session is None or reply.session_id != session.session_id:
            return
        if not session.needs_tables or reply.responder not in session.outcome.pair:
            return
        session.record_table(reply.responder, TableSnapshot(reply.responder, reply.rows))
        self._maybe_arbitrate(session)

    def _table_timeout(self, session: DetectionSession, node_id: int) -> None:
        if session is not self.session or not session.needs_tables:
            return
        self._count("table_timeouts")
        session.record_table(node_id, None)
        self._maybe_arbitrate(session)

    def _maybe_arbitrate(self, session: DetectionSession) -> None:
        if session.try_arbitrate() is not None:
            self._convict()

    # Phase 4
    def _convict(self) -> None:
        session = self.session
        self.network.recorder.detection(session.log_row())
        self._count("convictions")
        self.network.broadcast_blacklist(self.source, session.convicted, session.session_id)
        if self.state == FlowState.DETECTING and self.session is session:
            self.session = None
            self.attempts = 0
            self.discover()

    def on_blacklist(self, convicted: int) -> None:
        """The source node learned of a conviction."""
        if self.state in (FlowState.IDLE, FlowState.BACKOFF, FlowState.STOPPED):
            return
        if self.state == FlowState.DISCOVERING:
            self.candidates = [r for r in self.candidates if convicted not in r.route]
            return
        if self.route is None or not self.route.contains(convicted):
            return
        self.route.transition(RouteState.PURGED)
        self._count("routes_purged")
        if self.session is not None and self.session.convicted is None:
            self.network.recorder.detection(self.session.log_row())
        self.session = None
        self.probe = None
        self.attempts = 0
        self.discover()
