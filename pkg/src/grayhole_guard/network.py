"""
Simulated Network

This module contains the Network that wires the event kernel, the radio,
the nodes and the flows of one run together, and routes packets that reach
a flow's source to the owning flow controller.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx

from .adversary import NodeBehavior
from .exceptions import SimulationError, UnknownNodeError
from .flows import FlowController
from .kernel import (STREAM_CHALLENGE, STREAM_NODE, STREAM_RADIO, Delivery,
                     Event, RandomStreams, Radio, Simulator, Topology)
from .metrics import TrafficStats
from .node import Node
from .packets import (BlacklistMsg, DataPacket, HopResponse, ProbeAck, Rrep,
                      RreqId, TableReply)
from .recorders import RunRecorder
from .schemas import ScenarioConfig
from .trust import TrustLevel

logger = logging.getLogger(__name__)


def unit_disk_graph(topology: Topology) -> nx.Graph:
    """networkx view of the neighbor relation."""
    graph = nx.Graph()
    graph.add_nodes_from(topology.ids)
    for node_id in topology.ids:
        graph.add_edges_from((node_id, other) for other in topology.neighbors(node_id) if other > node_id)
    return graph


@dataclass
class RunResult:
    """Raw outcome of one simulation, before scoring."""

    convicted: Dict[int, int]
    endpoints: List[int]
    stats: TrafficStats
    counters: Dict[str, int] = field(default_factory=dict)


class Network:
    """All nodes and flows of one simulation instance."""

    def __init__(
        self,
        topology: Topology,
        behaviors: Dict[int, NodeBehavior],
        flows: Iterable[Tuple[int, int]],
        config: ScenarioConfig,
        recorder: Optional[RunRecorder] = None,
        flow_starts: Optional[List[int]] = None,
    ):
        self.topology = topology
        self.config = config
        self.recorder = recorder or RunRecorder()
        self.sim = Simulator(handler=self._dispatch)
        self.streams = RandomStreams(config.seed)
        self.radio = Radio(
            self.sim,
            topology,
            per_hop_delay=config.per_hop_delay_ms,
            loss_prob=config.link_loss,
            rng=self.streams.stream(STREAM_RADIO),
        )
        self.challenge_rng = self.streams.stream(STREAM_CHALLENGE)
        self.end_time = config.sim_time_ms
        self.counters: Counter = Counter()
        self.stats = TrafficStats()
        self.convicted: Dict[int, int] = {}
        self._started = False

        self.nodes: Dict[int, Node] = {
            node_id: Node(
                node_id,
                behaviors.get(node_id, NodeBehavior.honest()),
                self,
                self.streams.stream(STREAM_NODE, node_id),
            )
            for node_id in topology.ids
        }

        self.discoveries: Dict[RreqId, FlowController] = {}
        self.probes: Dict[int, FlowController] = {}
        self.sessions: Dict[int, FlowController] = {}
        self._probe_ids = itertools.count(1)
        self._session_ids = itertools.count(1)

        self.flows: List[FlowController] = []
        self.flows_by_source: Dict[int, List[FlowController]] = {}
        flows = list(flows)
        starts = flow_starts or [0] * len(flows)
        for flow_id, ((source, destination), start_at) in enumerate(zip(flows, starts)):
            for endpoint in (source, destination):
                if endpoint not in topology:
                    raise UnknownNodeError(endpoint)
            controller = FlowController(flow_id, source, destination, self, start_at)
            self.flows.append(controller)
            self.flows_by_source.setdefault(source, []).append(controller)

    @property
    def endpoints(self) -> List[int]:
        return sorted({f.source for f in self.flows} | {f.destination for f in self.flows})

    def next_probe_id(self) -> int:
        return next(self._probe_ids)

    def next_session_id(self) -> int:
        return next(self._session_ids)

    # Event dispatch
    def _dispatch(self, event: Event) -> None:
        delivery = event.payload
        if not isinstance(delivery, Delivery):
            raise SimulationError(f"Unexpected event payload {delivery!r}")
        self.recorder.delivery(event.fire_time, delivery.sender, event.target, delivery.packet)
        self.nodes[event.target].receive(delivery.sender, delivery.packet)

    # Source-side hand-off
    def rrep_arrived(self, origin: int, rrep: Rrep) -> None:
        flow = self.discoveries.get(rrep.rreq_id)
        if flow is not None and flow.source == origin:
            flow.on_rrep(rrep)

    def ack_arrived(self, origin: int, ack: ProbeAck) -> None:
        flow = self.probes.get(ack.probe_id)
        if flow is not None and flow.source == origin:
            flow.on_ack(ack)

    def hop_response_arrived(self, origin: int, response: HopResponse) -> None:
        flow = self.sessions.get(response.session_id)
        if flow is not None and flow.source == origin:
            flow.on_hop_response(response)

    def table_reply_arrived(self, origin: int, reply: TableReply) -> None:
        flow = self.sessions.get(reply.session_id)
        if flow is not None and flow.source == origin:
            flow.on_table_reply(reply)

    def data_delivered(self, packet: DataPacket) -> None:
        self.stats.record_delivery(self.sim.now - packet.created_at)

    # Quarantine
    def broadcast_blacklist(self, issuer: int, convicted: int, session_id: int = 0) -> None:
        """Flood a conviction from issuer; every reachable node blacklists convicted."""
        if convicted == issuer:
            raise SimulationError(f"Node {issuer} tried to convict itself")
        if convicted not in self.convicted:
            self.convicted[convicted] = self.sim.now
            self.recorder.conviction(self.sim.now, issuer, convicted)
            logger.info("t=%d ms: node %s quarantines node %s", self.sim.now, issuer, convicted)
        node = self.nodes[issuer]
        if node.accept_blacklist(convicted):
            node.flood_blacklist(BlacklistMsg(convicted, issuer, session_id))

    def node_blacklisted(self, node_id: int, convicted: int) -> None:
        for flow in self.flows_by_source.get(node_id, []):
            flow.on_blacklist(convicted)

    # Views
    def trust_table(self) -> Dict[int, TrustLevel]:
        """Low for a node any neighbor currently classifies Low, else High."""
        levels = {}
        for node_id in self.topology.ids:
            low = any(
                self.nodes[other].monitoring_table().classify(node_id) == TrustLevel.LOW
                for other in self.topology.sorted_neighbors(node_id)
            )
            levels[node_id] = TrustLevel.LOW if low else TrustLevel.HIGH
        return levels

    def table_dump(self) -> List[dict]:
        rows = []
        for node_id in sorted(self.nodes):
            rows.extend(self.nodes[node_id].monitoring_table().dump_rows())
        return rows

    def blacklists_consistent(self, component: Iterable[int]) -> bool:
        sets = {tuple(self.nodes[i].blacklist.ids) for i in component}
        return len(sets) <= 1

    # Running
    def start(self) -> None:
        if self._started:
            return
        self._started = True
        for flow in self.flows:
            flow.start()

    def run(self, until: Optional[int] = None) -> RunResult:
        """Start the flows if needed and run to `until` (default: end of run)."""
        self.start()
        self.sim.run_until(self.end_time if until is None else until)
        return self.result()

    def result(self) -> RunResult:
        counters = dict(sorted(self.counters.items()))
        counters["data_sent"] = self.stats.data_sent
        counters["data_delivered"] = self.stats.data_delivered
        counters["events"] = self.sim.dispatched
        return RunResult(
            convicted=dict(self.convicted),
            endpoints=self.endpoints,
            stats=self.stats,
            counters=counters,
        )
