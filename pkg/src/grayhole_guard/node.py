"""
Node Packet Handling

This module contains the per-node protocol logic: RREQ flooding with
monitoring-table accounting, RREP return with trust annotation, data and
test-block relaying, Phase 3 control handling and blacklist flooding.

Honest and attacker nodes share these handlers; attacker decisions come from
the adversary module, selected by the node's own behavior.
"""

import itertools
import logging
from collections import Counter, defaultdict
from typing import TYPE_CHECKING, Dict, List, Optional, Set, Tuple

import numpy as np

from .adversary import (NodeBehavior, attacker_handle_control,
                        attacker_handle_data, attacker_handle_rreq,
                        attacker_handle_rreq_forwarding, relays_control,
                        supplies_table)
from .packets import (BlacklistMsg, ControlPacket, DataPacket, HopResponse,
                      Path, ProbeAck, Rrep, Rreq, RreqId, TableReply,
                      TableRequest, TestBlock, next_hop, previous_hop)
from .quarantine import Blacklist, apply_blacklist, is_tainted
from .routing import RouteEntry, RouteState, best_destination_route
from .trust import MonitoringTable, TrustLevel

if TYPE_CHECKING:
    from .network import Network

logger = logging.getLogger(__name__)


class Node:
    """One simulated node."""

    def __init__(
        self,
        node_id: int,
        behavior: NodeBehavior,
        network: "Network",
        rng: np.random.Generator,
    ):
        self.id = node_id
        self.behavior = behavior
        self.network = network
        self.rng = rng
        self.table = MonitoringTable(node_id, settle_ms=2 * network.config.per_hop_delay_ms)
        self.blacklist = Blacklist(node_id)
        self.route_table: Dict[int, RouteEntry] = {}
        self.seen: Set[RreqId] = set()
        self.forwarded_rreqs: Counter = Counter()
        self.forwarded_blocks: Counter = Counter()
        self._sequence = itertools.count(1)
        self._copies: Dict[RreqId, List[Path]] = {}
        self._replied: Set[RreqId] = set()
        self._blocks: Dict[Tuple[int, int], int] = defaultdict(int)
        self._handlers = {
            Rreq: self._on_rreq,
            Rrep: self._on_rrep,
            DataPacket: self._on_data,
            TestBlock: self._on_test_block,
            ProbeAck: self._on_probe_ack,
            ControlPacket: self._on_control,
            HopResponse: self._on_hop_response,
            TableRequest: self._on_table_request,
            TableReply: self._on_table_reply,
            BlacklistMsg: self._on_blacklist,
        }

    # Plumbing
    @property
    def config(self):
        return self.network.config

    @property
    def now(self) -> int:
        return self.network.sim.now

    def receive(self, sender: int, packet) -> None:
        self._handlers[type(packet)](sender, packet)

    def monitoring_table(self) -> MonitoringTable:
        """Own table brought to the current epoch."""
        self.table.roll(self.now, self.config.epoch_ms)
        return self.table

    def _count(self, name: str, amount: int = 1) -> None:
        self.network.counters[name] += amount

    def _unicast(self, receiver: Optional[int], packet) -> bool:
        if receiver is None:
            return False
        if receiver in self.blacklist:
            self._count("dropped_blacklisted_hop")
            return False
        if not self.network.radio.unicast(self.id, receiver, packet):
            self._count("link_failures")
            return False
        return True

    def send_upstream(self, packet, route: Path) -> bool:
        return self._unicast(previous_hop(route, self.id), packet)

    def send_downstream(self, packet, route: Path) -> bool:
        return self._unicast(next_hop(route, self.id), packet)

    # Route discovery
    def originate_rreq(self, destination: int) -> Rreq:
        """Start a discovery flood towards destination."""
        if destination == self.id:
            raise ValueError(f"Node {self.id} cannot discover a route to itself")
        if destination in self.blacklist:
            raise ValueError(f"Destination {destination} is blacklisted at node {self.id}")
        rreq = Rreq(self.id, next(self._sequence), destination, (self.id,))
        self.seen.add(rreq.rreq_id)
        self._broadcast_rreq(rreq)
        self._count("rreq_originated")
        return rreq

    def _broadcast_rreq(self, rreq: Rreq) -> None:
        table = self.monitoring_table()
        for neighbor in self.network.topology.sorted_neighbors(self.id):
            if (
                neighbor in rreq.source_route
                or neighbor == rreq.destination
                or neighbor in self.blacklist
            ):
                continue
            table.record_delivery(neighbor, rreq.rreq_id)
        self.network.radio.broadcast(self.id, rreq)
        self.forwarded_rreqs[rreq.rreq_id] += 1
        self._count("rreq_sent")

    def _on_rreq(self, sender: int, rreq: Rreq) -> None:
        table = self.monitoring_table()
        for node_id in rreq.source_route:
            table.insert(node_id)
        table.record_overheard_forward(sender, rreq.rreq_id)

        if rreq.destination == self.id:
            self._collect_copy(rreq)
            return
        if self.id in rreq.source_route or rreq.rreq_id in self.seen:
            self._count("rreq_duplicates")
            return
        self.seen.add(rreq.rreq_id)
        if is_tainted(rreq.source_route, self.blacklist):
            self._count("rreq_tainted_dropped")
            return

        if self.behavior.malicious:
            fake = attacker_handle_rreq(self.behavior, self.id, rreq)
            if fake is not None:
                self._count("fake_rreps")
                self.send_upstream(fake, fake.route)
            if attacker_handle_rreq_forwarding(self.behavior, self.rng):
                self._broadcast_rreq(rreq.extend(self.id))
            else:
                self._count("rreq_dropped_by_attacker")
            return

        cached = self._cached_route(rreq)
        if cached is not None:
            reply = Rrep(rreq.rreq_id, self.id, rreq.source_route + cached.path)
            self._count("intermediate_rreps")
            self.send_upstream(reply, reply.route)
        self._broadcast_rreq(rreq.extend(self.id))

    def _cached_route(self, rreq: Rreq) -> Optional[RouteEntry]:
        entry = self.route_table.get(rreq.destination)
        if entry is None or entry.state != RouteState.TESTED_VALID:
            return None
        if set(entry.path[1:]) & set(rreq.source_route):
            return None
        if is_tainted(entry.path, self.blacklist):
            return None
        return entry

    def _collect_copy(self, rreq: Rreq) -> None:
        """Destination side: gather request copies, then answer once."""
        if rreq.rreq_id in self._replied or self.id in rreq.source_route:
            return
        if is_tainted(rreq.source_route, self.blacklist):
            self._count("rreq_tainted_dropped")
            return
        path = rreq.source_route + (self.id,)
        copies = self._copies.get(rreq.rreq_id)
        if copies is not None:
            if self.config.defense:
                copies.append(path)
            return
        self._copies[rreq.rreq_id] = [path]
        wait = self.config.dest_reply_window_ms if self.config.defense else self.config.reply_processing_ms
        self.network.sim.call_later(
            wait, lambda: self._reply_as_destination(rreq.rreq_id), "destination-reply"
        )

    def low_hops(self, path: Path) -> int:
        """Nodes on path that this node's own table classifies Low."""
        table = self.monitoring_table()
        return sum(1 for node_id in path if node_id != self.id and table.classify(node_id) == TrustLevel.LOW)

    def _reply_as_destination(self, rreq_id: RreqId) -> None:
        copies = self._copies.pop(rreq_id, [])
        self._replied.add(rreq_id)
        copies = [path for path in copies if not is_tainted(path, self.blacklist)]
        best = best_destination_route(copies, self.low_hops)
        if best is None:
            return
        self._count("rrep_sent")
        self.send_upstream(Rrep(rreq_id, self.id, best), best)

    def _on_rrep(self, sender: int, rrep: Rrep) -> None:
        if self.id not in rrep.route:
            return
        if is_tainted(rrep.route, self.blacklist):
            self._count("rrep_tainted_dropped")
            return
        annotated = rrep.annotate(self.monitoring_table().classify(sender).value)
        if rrep.route[0] == self.id:
            self._count("rrep_received")
            self.network.rrep_arrived(self.id, annotated.stamped(self.now))
            return
        self.send_upstream(annotated, annotated.route)

    # Data plane
    def _relay_payload(self, packet) -> bool:
        if is_tainted(packet.route, self.blacklist):
            self._count("dropped_tainted_route")
            return False
        if attacker_handle_data(self.behavior, self.rng):
            self._count("dropped_by_attacker")
            return False
        return self.send_downstream(packet, packet.route)

    def send_data(self, packet: DataPacket) -> bool:
        """Source side: put a data packet on its route."""
        return self.send_downstream(packet, packet.route)

    def _on_data(self, sender: int, packet: DataPacket) -> None:
        if self.id not in packet.route:
            return
        if packet.route[-1] == self.id:
            self.network.data_delivered(packet)
            return
        self._relay_payload(packet)

    def _on_test_block(self, sender: int, block: TestBlock) -> None:
        if self.id not in block.route:
            return
        if block.route[-1] != self.id:
            if self._relay_payload(block):
                self.forwarded_blocks[block.probe_id] += 1
            return
        key = (block.probe_id, block.round_no)
        self._blocks[key] += 1
        if self._blocks[key] == 1:
            self.network.sim.call_later(
                self.config.block_gather_ms,
                lambda: self._acknowledge(block.probe_id, block.round_no, block.route),
                "probe-ack",
            )

    def _acknowledge(self, probe_id: int, round_no: int, route: Path) -> None:
        received = self._blocks.pop((probe_id, round_no), 0)
        self.send_upstream(ProbeAck(probe_id, round_no, received, route), route)

    def _on_probe_ack(self, sender: int, ack: ProbeAck) -> None:
        if self.id not in ack.route or is_tainted(ack.route, self.blacklist):
            return
        if ack.route[0] == self.id:
            self.network.ack_arrived(self.id, ack)
            return
        self.send_upstream(ack, ack.route)

    # Phase 3 control traffic
    def _on_control(self, sender: int, packet: ControlPacket) -> None:
        if packet.id_next != self.id or is_tainted(packet.route, self.blacklist):
            return
        action = attacker_handle_control(self.behavior, packet, self.rng)
        if action.digest is not None:
            self.send_upstream(
                HopResponse(packet.session_id, self.id, action.digest, packet.route), packet.route
            )
        else:
            self._count("control_unanswered")
        following = next_hop(packet.route, self.id)
        if action.forward and following is not None:
            relayed = ControlPacket(
                session_id=packet.session_id,
                node_id=self.id,
                id_next=following,
                challenge=packet.challenge,
                digest_field=packet.digest_field,
                route=packet.route,
            )
            self._unicast(following, relayed)

    def _on_hop_response(self, sender: int, response: HopResponse) -> None:
        if self.id not in response.route:
            return
        if response.route[0] == self.id:
            self.network.hop_response_arrived(self.id, response)
            return
        if not relays_control(self.behavior, response.responder):
            self._count("control_suppressed")
            return
        self.send_upstream(response, response.route)

    def _on_table_request(self, sender: int, request: TableRequest) -> None:
        if self.id not in request.route:
            return
        if request.target != self.id:
            if relays_control(self.behavior, None):
                self._unicast(next_hop(request.route, self.id), request)
            else:
                self._count("control_suppressed")
            return
        if not supplies_table(self.behavior):
            self._count("table_refused")
            return
        reply = TableReply(request.session_id, self.id, self.monitoring_table().rows(), request.route)
        self.send_upstream(reply, request.route)

    def _on_table_reply(self, sender: int, reply: TableReply) -> None:
        if self.id not in reply.route:
            return
        if reply.route[0] == self.id:
            self.network.table_reply_arrived(self.id, reply)
            return
        if not relays_control(self.behavior, reply.responder):
            self._count("control_suppressed")
            return
        self.send_upstream(reply, reply.route)

    # Quarantine
    def accept_blacklist(self, convicted: int) -> bool:
        """Record a conviction and purge routing state; False if already known."""
        if not self.blacklist.add(convicted):
            return False
        apply_blacklist(self.route_table.values(), convicted)
        for destination in [d for d, e in self.route_table.items() if e.state == RouteState.PURGED]:
            del self.route_table[destination]
        self.network.node_blacklisted(self.id, convicted)
        return True

    def flood_blacklist(self, message: BlacklistMsg) -> None:
        if self.id != message.convicted:
            self.network.radio.broadcast(self.id, message)
            self._count("blacklist_messages")

    def _on_blacklist(self, sender: int, message: BlacklistMsg) -> None:
        if self.accept_blacklist(message.convicted):
            self.flood_blacklist(message)
