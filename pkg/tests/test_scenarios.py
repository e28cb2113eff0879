"""
End-to-End Scenario Tests

Scripted layouts with known outcomes, determinism and soundness of the
defense on small random networks.
"""

import networkx as nx
import numpy as np
import pytest

from src.grayhole_guard.adversary import ControlReaction
from src.grayhole_guard.flows import FlowState
from src.grayhole_guard.kernel import Topology
from src.grayhole_guard.layouts import (ScriptedLayout, always_drop,
                                        chain_layout,
                                        cooperative_attack_layout,
                                        simple_attack_layout,
                                        suspicious_node_layout)
from src.grayhole_guard.network import Network, unit_disk_graph
from src.grayhole_guard.recorders import RunRecorder
from src.grayhole_guard.routing import is_connected_path
from src.grayhole_guard.schemas import AttackerConfig
from src.grayhole_guard.services import ExperimentService
from src.grayhole_guard.trust import TrustLevel


class TestSuspiciousNodeLayout:
    """Source 5, destination 9, gray hole 3 as the only way through."""

    def test_monitoring_state_after_discovery(self, build_layout_network):
        network = build_layout_network(suspicious_node_layout(), epoch_ms=1_000_000)
        network.run(until=150)

        assert network.nodes[4].monitoring_table().rows() == ((3, 1, 0), (5, 0, 0), (8, 0, 1))
        levels = network.trust_table()
        assert levels[3] == TrustLevel.LOW
        assert all(level == TrustLevel.HIGH for node_id, level in levels.items() if node_id != 3)

    def test_gray_hole_is_convicted_by_arbitration(self, build_layout_network):
        network = build_layout_network(suspicious_node_layout())
        result = network.run()

        assert set(result.convicted) == {3}
        assert result.stats.data_delivered == 0
        assert all(3 in network.nodes[i].blacklist for i in (1, 4, 5, 8))

        detection = network.recorder.detection_rows
        assert detection[0]["route"] == "5-8-4-3-9"
        assert detection[0]["outcome"] == "malicious(3) via y-refused"
        probes = [row for row in network.recorder.probe_rows if row["probe_id"] == 1]
        assert [row["p_bh"] for row in probes] == [100, 120, 140]
        assert probes[-1]["verdict"] == "infected"

    def test_quarantine_log_names_the_source(self, build_layout_network):
        network = build_layout_network(suspicious_node_layout())
        network.run()

        assert [(row["issuer"], row["convicted"]) for row in network.recorder.quarantine_rows] == [(5, 3)]

    def test_test_blocks_stop_at_the_gray_hole(self, build_layout_network):
        network = build_layout_network(suspicious_node_layout())
        network.run()

        relayed = 3 * network.config.n_blocks
        assert network.nodes[8].forwarded_blocks[1] == relayed
        assert network.nodes[4].forwarded_blocks[1] == relayed
        assert network.nodes[3].forwarded_blocks[1] == 0


class TestSimpleAttackLayout:
    def test_fast_fake_reply_is_tested_and_its_sender_convicted(self, build_layout_network):
        network = build_layout_network(simple_attack_layout())
        result = network.run()

        first = network.recorder.probe_rows[0]
        assert first["route"] == "0-1-2"
        assert network.recorder.detection_rows[0]["outcome"] == "malicious(1) via source-upstream"
        assert set(result.convicted) == {1}

        flow = network.flows[0]
        assert flow.state == FlowState.ACTIVE
        assert flow.route.path == (0, 3, 4, 2)
        assert result.stats.data_delivered > 0

    def test_plain_aodv_takes_the_fake_reply(self, build_layout_network):
        network = build_layout_network(simple_attack_layout(), defense=False)
        result = network.run()

        assert network.flows[0].route.path == (0, 1, 2)
        assert result.convicted == {}
        assert result.stats.data_sent > 0
        assert result.stats.data_delivered == 0


class TestCooperativeAttackLayout:
    @pytest.mark.parametrize("seed", range(100))
    def test_only_colluders_are_convicted(self, build_layout_network, seed):
        network = build_layout_network(cooperative_attack_layout(), seed=seed, sim_time_s=2.0)
        result = network.run()

        assert result.convicted
        assert set(result.convicted) <= {2, 3}


def _random_chain(seed):
    rng = np.random.default_rng(seed)
    length = int(rng.integers(3, 7))
    attacker_index = int(rng.integers(1, length - 1))
    spare = 8 - length
    leaf_count = int(rng.integers(0, min(spare, length) + 1))
    leaves = sorted(int(i) for i in rng.choice(length, size=leaf_count, replace=False))
    return chain_layout(length, attacker_index, leaves), attacker_index


def _first_silent_hop(path, trace_rows):
    """First path node that received test blocks but never passed any on."""
    receivers = {row["to"] for row in trace_rows if row["type"] == "TEST"}
    senders = {row["from"] for row in trace_rows if row["type"] == "TEST"}
    for node_id in path:
        if node_id in receivers and node_id not in senders:
            return node_id
    return None


@pytest.mark.parametrize("seed", range(100))
def test_chain_conviction_matches_the_trace(build_layout_network, seed):
    layout, attacker_index = _random_chain(seed)
    assert len(layout.positions) <= 8
    assert nx.is_tree(unit_disk_graph(layout.topology()))

    network = build_layout_network(layout, seed=seed, sim_time_s=3.0)
    result = network.run()

    path = nx.shortest_path(unit_disk_graph(layout.topology()), *layout.flows[0])
    assert set(result.convicted) == {attacker_index}
    assert _first_silent_hop(path, network.recorder.trace_rows) == attacker_index


def _random_cyclic_layout(seed):
    """
    Connected layout whose only crossing is the gray hole, with a cycle on
    the source side so that several request copies reach it.
    """
    rng = np.random.default_rng(seed)
    while True:
        n = int(rng.integers(5, 9))
        coords = rng.uniform((0.0, 0.0), (130.0, 70.0), size=(n, 2))
        positions = {i: (float(x), float(y)) for i, (x, y) in enumerate(coords)}
        graph = unit_disk_graph(Topology(positions))
        if not nx.is_connected(graph) or not nx.cycle_basis(graph):
            continue
        cuts = sorted(nx.articulation_points(graph))
        if not cuts:
            continue
        attacker = cuts[int(rng.integers(len(cuts)))]
        rest = graph.subgraph(set(graph) - {attacker})
        sides = sorted(sorted(side) for side in nx.connected_components(rest))
        first, second = rng.choice(len(sides), size=2, replace=False)
        if not nx.cycle_basis(graph.subgraph(set(sides[first]) | {attacker})):
            continue
        source = sides[first][int(rng.integers(len(sides[first])))]
        destination = sides[second][int(rng.integers(len(sides[second])))]
        layout = ScriptedLayout(
            name="cyclic",
            description=f"{n} nodes with a cycle, gray hole {attacker} on the only crossing",
            positions=positions,
            flows=[(source, destination)],
            behaviors={attacker: always_drop()},
        )
        return layout, attacker


@pytest.mark.parametrize("seed", range(100))
def test_cyclic_conviction_matches_the_trace(build_layout_network, seed):
    layout, attacker = _random_cyclic_layout(seed)
    graph = unit_disk_graph(layout.topology())
    assert not nx.is_forest(graph)

    network = build_layout_network(layout, seed=seed, sim_time_s=3.0)
    result = network.run()

    tested = [int(node_id) for node_id in network.recorder.probe_rows[0]["route"].split("-")]
    assert set(result.convicted) == {attacker}
    assert _first_silent_hop(tested, network.recorder.trace_rows) == attacker


class TestRandomNetworks:
    def test_reruns_are_identical(self, small_config):
        service = ExperimentService(workers=1)
        first = service.run_scenario(small_config)
        second = service.run_scenario(small_config)

        assert first.model_dump_json() == second.model_dump_json()

    def test_seed_changes_the_run(self, small_config):
        service = ExperimentService(workers=1)
        first = service.run_scenario(small_config)
        second = service.run_scenario(small_config.model_copy(update={"seed": 8}))

        assert first.model_dump_json() != second.model_dump_json()

    def test_attack_free_network_convicts_nobody(self, small_config):
        config = small_config.model_copy(update={"malicious_ratio": 0.0})
        report, network = ExperimentService(workers=1).run(config)

        assert report.attackers == []
        assert report.convicted == []
        assert report.fpr == 0.0
        assert report.dr == 100.0
        assert report.pdr is not None and report.pdr > 0
        for flow in network.flows:
            if flow.route is not None:
                assert is_connected_path(flow.route.path, network.topology)

    @pytest.mark.parametrize("seed", [3, 4, 5])
    def test_honest_forwarders_are_never_low_in_a_settled_epoch(self, small_config, seed):
        config = small_config.model_copy(update={"node_count": 30, "malicious_ratio": 0.0, "seed": seed})
        _, network = ExperimentService(workers=1).run(config)

        settled_before = (network.end_time - 10) // config.epoch_ms
        low = [
            row
            for row in network.table_dump()
            if row["epoch"] < settled_before and row["rreq_t"] > row["rreq_c"]
        ]
        assert network.counters["rreq_sent"] > 0
        assert low == []

    def test_no_request_is_forwarded_twice(self, small_config):
        _, network = ExperimentService(workers=1).run(small_config)

        forwarded = [count for node in network.nodes.values() for count in node.forwarded_rreqs.values()]
        assert forwarded
        assert max(forwarded) == 1

    def test_harmless_attackers_leave_the_trace_unchanged(self, small_config):
        config = small_config.model_copy(
            update={
                "malicious_ratio": 0.2,
                "attacker": AttackerConfig(
                    data_drop_prob=0.0,
                    rreq_drop_prob=0.0,
                    control_reaction=ControlReaction.SHIELD_PARTNER,
                    fast_reply=False,
                ),
            }
        )
        disguised, truth = ExperimentService(workers=1).build_network(config, RunRecorder(trace=True))
        honest = Network(
            disguised.topology,
            {},
            [(flow.source, flow.destination) for flow in disguised.flows],
            config,
            RunRecorder(trace=True),
            flow_starts=[flow.start_at for flow in disguised.flows],
        )

        assert truth.malicious
        first = disguised.run()
        second = honest.run()

        assert disguised.recorder.trace_rows == honest.recorder.trace_rows
        assert first.stats.data_delivered == second.stats.data_delivered
        assert first.convicted == second.convicted

    def test_defense_off_convicts_nobody(self, small_config):
        config = small_config.model_copy(update={"defense": False})
        report = ExperimentService(workers=1).run_scenario(config)

        assert report.convicted == []
        assert report.confusion.fp == 0
        assert report.counters.get("probes", 0) == 0

    def test_silent_gray_holes_never_frame_honest_nodes(self, small_config):
        for seed in range(1, 6):
            config = small_config.model_copy(update={"seed": seed, "malicious_ratio": 0.15})
            report = ExperimentService(workers=1).run_scenario(config)

            assert report.confusion.fp == 0
            assert set(report.convicted) <= set(report.attackers)
            assert report.dr + report.fnr == pytest.approx(100.0)
            assert not set(report.attackers) & set(report.endpoints)

    def test_every_node_is_scored_once(self, small_config):
        report = ExperimentService(workers=1).run_scenario(small_config)

        assert report.confusion.tp + report.confusion.fp + report.confusion.tn + report.confusion.fn == (
            report.node_count - len(report.endpoints)
        )
