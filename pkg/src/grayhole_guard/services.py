"""
Experiment Service

This module contains the experiment runner: building a network from a
scenario configuration, running it, scoring the outcome, and the ratio and
node-count sweeps assembled with pandas.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
import pandas as pd
from pydantic import ValidationError

from config.settings import settings

from .adversary import GroundTruth, NodeBehavior, assign_roles
from .exceptions import ConfigurationError
from .kernel import (STREAM_ROLES, STREAM_TRAFFIC, RandomStreams, Topology,
                     place_uniform)
from .layouts import get_layout
from .metrics import avg_delay, dr, fnr, fpr, pdr, score_run
from .network import Network, unit_disk_graph
from .recorders import RunRecorder, frame_to_csv
from .schemas import ConfusionMatrixSchema, RunReport, ScenarioConfig

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["ratio", "seed", "fpr", "fnr", "dr", "pdr", "avg_delay_ms"]
NODE_SWEEP_COLUMNS = ["node_count", "seed", "fpr", "fnr", "dr", "pdr", "avg_delay_ms"]
METRIC_COLUMNS = ["fpr", "fnr", "dr", "pdr", "avg_delay_ms"]

# name -> (description, overrides of ScenarioConfig defaults)
SCENARIO_PRESETS: Dict[str, Tuple[str, dict]] = {
    "scenario1": (
        "8% gray holes, 60x60 m, 500 s",
        {"malicious_ratio": 0.08, "area": (60.0, 60.0), "sim_time_s": 500.0},
    ),
    "scenario2": (
        "16% gray holes, 70x70 m, 1000 s",
        {"malicious_ratio": 0.16, "area": (70.0, 70.0), "sim_time_s": 1000.0},
    ),
    "scenario3": (
        "24% gray holes, 80x80 m, 1500 s",
        {"malicious_ratio": 0.24, "area": (80.0, 80.0), "sim_time_s": 1500.0},
    ),
    "scenario4": (
        "Ratio sweep base: 90x90 m, 2000 s",
        {"malicious_ratio": 0.0, "area": (90.0, 90.0), "sim_time_s": 2000.0},
    ),
    "suspicious_node": (
        "Nine-node layout with one gray hole between source 5 and destination 9",
        {"layout": "suspicious_node", "node_count": 9, "sim_time_s": 10.0},
    ),
    "simple_attack": (
        "One gray hole on the short path, an honest detour",
        {"layout": "simple_attack", "node_count": 5, "sim_time_s": 10.0},
    ),
    "cooperative_attack": (
        "Six-node line with a cooperative pair",
        {"layout": "cooperative_attack", "node_count": 6, "sim_time_s": 10.0},
    ),
}


def preset_config(name: str) -> ScenarioConfig:
    try:
        _, overrides = SCENARIO_PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"Unknown scenario '{name}'. Available: {', '.join(SCENARIO_PRESETS)}"
        ) from None
    return ScenarioConfig(name=name, **overrides)


def load_config(source: Union[str, Path]) -> ScenarioConfig:
    """
    Load a scenario from a preset name, a JSON file, or the name of a file
    in the scenarios directory.

    Raises:
        ConfigurationError: Unknown preset, missing file or invalid document
    """
    if str(source) in SCENARIO_PRESETS:
        return preset_config(str(source))
    path = Path(source)
    if not path.is_file() and not path.suffix:
        path = settings.SCENARIOS_DIR / f"{path.name}.json"
    if not path.is_file():
        raise ConfigurationError(f"Config file not found: {path}")
    try:
        return ScenarioConfig.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ConfigurationError(f"Invalid config {path}: {e}") from e


def parse_ratios(text: str) -> List[float]:
    """'start:stop:step' (inclusive) or a comma list."""
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(round((stop - start) / step)) + 1
            ratios = [round(start + i * step, 6) for i in range(count)]
        else:
            ratios = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigurationError(f"Cannot parse ratios '{text}'") from None
    if not ratios or any(r < 0.0 or r > 1.0 for r in ratios):
        raise ConfigurationError(f"Ratios must lie in [0, 1]: '{text}'")
    return ratios


def parse_seeds(text: str, base: int = 1) -> List[int]:
    """A seed count ('10' -> base..base+9) or a comma list."""
    try:
        if "," in text:
            return [int(part) for part in text.split(",") if part.strip()]
        count = int(text)
    except ValueError:
        raise ConfigurationError(f"Cannot parse seeds '{text}'") from None
    if count < 1:
        raise ConfigurationError("At least one seed is required")
    return list(range(base, base + count))


def choose_flows(
    topology: Topology,
    behaviors: Dict[int, NodeBehavior],
    count: int,
    rng: np.random.Generator,
) -> List[Tuple[int, int]]:
    """
    Sample honest endpoint pairs that share a connected component.

    Non-adjacent destinations are preferred so that a route has at least one
    intermediate node.

    Raises:
        ConfigurationError: No honest node has an honest peer in its component
    """
    graph = unit_disk_graph(topology)
    honest = [i for i in sorted(topology.ids) if not behaviors[i].malicious]
    honest_ids = set(honest)
    component_of = {}
    for component in nx.connected_components(graph):
        members = sorted(component & honest_ids)
        for node_id in members:
            component_of[node_id] = members
    sources = [i for i in honest if len(component_of[i]) >= 2]
    if count and not sources:
        raise ConfigurationError("No two honest nodes are connected; cannot place any flow")

    flows = []
    for _ in range(count):
        source = sources[int(rng.integers(len(sources)))]
        peers = [i for i in component_of[source] if i != source]
        distant = [i for i in peers if not topology.are_neighbors(source, i)]
        pool = distant or peers
        flows.append((source, pool[int(rng.integers(len(pool)))]))
    return flows


class ExperimentService:
    """Builds, runs and scores simulations."""

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers or settings.SWEEP_WORKERS

    def build_network(
        self, config: ScenarioConfig, recorder: Optional[RunRecorder] = None
    ) -> Tuple[Network, GroundTruth]:
        """
        Topology, roles and flows for a configuration.

        Scripted layouts bring their own positions, roles and flows; otherwise
        nodes are placed uniformly and attackers sampled from the seed.
        """
        if config.layout:
            layout = get_layout(config.layout)
            behaviors = layout.all_behaviors()
            network = Network(layout.topology(), behaviors, layout.flows, config, recorder)
            return network, GroundTruth.from_behaviors(behaviors)

        streams = RandomStreams(config.seed)
        topology = place_uniform(config.node_count, config.area, config.seed, config.range_m)
        fixed = [(f.source, f.destination) for f in config.traffic.endpoints]
        fixed_ids = {node_id for pair in fixed for node_id in pair}
        unknown = sorted(i for i in fixed_ids if i not in topology)
        if unknown:
            raise ConfigurationError(f"Flow endpoints {unknown} are not node ids")

        template = NodeBehavior.gray_hole(**config.attacker.model_dump())
        behaviors, truth = assign_roles(
            topology,
            config.malicious_ratio,
            template,
            streams.stream(STREAM_ROLES),
            cooperative_pairs=config.effective_pairs,
            exclude=fixed_ids,
        )
        traffic_rng = streams.stream(STREAM_TRAFFIC)
        flows = fixed or choose_flows(topology, behaviors, config.traffic.flows, traffic_rng)
        window = config.traffic.start_window_ms
        starts = [int(traffic_rng.integers(0, window + 1)) for _ in flows]
        network = Network(topology, behaviors, flows, config, recorder, flow_starts=starts)
        return network, truth

    def run(
        self, config: ScenarioConfig, recorder: Optional[RunRecorder] = None
    ) -> Tuple[RunReport, Network]:
        """Run one simulation and return its report with the finished network."""
        network, truth = self.build_network(config, recorder)
        logger.info(
            "Running '%s' seed=%s nodes=%s attackers=%s defense=%s",
            config.name, config.seed, len(network.topology), len(truth.malicious), config.defense,
        )
        result = network.run()
        if recorder is not None:
            recorder.tables_dump(network.table_dump())

        endpoints = set(result.endpoints)
        scored = [i for i in network.topology.ids if i not in endpoints]
        cm = score_run(result.convicted, truth, scored)
        node_count = len(network.topology)
        ratio = config.malicious_ratio if not config.layout else len(truth.malicious) / node_count
        report = RunReport(
            scenario=config.name,
            seed=config.seed,
            defense=config.defense,
            node_count=node_count,
            malicious_ratio=ratio,
            attackers=sorted(truth.malicious),
            convicted=sorted(result.convicted),
            endpoints=result.endpoints,
            confusion=ConfusionMatrixSchema(**asdict(cm)),
            fpr=fpr(cm),
            fnr=fnr(cm),
            dr=dr(cm),
            pdr=pdr(result.stats),
            avg_delay_ms=avg_delay(result.stats),
            counters=result.counters,
        )
        logger.info(
            "Finished '%s' seed=%s: dr=%.3f fpr=%.3f pdr=%s",
            config.name, config.seed, report.dr, report.fpr, report.pdr,
        )
        return report, network

    def run_scenario(self, config: ScenarioConfig, recorder: Optional[RunRecorder] = None) -> RunReport:
        report, _ = self.run(config, recorder)
        return report

    def _run_grid(self, configs: List[ScenarioConfig]) -> List[RunReport]:
        if self.workers > 1 and len(configs) > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                return list(pool.map(_run_report, configs))
        return [self.run_scenario(config) for config in configs]

    def run_sweep(
        self, base: ScenarioConfig, ratios: Sequence[float], seeds: Sequence[int]
    ) -> pd.DataFrame:
        """
        One row per (ratio, seed), followed per ratio by a 'mean' row.

        Returns:
            DataFrame with columns ratio, seed, fpr, fnr, dr, pdr, avg_delay_ms
        """
        configs = [
            base.model_copy(update={"malicious_ratio": ratio, "seed": seed})
            for ratio in ratios
            for seed in seeds
        ]
        reports = self._run_grid(configs)
        rows = [
            {"ratio": r.malicious_ratio, "seed": r.seed, **_metric_row(r)}
            for r in reports
        ]
        return _with_means(rows, "ratio", SWEEP_COLUMNS)

    def run_node_sweep(
        self, base: ScenarioConfig, node_counts: Sequence[int], seeds: Sequence[int]
    ) -> pd.DataFrame:
        """Ratio fixed, node count varied; a 'mean' row per node count."""
        configs = [
            base.model_copy(update={"node_count": count, "seed": seed})
            for count in node_counts
            for seed in seeds
        ]
        reports = self._run_grid(configs)
        rows = [
            {"node_count": r.node_count, "seed": r.seed, **_metric_row(r)}
            for r in reports
        ]
        return _with_means(rows, "node_count", NODE_SWEEP_COLUMNS)


def _run_report(config: ScenarioConfig) -> RunReport:
    return ExperimentService(workers=1).run_scenario(config)


def _metric_row(report: RunReport) -> dict:
    return {
        "fpr": report.fpr,
        "fnr": report.fnr,
        "dr": report.dr,
        "pdr": report.pdr,
        "avg_delay_ms": report.avg_delay_ms,
    }


def _with_means(rows: List[dict], key: str, columns: List[str]) -> pd.DataFrame:
    frame = pd.DataFrame(rows, columns=columns).sort_values([key, "seed"], kind="mergesort")
    frame[METRIC_COLUMNS] = frame[METRIC_COLUMNS].astype(float)
    parts = []
    for value, group in frame.groupby(key, sort=True):
        mean = group[METRIC_COLUMNS].mean()
        mean_row = pd.DataFrame([{key: value, "seed": "mean", **mean.to_dict()}], columns=columns)
        parts.append(group.astype({"seed": str}))
        parts.append(mean_row)
    if not parts:
        return pd.DataFrame(columns=columns)
    return pd.concat(parts, ignore_index=True)[columns]


def sweep_csv(frame: pd.DataFrame) -> str:
    return frame_to_csv(frame)


def seed_rows(frame: pd.DataFrame) -> pd.DataFrame:
    return frame[frame["seed"] != "mean"]


def mean_rows(frame: pd.DataFrame) -> pd.DataFrame:
    return frame[frame["seed"] == "mean"]


# Global service instance
_experiment_service = None


def get_experiment_service() -> ExperimentService:
    """Get the global experiment service instance."""
    global _experiment_service
    if _experiment_service is None:
        _experiment_service = ExperimentService()
    return _experiment_service


def run_scenario(config: ScenarioConfig, recorder: Optional[RunRecorder] = None) -> RunReport:
    """
    Run one scenario.

    Args:
        config: Validated scenario configuration
        recorder: Optional artifact recorder

    Returns:
        RunReport with confusion matrix, rates and counters
    """
    return get_experiment_service().run_scenario(config, recorder)


def run_sweep(base: ScenarioConfig, ratios: Iterable[float], seeds: Iterable[int]) -> pd.DataFrame:
    """Ratio x seed sweep; see ExperimentService.run_sweep."""
    return get_experiment_service().run_sweep(base, list(ratios), list(seeds))


def run_node_sweep(base: ScenarioConfig, node_counts: Iterable[int], seeds: Iterable[int]) -> pd.DataFrame:
    """Node-count x seed sweep; see ExperimentService.run_node_sweep."""
    return get_experiment_service().run_node_sweep(base, list(node_counts), list(seeds))
