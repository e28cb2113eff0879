"""
Command Line Interface

This module contains the `simulate`, `sweep`, `node-sweep`, `scenarios` and
`serve` commands. Exit codes: 0 success, 2 configuration error, 3 runtime
simulation error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

from config.settings import settings

from .exceptions import ConfigurationError, GrayholeGuardError
from .logging_config import configure_logging
from .recorders import RunRecorder, write_csv
from .schemas import RunReport
from .services import (SCENARIO_PRESETS, ExperimentService, load_config,
                       parse_ratios, parse_seeds, sweep_csv)

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    "scenario", "seed", "defense", "node_count", "malicious_ratio",
    "tp", "fp", "tn", "fn", "fpr", "fnr", "dr", "pdr", "avg_delay_ms",
]


def report_row(report: RunReport) -> dict:
    return {
        "scenario": report.scenario,
        "seed": report.seed,
        "defense": "on" if report.defense else "off",
        "node_count": report.node_count,
        "malicious_ratio": report.malicious_ratio,
        **report.confusion.model_dump(),
        "fpr": report.fpr,
        "fnr": report.fnr,
        "dr": report.dr,
        "pdr": report.pdr,
        "avg_delay_ms": report.avg_delay_ms,
    }


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == "on"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grayhole-guard",
        description=settings.APP_DESCRIPTION,
    )
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Run one scenario")
    simulate.add_argument("--config", required=True, help="JSON file or preset name")
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--defense", type=_on_off, default=None, metavar="on|off")
    simulate.add_argument("--out", default=None, help="Report CSV")
    simulate.add_argument("--trace", default=None, help="Packet trace CSV")
    simulate.add_argument("--probe-log", default=None)
    simulate.add_argument("--detection-log", default=None)
    simulate.add_argument("--table-dump", default=None)
    simulate.add_argument("--quarantine-log", default=None)
    simulate.add_argument("--json", action="store_true", help="Print the full report as JSON")

    sweep = commands.add_parser("sweep", help="Malicious ratio x seed sweep")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--ratios", default=settings.SWEEP_RATIOS)
    sweep.add_argument("--seeds", default=str(settings.SWEEP_SEEDS))
    sweep.add_argument("--defense", type=_on_off, default=None, metavar="on|off")
    sweep.add_argument("--workers", type=int, default=None)
    sweep.add_argument("--out", default=None)

    node_sweep = commands.add_parser("node-sweep", help="Node count x seed sweep at a fixed ratio")
    node_sweep.add_argument("--config", required=True)
    node_sweep.add_argument("--nodes", default="50,100,150,200")
    node_sweep.add_argument("--ratio", type=float, default=None)
    node_sweep.add_argument("--seeds", default=str(settings.SWEEP_SEEDS))
    node_sweep.add_argument("--defense", type=_on_off, default=None, metavar="on|off")
    node_sweep.add_argument("--workers", type=int, default=None)
    node_sweep.add_argument("--out", default=None)

    commands.add_parser("scenarios", help="List built-in scenarios")

    serve = commands.add_parser("serve", help="Start the HTTP API")
    serve.add_argument("--host", default=settings.HOST)
    serve.add_argument("--port", type=int, default=settings.PORT)
    return parser


def _overrides(args) -> dict:
    update = {}
    if getattr(args, "seed", None) is not None:
        update["seed"] = args.seed
    if getattr(args, "defense", None) is not None:
        update["defense"] = args.defense
    return update


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    config = config.model_copy(update=_overrides(args))
    artifacts = {
        "trace": args.trace,
        "probes": args.probe_log,
        "detections": args.detection_log,
        "quarantine": args.quarantine_log,
        "tables": args.table_dump,
    }
    recorder = RunRecorder(
        trace=bool(args.trace),
        probes=bool(args.probe_log),
        detections=bool(args.detection_log),
        quarantine=bool(args.quarantine_log),
        tables=bool(args.table_dump),
    )
    report = ExperimentService(workers=1).run_scenario(config, recorder)
    recorder.write(artifacts)
    if args.out:
        write_csv([report_row(report)], REPORT_COLUMNS, args.out)

    if args.json:
        print(report.model_dump_json(indent=2))
    else:
        print(f"🛡️ {report.scenario} (seed {report.seed}, defense {'on' if report.defense else 'off'})")
        print(f"   attackers: {report.attackers}")
        print(f"   convicted: {report.convicted}")
        print(f"   FPR {report.fpr:.3f}  FNR {report.fnr:.3f}  DR {report.dr:.3f}")
        pdr_text = "n/a" if report.pdr is None else f"{report.pdr:.3f}"
        delay_text = "n/a" if report.avg_delay_ms is None else f"{report.avg_delay_ms:.3f} ms"
        print(f"   PDR {pdr_text}  avg delay {delay_text}")
    return 0


def _emit(frame: pd.DataFrame, out: Optional[str]) -> None:
    text = sweep_csv(frame)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8", newline="")
        print(f"✅ Wrote {len(frame)} rows to {out}")
    else:
        sys.stdout.write(text)


def cmd_sweep(args) -> int:
    base = load_config(args.config).model_copy(update=_overrides(args))
    ratios = parse_ratios(args.ratios)
    seeds = parse_seeds(args.seeds, base=base.seed)
    frame = ExperimentService(workers=args.workers).run_sweep(base, ratios, seeds)
    _emit(frame, args.out)
    return 0


def cmd_node_sweep(args) -> int:
    update = _overrides(args)
    if args.ratio is not None:
        update["malicious_ratio"] = args.ratio
    base = load_config(args.config).model_copy(update=update)
    try:
        counts = [int(part) for part in args.nodes.split(",") if part.strip()]
    except ValueError:
        raise ConfigurationError(f"Cannot parse node counts '{args.nodes}'") from None
    if not counts or min(counts) < 2:
        raise ConfigurationError("Node counts must be at least 2")
    seeds = parse_seeds(args.seeds, base=base.seed)
    frame = ExperimentService(workers=args.workers).run_node_sweep(base, counts, seeds)
    _emit(frame, args.out)
    return 0


def cmd_scenarios(args) -> int:
    for name, (description, _) in SCENARIO_PRESETS.items():
        print(f"{name:20s} {description}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run(
        "src.grayhole_guard.main:app",
        host=args.host,
        port=args.port,
        reload=settings.RELOAD,
        workers=settings.WORKERS,
        log_level=settings.LOG_LEVEL.lower(),
    )
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "node-sweep": cmd_node_sweep,
    "scenarios": cmd_scenarios,
    "serve": cmd_serve,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except GrayholeGuardError as e:
        logger.error("%s", e)
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code
