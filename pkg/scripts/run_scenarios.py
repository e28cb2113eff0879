#!/usr/bin/env python3
"""
Scenario Runner Script

Runs the built-in scenarios with the defense on and off, prints a
comparison table and stores every report in the run ledger.
"""

import argparse
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import settings
from src.grayhole_guard import crud
from src.grayhole_guard.database import Base, engine, ledger_session
from src.grayhole_guard.logging_config import configure_logging
from src.grayhole_guard.services import (SCENARIO_PRESETS, ExperimentService,
                                         preset_config)


def run_all(names, seeds, sim_time_s, store):
    """Run every named preset for every seed, defense on and off."""
    Base.metadata.create_all(bind=engine)
    service = ExperimentService(workers=1)
    with ledger_session() as db:
        for name in names:
            print(f"\n🧪 Scenario: {name}")
            print("=" * 60)
            print(f"{'seed':>6} {'defense':>8} {'FPR':>8} {'FNR':>8} {'DR':>8} {'PDR':>8}")
            for seed in seeds:
                for defense in (True, False):
                    update = {"seed": seed, "defense": defense}
                    if sim_time_s:
                        update["sim_time_s"] = sim_time_s
                    report = service.run_scenario(preset_config(name).model_copy(update=update))
                    pdr_text = "n/a" if report.pdr is None else f"{report.pdr:.1f}"
                    print(
                        f"{seed:>6} {'on' if defense else 'off':>8} {report.fpr:>8.3f} "
                        f"{report.fnr:>8.3f} {report.dr:>8.3f} {pdr_text:>8}"
                    )
                    if store:
                        crud.create_run(db, report)


def main():
    parser = argparse.ArgumentParser(description="Run built-in scenarios")
    parser.add_argument("names", nargs="*", default=["scenario1", "scenario2", "scenario3"])
    parser.add_argument("--seeds", type=int, default=3)
    parser.add_argument("--sim-time", type=float, default=None, help="Override sim_time_s")
    parser.add_argument("--no-store", action="store_true", help="Do not write to the run ledger")
    args = parser.parse_args()

    unknown = [name for name in args.names if name not in SCENARIO_PRESETS]
    if unknown:
        print(f"❌ Unknown scenarios: {', '.join(unknown)}")
        sys.exit(2)

    configure_logging("WARNING")
    print(f"🛡️ {settings.APP_NAME} scenario runner")
    run_all(args.names, range(settings.DEFAULT_SEED, settings.DEFAULT_SEED + args.seeds), args.sim_time, not args.no_store)
    print("\n✅ Done")


if __name__ == "__main__":
    main()
