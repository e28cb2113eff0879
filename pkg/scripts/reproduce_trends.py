#!/usr/bin/env python3
"""
Trend Reproduction Script

Checks the directional results at desk scale:
- no honest conviction on loss-free links, bounded FPR with 1% loss
- detection rate high at low ratios and non-increasing with the ratio
- delivery gain of the defense at 24% gray holes, paired seeds

Each check prints its measured values and a pass/fail line; the ratio sweep
is also written to the results directory. Expect minutes. The same checks
run under pytest with `-m slow`.
"""

import argparse
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import settings
from src.grayhole_guard.logging_config import configure_logging
from src.grayhole_guard.schemas import AttackerConfig
from src.grayhole_guard.services import (ExperimentService, mean_rows,
                                         preset_config, seed_rows, sweep_csv)

DR_FLOOR = 85.0
DR_NOISE = 3.0
LOSSY_FPR_CEILING = 15.0
PDR_GAIN = 15.0


def _base(sim_time_s):
    return preset_config("scenario4").model_copy(
        update={
            "sim_time_s": sim_time_s,
            "attacker": AttackerConfig(data_drop_prob=1.0),
        }
    )


def check_soundness(service, seeds, sim_time_s):
    print("\n🔍 Soundness: no honest conviction")
    print("-" * 40)
    base = _base(sim_time_s)
    framed = 0
    for ratio in (0.08, 0.16, 0.24):
        for seed in seeds:
            report = service.run_scenario(base.model_copy(update={"malicious_ratio": ratio, "seed": seed}))
            framed += report.confusion.fp
    print(f"   honest nodes convicted over {3 * len(seeds)} runs: {framed}")

    lossy = service.run_sweep(base.model_copy(update={"link_loss": 0.01}), [0.08, 0.16, 0.24], seeds)
    mean_fpr = seed_rows(lossy)["fpr"].mean()
    print(f"   mean FPR with 1% link loss: {mean_fpr:.3f}")
    ok = framed == 0 and mean_fpr <= LOSSY_FPR_CEILING
    print("✅ passed" if ok else "❌ failed")
    return ok


def check_detection_trend(service, seeds, sim_time_s):
    print("\n📉 Detection rate against malicious ratio")
    print("-" * 40)
    ratios = [0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30]
    frame = service.run_sweep(_base(sim_time_s), ratios, seeds)
    means = mean_rows(frame)
    sweep_path = settings.RESULTS_DIR / "trend_sweep.csv"
    sweep_path.write_text(sweep_csv(frame), encoding="utf-8", newline="")
    print(f"   sweep written to {sweep_path}")
    for _, row in means.iterrows():
        print(f"   ratio {row['ratio']:.2f}: DR {row['dr']:.3f}  FPR {row['fpr']:.3f}")

    identity = ((seed_rows(frame)["dr"] + seed_rows(frame)["fnr"]) - 100.0).abs().max() < 1e-9
    low = means[(means["ratio"] > 0) & (means["ratio"] <= 0.08)]["dr"]
    drs = list(means["dr"])
    monotone = all(later <= earlier + DR_NOISE for earlier, later in zip(drs, drs[1:]))
    ok = identity and bool((low >= DR_FLOOR).all()) and monotone
    print(f"   dr + fnr = 100 on every run: {identity}")
    print("✅ passed" if ok else "❌ failed")
    return ok


def check_pdr_gain(service, seeds, sim_time_s):
    print("\n📦 Delivery with and without the defense at 24%")
    print("-" * 40)
    base = _base(sim_time_s).model_copy(update={"malicious_ratio": 0.24})
    gains = []
    for seed in seeds:
        on = service.run_scenario(base.model_copy(update={"seed": seed, "defense": True}))
        off = service.run_scenario(base.model_copy(update={"seed": seed, "defense": False}))
        gains.append((on.pdr or 0.0) - (off.pdr or 0.0))
        print(f"   seed {seed}: on {on.pdr or 0.0:.3f}  off {off.pdr or 0.0:.3f}")
    mean_gain = sum(gains) / len(gains)
    ok = mean_gain >= PDR_GAIN
    print(f"   mean gain: {mean_gain:.3f} points")
    print("✅ passed" if ok else "❌ failed")
    return ok


def main():
    parser = argparse.ArgumentParser(description="Reproduce the detection and delivery trends")
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--sim-time", type=float, default=60.0)
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()

    configure_logging("WARNING")
    service = ExperimentService(workers=args.workers)
    seeds = list(range(1, args.seeds + 1))

    results = [
        check_soundness(service, seeds, args.sim_time),
        check_detection_trend(service, seeds, args.sim_time),
        check_pdr_gain(service, seeds, args.sim_time),
    ]
    print(f"\n🏁 {sum(results)}/{len(results)} checks passed")
    sys.exit(0 if all(results) else 1)


if __name__ == "__main__":
    main()
