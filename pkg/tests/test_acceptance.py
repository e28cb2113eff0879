"""
Acceptance Tests

Directional results on 100-node random networks: no honest conviction,
bounded FPR under link loss, detection rate against the malicious ratio
and the delivery gain of the defense. Minutes per test; run with
`pytest -m slow`.
"""

import pytest

from config.settings import settings
from src.grayhole_guard.schemas import AttackerConfig
from src.grayhole_guard.services import (ExperimentService, mean_rows,
                                         preset_config, seed_rows)

pytestmark = pytest.mark.slow

SOUNDNESS_SEEDS = range(1, 101)
TREND_SEEDS = range(1, 11)
DR_FLOOR = 85.0
DR_NOISE = 3.0
LOSSY_FPR_CEILING = 15.0
PDR_GAIN = 15.0


@pytest.fixture(scope="module")
def service():
    return ExperimentService(workers=settings.SWEEP_WORKERS)


def _base(sim_time_s=60.0):
    return preset_config("scenario4").model_copy(
        update={"sim_time_s": sim_time_s, "attacker": AttackerConfig(data_drop_prob=1.0)}
    )


@pytest.mark.parametrize("ratio", [0.08, 0.16, 0.24])
def test_no_honest_node_is_convicted_on_clean_links(service, ratio):
    frame = service.run_sweep(_base(sim_time_s=30.0), [ratio], SOUNDNESS_SEEDS)
    runs = seed_rows(frame)

    assert len(runs) == len(SOUNDNESS_SEEDS)
    assert runs["fpr"].max() == 0.0


def test_false_positives_stay_bounded_with_link_loss(service):
    lossy = _base().model_copy(update={"link_loss": 0.01})
    frame = service.run_sweep(lossy, [0.08, 0.16, 0.24], TREND_SEEDS)

    assert seed_rows(frame)["fpr"].mean() <= LOSSY_FPR_CEILING


def test_detection_rate_falls_with_the_malicious_ratio(service):
    ratios = [0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30]
    frame = service.run_sweep(_base(), ratios, TREND_SEEDS)
    runs = seed_rows(frame)
    means = mean_rows(frame)

    assert ((runs["dr"] + runs["fnr"]) - 100.0).abs().max() < 1e-9
    low = means[(means["ratio"] > 0) & (means["ratio"] <= 0.08)]["dr"]
    assert len(low) == 1
    assert (low >= DR_FLOOR).all()
    drs = list(means["dr"])
    assert all(later <= earlier + DR_NOISE for earlier, later in zip(drs, drs[1:]))


def test_defense_raises_delivery_at_high_ratio(service):
    base = _base().model_copy(update={"malicious_ratio": 0.24})
    gains = []
    for seed in TREND_SEEDS:
        on = service.run_scenario(base.model_copy(update={"seed": seed, "defense": True}))
        off = service.run_scenario(base.model_copy(update={"seed": seed, "defense": False}))
        gains.append((on.pdr or 0.0) - (off.pdr or 0.0))

    assert sum(gains) / len(gains) >= PDR_GAIN
