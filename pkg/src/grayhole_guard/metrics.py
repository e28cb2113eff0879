"""
Detection and Traffic Metrics

This module contains the node-level confusion matrix scored against ground
truth, the FPR/FNR/DR rates derived from it, and the data-plane statistics
behind PDR and average delay.
"""

from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np

from .adversary import GroundTruth


@dataclass(frozen=True)
class ConfusionMatrix:
    """Node verdicts versus ground truth at the end of a run."""

    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def score_run(
    verdicts: Iterable[int], truth: GroundTruth, all_nodes: Iterable[int]
) -> ConfusionMatrix:
    """
    Score convicted ids against ground truth.

    Args:
        verdicts: Ids convicted during the run
        truth: Truly malicious ids
        all_nodes: Ids that are scored (flow endpoints already removed)

    Returns:
        ConfusionMatrix over all_nodes
    """
    scored = set(all_nodes)
    convicted = set(verdicts) & scored
    malicious = set(truth.malicious) & scored
    tp = len(convicted & malicious)
    fp = len(convicted - malicious)
    fn = len(malicious - convicted)
    tn = len(scored) - tp - fp - fn
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def fpr(cm: ConfusionMatrix) -> float:
    """Honest nodes wrongly convicted, in percent."""
    negatives = cm.fp + cm.tn
    return 100.0 * cm.fp / negatives if negatives else 0.0


def fnr(cm: ConfusionMatrix) -> float:
    """Attackers left unconvicted, in percent."""
    positives = cm.fn + cm.tp
    return 100.0 * cm.fn / positives if positives else 0.0


def dr(cm: ConfusionMatrix) -> float:
    """Attackers convicted, in percent; 100 when there are none."""
    positives = cm.tp + cm.fn
    return 100.0 - fnr(cm) if positives else 100.0


@dataclass
class TrafficStats:
    """Data packets generated and delivered by all flows."""

    data_sent: int = 0
    data_delivered: int = 0
    delays: List[int] = field(default_factory=list)

    def record_sent(self) -> None:
        self.data_sent += 1

    def record_delivery(self, delay_ms: int) -> None:
        self.data_delivered += 1
        self.delays.append(delay_ms)


def pdr(stats: TrafficStats) -> Optional[float]:
    """Packet delivery ratio in percent; None for a run without traffic."""
    if stats.data_sent == 0:
        return None
    return 100.0 * stats.data_delivered / stats.data_sent


def avg_delay(stats: TrafficStats) -> Optional[float]:
    """Mean end-to-end delay of delivered packets in ms."""
    if not stats.delays:
        return None
    return float(np.mean(stats.delays))
