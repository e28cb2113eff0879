"""
Pydantic Schemas

This module contains the scenario configuration models and the
request/response models of the HTTP API.
"""

from datetime import datetime
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import settings

from .adversary import ControlReaction


# Scenario configuration
class AttackerConfig(BaseModel):
    """Gray hole parameters applied to every sampled attacker."""

    model_config = ConfigDict(extra="forbid")

    data_drop_prob: float = Field(0.5, ge=0.0, le=1.0)
    rreq_drop_prob: float = Field(0.5, ge=0.0, le=1.0)
    control_reaction: ControlReaction = ControlReaction.SILENT_DROP
    fast_reply: bool = True
    class_based: bool = False


class FlowConfig(BaseModel):
    """Explicit CBR flow endpoints."""

    model_config = ConfigDict(extra="forbid")

    source: int = Field(..., ge=0)
    destination: int = Field(..., ge=0)

    @model_validator(mode="after")
    def distinct_endpoints(self):
        if self.source == self.destination:
            raise ValueError("flow source and destination must differ")
        return self


class TrafficConfig(BaseModel):
    """CBR traffic profile."""

    model_config = ConfigDict(extra="forbid")

    flows: int = Field(10, ge=0)
    rate_pps: float = Field(4.0, gt=0)
    start_window_ms: int = Field(1000, ge=0)
    queue_limit: int = Field(64, ge=1)
    endpoints: List[FlowConfig] = Field(default_factory=list)


class ScenarioConfig(BaseModel):
    """Everything needed to run one simulation."""

    model_config = ConfigDict(extra="forbid")

    name: str = "custom"
    layout: Optional[str] = None

    # Topology
    node_count: int = Field(settings.DEFAULT_NODE_COUNT, ge=2)
    area: Tuple[float, float] = (60.0, 60.0)
    range_m: float = Field(50.0, gt=0)

    # Adversary
    malicious_ratio: float = Field(0.08, ge=0.0, le=1.0)
    cooperative: bool = False
    cooperative_pairs: int = Field(0, ge=0)
    attacker: AttackerConfig = Field(default_factory=AttackerConfig)

    # Run
    sim_time_s: float = Field(500.0, gt=0)
    seed: int = Field(settings.DEFAULT_SEED, ge=0)
    packet_size: int = Field(256, gt=0)
    traffic: TrafficConfig = Field(default_factory=TrafficConfig)

    # Defense
    defense: bool = True
    n_blocks: int = Field(settings.N_BLOCKS, ge=1)
    epoch_ms: int = Field(settings.EPOCH_MS, gt=0)

    # Radio and timing (ms)
    per_hop_delay_ms: int = Field(settings.PER_HOP_DELAY_MS, gt=0)
    link_loss: float = Field(0.0, ge=0.0, le=1.0)
    rrep_wait_ms: int = Field(200, gt=0)
    dest_reply_window_ms: int = Field(20, gt=0)
    reply_processing_ms: int = Field(1, gt=0)
    probe_margin_ms: int = Field(10, gt=0)
    block_gather_ms: int = Field(2, gt=0)
    detection_margin_ms: int = Field(10, gt=0)
    rreq_retries: int = Field(2, ge=0)
    discovery_backoff_ms: int = Field(5000, gt=0)

    @field_validator("area")
    @classmethod
    def positive_area(cls, value):
        if value[0] <= 0 or value[1] <= 0:
            raise ValueError("area width and height must be positive")
        return value

    @model_validator(mode="after")
    def reply_window_fits(self):
        if self.dest_reply_window_ms >= self.rrep_wait_ms:
            raise ValueError("dest_reply_window_ms must be shorter than rrep_wait_ms")
        return self

    @property
    def sim_time_ms(self) -> int:
        return int(round(self.sim_time_s * 1000))

    @property
    def effective_pairs(self) -> int:
        """Cooperative pairs to form; the flag alone pairs every attacker."""
        if not self.cooperative:
            return 0
        return self.cooperative_pairs or self.node_count


# Run results
class ConfusionMatrixSchema(BaseModel):
    tp: int
    fp: int
    tn: int
    fn: int


class RunReport(BaseModel):
    """Outcome of one simulation."""

    scenario: str
    seed: int
    defense: bool
    node_count: int
    malicious_ratio: float
    attackers: List[int]
    convicted: List[int]
    endpoints: List[int]
    confusion: ConfusionMatrixSchema
    fpr: float
    fnr: float
    dr: float
    pdr: Optional[float] = None
    avg_delay_ms: Optional[float] = None
    counters: Dict[str, int] = Field(default_factory=dict)


# API schemas
class SimulationRecord(BaseModel):
    """Stored run as returned by the API."""

    model_config = ConfigDict(from_attributes=True)

    uuid: str
    scenario: str
    seed: int
    malicious_ratio: float
    defense: bool
    fpr: float
    fnr: float
    dr: float
    pdr: Optional[float] = None
    avg_delay_ms: Optional[float] = None
    convicted: str
    created_at: datetime


class SimulationList(BaseModel):
    items: List[SimulationRecord]
    total: int
    page: int
    per_page: int


class SimulationResult(BaseModel):
    """A stored run with its full report."""

    uuid: str
    created_at: datetime
    report: RunReport


class SweepRequest(BaseModel):
    """Ratio x seed sweep over a base scenario."""

    model_config = ConfigDict(extra="forbid")

    config: ScenarioConfig = Field(default_factory=ScenarioConfig)
    ratios: List[float] = Field(..., min_length=1)
    seeds: List[int] = Field(..., min_length=1)

    @field_validator("ratios")
    @classmethod
    def ratios_in_range(cls, value):
        if any(r < 0.0 or r > 1.0 for r in value):
            raise ValueError("ratios must lie in [0, 1]")
        return value


class SweepRow(BaseModel):
    ratio: float
    seed: str
    fpr: float
    fnr: float
    dr: float
    pdr: Optional[float] = None
    avg_delay_ms: Optional[float] = None


class SweepResponse(BaseModel):
    rows: List[SweepRow]
    means: List[SweepRow]


class SummaryRow(BaseModel):
    """Averages of stored runs for one (ratio, defense) group."""

    malicious_ratio: float
    defense: bool
    runs: int
    fpr: float
    fnr: float
    dr: float
    pdr: Optional[float] = None
    avg_delay_ms: Optional[float] = None


class ScenarioSummary(BaseModel):
    name: str
    description: str
    config: ScenarioConfig
