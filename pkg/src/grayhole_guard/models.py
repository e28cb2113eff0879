"""
Database Models

This module contains the SQLAlchemy model of the run ledger.
"""

import uuid
from datetime import datetime

from sqlalchemy import (Boolean, Column, DateTime, Float, Index, Integer,
                        String, Text)

from .base import Base


class SimulationRun(Base):
    """One stored simulation report."""

    __tablename__ = "simulation_runs"

    id = Column(Integer, primary_key=True, index=True)
    uuid = Column(
        String(36),
        unique=True,
        index=True,
        nullable=False,
        default=lambda: str(uuid.uuid4()),
    )
    scenario = Column(String(100), nullable=False)
    seed = Column(Integer, nullable=False)
    malicious_ratio = Column(Float, nullable=False)
    defense = Column(Boolean, nullable=False, default=True)
    fpr = Column(Float, nullable=False)
    fnr = Column(Float, nullable=False)
    dr = Column(Float, nullable=False)
    pdr = Column(Float, nullable=True)
    avg_delay_ms = Column(Float, nullable=True)
    convicted = Column(String(1000), nullable=False, default="")  # space separated ids
    report = Column(Text, nullable=False)  # RunReport JSON
    created_at = Column(DateTime, default=datetime.utcnow)

    __table_args__ = (
        Index("idx_run_scenario", "scenario"),
        Index("idx_run_ratio_defense", "malicious_ratio", "defense"),
        Index("idx_run_created_at", "created_at"),
    )
