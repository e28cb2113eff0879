"""
Gray Hole Guard

Discrete-event AODV simulator with a four-phase gray hole defense.
"""

import logging

from .database import Base, engine


def init_db():
    """Initialize run-ledger tables"""
    from .models import SimulationRun  # noqa: F401  Import models here to avoid circular imports

    Base.metadata.create_all(bind=engine)
    logging.info("Database tables initialized")


# Package-level exports
__all__ = ["engine", "Base", "init_db"]
