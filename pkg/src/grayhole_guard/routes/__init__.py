"""
Routes package for the Gray Hole Guard API.

This package contains all the route handlers organized by functionality:
- simulations: Run, store and browse single simulations
- sweeps: Malicious-ratio sweeps
- analytics: Averages over stored runs
- scenarios: Built-in scenario presets
- system: System information endpoints
"""

from .analytics import router as analytics_router
from .scenarios import router as scenarios_router
from .simulations import router as simulations_router
from .sweeps import router as sweeps_router
from .system import router as system_router

__all__ = [
    "simulations_router",
    "sweeps_router",
    "analytics_router",
    "scenarios_router",
    "system_router",
]
