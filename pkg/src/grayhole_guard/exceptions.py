"""
Domain Exceptions

This module contains the exception hierarchy shared by the simulator,
the experiment runner, the CLI and the HTTP layer.
"""


class GrayholeGuardError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 1


class ConfigurationError(GrayholeGuardError):
    """A scenario or CLI configuration is invalid or unsatisfiable."""

    exit_code = 2


class SimulationError(GrayholeGuardError):
    """A simulation reached an inconsistent state while running."""

    exit_code = 3


class SchedulingError(SimulationError):
    """An event was scheduled before the current simulated time."""


class UnknownNodeError(SimulationError):
    """A node id does not exist in the topology."""

    def __init__(self, node_id: int):
        super().__init__(f"Unknown node id: {node_id}")
        self.node_id = node_id


class RouteStateError(SimulationError):
    """A route entry was asked to make an illegal state transition."""


class ProbeStateError(SimulationError):
    """A probe score was updated after its verdict was fixed."""
