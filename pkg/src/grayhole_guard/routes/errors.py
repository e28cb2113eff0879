"""
Error Translation

This module maps domain exceptions onto HTTP errors.
"""

from fastapi import HTTPException

from ..exceptions import ConfigurationError, GrayholeGuardError


def http_error(error: GrayholeGuardError) -> HTTPException:
    """422 for configuration problems, 500 for simulation failures."""
    if isinstance(error, ConfigurationError):
        return HTTPException(status_code=422, detail=str(error))
    return HTTPException(status_code=500, detail=str(error))
