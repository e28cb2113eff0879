"""
System Routes

This module contains API information and system endpoints.
"""

from fastapi import APIRouter, Depends
from sqlalchemy import text
from sqlalchemy.orm import Session

from config.settings import settings

from ..database import get_db

router = APIRouter(
    tags=["System"],
    responses={404: {"description": "Not found"}},
)


@router.get(
    "/",
    summary="API Information",
    description="Get information about the API and available endpoints",
)
async def root():
    """Get API information and available endpoints."""
    return {
        "message": f"Welcome to {settings.APP_NAME}!",
        "version": settings.APP_VERSION,
        "status": "running",
        "endpoints": {
            "simulations": "/simulations",
            "sweeps": "/sweeps",
            "analytics": "/analytics/summary",
            "scenarios": "/scenarios",
            "system": "/health",
            "documentation": "/docs",
        },
    }


@router.get(
    "/health",
    summary="Health Check",
    description="Check if the API and the run ledger are reachable",
)
async def health_check(db: Session = Depends(get_db)):
    """Check API health status."""
    db.execute(text("SELECT 1"))
    return {"status": "healthy", "database": "connected", "version": settings.APP_VERSION}
