"""
Scenario Routes

This module lists the built-in scenario presets.
"""

from typing import List

from fastapi import APIRouter, HTTPException

from .. import schemas
from ..services import SCENARIO_PRESETS, preset_config

router = APIRouter(
    prefix="/scenarios",
    tags=["Scenarios"],
    responses={404: {"description": "Scenario not found"}},
)


@router.get(
    "/",
    response_model=List[schemas.ScenarioSummary],
    summary="List scenarios",
)
async def list_scenarios():
    """All built-in presets with their configuration."""
    return [
        schemas.ScenarioSummary(name=name, description=description, config=preset_config(name))
        for name, (description, _) in SCENARIO_PRESETS.items()
    ]


@router.get(
    "/{name}",
    response_model=schemas.ScenarioSummary,
    summary="Get scenario",
)
async def get_scenario(name: str):
    """One preset by name."""
    if name not in SCENARIO_PRESETS:
        raise HTTPException(status_code=404, detail="Scenario not found")
    return schemas.ScenarioSummary(
        name=name, description=SCENARIO_PRESETS[name][0], config=preset_config(name)
    )
