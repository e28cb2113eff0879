"""
Simulation Routes

This module contains the endpoints that run a scenario and browse the run
ledger.
"""

from typing import Optional

from fastapi import APIRouter, Depends, HTTPException, Query
from sqlalchemy.orm import Session

from config.settings import settings

from .. import crud, schemas
from ..database import get_db
from ..exceptions import GrayholeGuardError
from ..services import run_scenario
from .errors import http_error

router = APIRouter(
    prefix="/simulations",
    tags=["Simulations"],
    responses={404: {"description": "Simulation not found"}},
)


def _result(db_run) -> schemas.SimulationResult:
    return schemas.SimulationResult(
        uuid=db_run.uuid,
        created_at=db_run.created_at,
        report=schemas.RunReport.model_validate_json(db_run.report),
    )


@router.post(
    "/",
    response_model=schemas.SimulationResult,
    status_code=201,
    summary="Run a simulation",
    description="Run one scenario, store the report in the run ledger and return it",
)
def create_simulation(config: schemas.ScenarioConfig, db: Session = Depends(get_db)):
    """Run and store one simulation."""
    try:
        report = run_scenario(config)
    except GrayholeGuardError as e:
        raise http_error(e)
    return _result(crud.create_run(db, report))


@router.get(
    "/",
    response_model=schemas.SimulationList,
    summary="List simulations",
    description="Paginated list of stored runs, newest first",
)
async def list_simulations(
    page: int = Query(1, ge=1, description="Page number"),
    per_page: int = Query(
        settings.DEFAULT_PAGE_SIZE, ge=1, le=settings.MAX_PAGE_SIZE, description="Items per page"
    ),
    scenario: Optional[str] = Query(None, description="Filter by scenario name"),
    db: Session = Depends(get_db),
):
    """Get paginated list of stored runs."""
    skip = (page - 1) * per_page
    runs = crud.get_runs(db, skip=skip, limit=per_page, scenario=scenario)
    total = crud.get_run_count(db, scenario=scenario)

    return {"items": runs, "total": total, "page": page, "per_page": per_page}


@router.get(
    "/{run_uuid}",
    response_model=schemas.SimulationResult,
    summary="Get simulation by UUID",
)
async def get_simulation(run_uuid: str, db: Session = Depends(get_db)):
    """Get a stored run with its full report."""
    db_run = crud.get_run_by_uuid(db, run_uuid=run_uuid)
    if db_run is None:
        raise HTTPException(status_code=404, detail="Simulation not found")
    return _result(db_run)


@router.delete(
    "/{run_uuid}",
    summary="Delete simulation",
)
async def delete_simulation(run_uuid: str, db: Session = Depends(get_db)):
    """Delete a stored run."""
    if not crud.delete_run(db, run_uuid=run_uuid):
        raise HTTPException(status_code=404, detail="Simulation not found")
    return {"message": "Simulation deleted successfully"}
