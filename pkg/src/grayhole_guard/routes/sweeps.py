"""
Sweep Routes

This module contains the malicious-ratio sweep endpoint.
"""

from fastapi import APIRouter, HTTPException, Query
from fastapi.responses import PlainTextResponse

from config.settings import settings

from .. import schemas
from ..exceptions import GrayholeGuardError
from ..services import mean_rows, run_sweep, seed_rows, sweep_csv
from .errors import http_error

router = APIRouter(
    prefix="/sweeps",
    tags=["Sweeps"],
)


def _rows(frame) -> list:
    records = frame.astype(object).where(frame.notna(), None).to_dict("records")
    return [schemas.SweepRow(**record) for record in records]


@router.post(
    "/",
    response_model=schemas.SweepResponse,
    summary="Run a ratio sweep",
    description="One run per (ratio, seed) plus per-ratio means; `format=csv` returns the CSV table",
)
def create_sweep(
    request: schemas.SweepRequest,
    format: str = Query("json", pattern="^(json|csv)$"),
):
    """Run a sweep over ratios and seeds."""
    runs = len(request.ratios) * len(request.seeds)
    if runs > settings.MAX_API_SWEEP_RUNS:
        raise HTTPException(
            status_code=422,
            detail=f"{runs} runs requested; the API allows at most {settings.MAX_API_SWEEP_RUNS}",
        )
    try:
        frame = run_sweep(request.config, request.ratios, request.seeds)
    except GrayholeGuardError as e:
        raise http_error(e)

    if format == "csv":
        return PlainTextResponse(sweep_csv(frame), media_type="text/csv")
    return schemas.SweepResponse(rows=_rows(seed_rows(frame)), means=_rows(mean_rows(frame)))
