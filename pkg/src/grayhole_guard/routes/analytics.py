"""
Analytics Routes

This module contains averages over the stored runs.
"""

from typing import List

from fastapi import APIRouter, Depends
from sqlalchemy.orm import Session

from .. import crud, schemas
from ..database import get_db

router = APIRouter(
    prefix="/analytics",
    tags=["Analytics"],
)


@router.get(
    "/summary",
    response_model=List[schemas.SummaryRow],
    summary="Average metrics per ratio",
    description="Mean FPR, FNR, DR, PDR and delay of stored runs grouped by malicious ratio and defense flag",
)
async def get_summary(db: Session = Depends(get_db)):
    """Averages of stored runs."""
    return crud.get_summary(db)
