"""
CRUD Operations

This module contains database operations for stored simulation runs.
"""

from typing import List, Optional

from sqlalchemy import desc, func
from sqlalchemy.orm import Session

from . import models, schemas


def create_run(db: Session, report: schemas.RunReport) -> models.SimulationRun:
    """Store a run report."""
    db_run = models.SimulationRun(
        scenario=report.scenario,
        seed=report.seed,
        malicious_ratio=report.malicious_ratio,
        defense=report.defense,
        fpr=report.fpr,
        fnr=report.fnr,
        dr=report.dr,
        pdr=report.pdr,
        avg_delay_ms=report.avg_delay_ms,
        convicted=" ".join(str(node_id) for node_id in report.convicted),
        report=report.model_dump_json(),
    )
    db.add(db_run)
    db.commit()
    db.refresh(db_run)
    return db_run


def get_run_by_uuid(db: Session, run_uuid: str) -> Optional[models.SimulationRun]:
    """Get a stored run by UUID."""
    return db.query(models.SimulationRun).filter(models.SimulationRun.uuid == run_uuid).first()


def get_runs(
    db: Session, skip: int = 0, limit: int = 100, scenario: Optional[str] = None
) -> List[models.SimulationRun]:
    """List stored runs, newest first."""
    query = db.query(models.SimulationRun)
    if scenario:
        query = query.filter(models.SimulationRun.scenario == scenario)
    return (
        query.order_by(desc(models.SimulationRun.created_at), desc(models.SimulationRun.id))
        .offset(skip)
        .limit(limit)
        .all()
    )


def get_run_count(db: Session, scenario: Optional[str] = None) -> int:
    query = db.query(models.SimulationRun)
    if scenario:
        query = query.filter(models.SimulationRun.scenario == scenario)
    return query.count()


def delete_run(db: Session, run_uuid: str) -> bool:
    """Delete a stored run."""
    db_run = get_run_by_uuid(db, run_uuid)
    if not db_run:
        return False

    db.delete(db_run)
    db.commit()
    return True


def get_summary(db: Session) -> List[schemas.SummaryRow]:
    """Average metrics of stored runs per (malicious_ratio, defense)."""
    run = models.SimulationRun
    rows = (
        db.query(
            run.malicious_ratio,
            run.defense,
            func.count(run.id),
            func.avg(run.fpr),
            func.avg(run.fnr),
            func.avg(run.dr),
            func.avg(run.pdr),
            func.avg(run.avg_delay_ms),
        )
        .group_by(run.malicious_ratio, run.defense)
        .order_by(run.malicious_ratio, run.defense)
        .all()
    )
    return [
        schemas.SummaryRow(
            malicious_ratio=ratio,
            defense=defense,
            runs=count,
            fpr=avg_fpr,
            fnr=avg_fnr,
            dr=avg_dr,
            pdr=avg_pdr,
            avg_delay_ms=avg_delay,
        )
        for ratio, defense, count, avg_fpr, avg_fnr, avg_dr, avg_pdr, avg_delay in rows
    ]
