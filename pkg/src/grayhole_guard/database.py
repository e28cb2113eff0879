"""
Run Ledger Database

This module contains the engine and session handling of the run ledger,
the store that keeps one row per finished simulation for the API, the
analytics summary and the scenario scripts.
"""

from contextlib import contextmanager
from typing import Iterator, Optional

from sqlalchemy import create_engine, event
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session, sessionmaker

from config.settings import settings

from .base import Base


def make_ledger_engine(url: str) -> Engine:
    """
    Engine for a ledger URL.

    SQLite ledgers run in WAL mode and may be used from any thread, so the
    API and a scenario script can write to the same file.
    """
    if not url.startswith("sqlite"):
        return create_engine(url, pool_pre_ping=True)

    ledger = create_engine(url, connect_args={"check_same_thread": False})

    @event.listens_for(ledger, "connect")
    def _sqlite_pragmas(dbapi_connection, _record):
        cursor = dbapi_connection.cursor()
        cursor.execute("PRAGMA journal_mode=WAL")
        cursor.execute("PRAGMA synchronous=NORMAL")
        cursor.close()

    return ledger


engine = make_ledger_engine(settings.DATABASE_URL)

LedgerSession = sessionmaker(autocommit=False, autoflush=False, bind=engine)


def get_db():
    """
    Ledger session dependency.

    Provides a session for each request and closes it afterwards.
    """
    db = LedgerSession()
    try:
        yield db
    finally:
        db.close()


@contextmanager
def ledger_session(factory: Optional[sessionmaker] = None) -> Iterator[Session]:
    """Session for scripts: committed on success, rolled back on error."""
    db = (factory or LedgerSession)()
    try:
        yield db
        db.commit()
    except Exception:
        db.rollback()
        raise
    finally:
        db.close()


__all__ = ["Base", "engine", "LedgerSession", "get_db", "ledger_session", "make_ledger_engine"]
