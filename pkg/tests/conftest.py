"""
Pytest Configuration

This module contains pytest fixtures and configuration for testing.
"""

import pytest
from fastapi.testclient import TestClient
from sqlalchemy.orm import sessionmaker

from src.grayhole_guard.database import Base, get_db, make_ledger_engine
from src.grayhole_guard.main import app
from src.grayhole_guard.network import Network
from src.grayhole_guard.recorders import RunRecorder
from src.grayhole_guard.schemas import ScenarioConfig, TrafficConfig

# Test database URL
TEST_DATABASE_URL = "sqlite:///./test_grayhole_guard.db"

# Create test engine
test_engine = make_ledger_engine(TEST_DATABASE_URL)

# Create test session
TestingSessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=test_engine)


@pytest.fixture(scope="session")
def test_db():
    """Create test database tables."""
    Base.metadata.create_all(bind=test_engine)
    yield
    Base.metadata.drop_all(bind=test_engine)


@pytest.fixture
def db_session(test_db):
    """Create a fresh database session for each test."""
    connection = test_engine.connect()
    transaction = connection.begin()
    session = TestingSessionLocal(bind=connection)

    yield session

    session.close()
    transaction.rollback()
    connection.close()


@pytest.fixture
def client(db_session):
    """Create a test client with database dependency override."""

    def override_get_db():
        try:
            yield db_session
        finally:
            pass

    app.dependency_overrides[get_db] = override_get_db
    with TestClient(app) as test_client:
        yield test_client
    app.dependency_overrides.clear()


@pytest.fixture
def small_config():
    """A random-placement scenario that runs in well under a second."""
    return ScenarioConfig(
        name="small",
        node_count=20,
        area=(60.0, 60.0),
        malicious_ratio=0.1,
        sim_time_s=3.0,
        seed=7,
        traffic=TrafficConfig(flows=3, start_window_ms=200),
    )


def layout_network(layout, seed=1, sim_time_s=10.0, recorder=None, **overrides):
    """Network for a scripted layout, with every artifact recorded by default."""
    config = ScenarioConfig(
        name=layout.name,
        node_count=len(layout.positions),
        seed=seed,
        sim_time_s=sim_time_s,
        **overrides,
    )
    recorder = recorder or RunRecorder(
        trace=True, probes=True, detections=True, quarantine=True, tables=True
    )
    return Network(layout.topology(), layout.all_behaviors(), layout.flows, config, recorder)


@pytest.fixture
def build_layout_network():
    """Factory fixture around layout_network."""
    return layout_network
