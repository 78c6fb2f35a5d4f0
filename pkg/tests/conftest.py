import pytest

from resplan.actions import NetworkLane
from resplan.config import AppConfig
from resplan.orchestrator import PlanningEngine


@pytest.fixture
def engine(tmp_path):
    return PlanningEngine(AppConfig(data_dir=tmp_path / "data"))


@pytest.fixture
def network():
    return [
        NetworkLane("l1", 10, 110),
        NetworkLane("l2", 10, 110),
        NetworkLane("l3", 10, 110),
    ]
