from pathlib import Path

import pytest

from src.models.models import Per
from src.services.instance_service import InstanceService

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str):
    return InstanceService.load(FIXTURES / name)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def per_2cls() -> Per:
    return Per(carrier=3, pairs=frozenset({(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)}))


@pytest.fixture
def per_pt() -> Per:
    return Per(carrier=1, pairs=frozenset({(0, 0)}))


@pytest.fixture
def z2_category():
    return load_fixture("category_z2.json")


@pytest.fixture
def arrow_category():
    return load_fixture("category_arrow.json")


class QueryCounter:
    """列挙のステップ関数をくるみ、問い合わせ回数を数える"""

    def __init__(self, step_fn):
        self.step_fn = step_fn
        self.calls = 0

    def __call__(self, k: int):
        self.calls += 1
        return self.step_fn(k)
