import pytest

from app.config import activate, settings
from app.schemas.arith import ArithFunctionId
from app.schemas.numeric import PrecisionContext
from app.services import arith


@pytest.fixture(autouse=True)
def restore_settings():
    """Commands rewrite the shared settings; put them back after every test"""
    saved = settings.model_copy()
    yield
    activate(saved)


@pytest.fixture
def pc128():
    return PrecisionContext(bits=128)


@pytest.fixture
def pc256():
    return PrecisionContext(bits=256)


@pytest.fixture(scope="session")
def mobius_table():
    return arith.sieve(ArithFunctionId.MOBIUS, 10 ** 5, prefix_sums=True)


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / "out"
    path.mkdir()
    return path
