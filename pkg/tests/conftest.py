import pytest

from pygengamma.config import load_defaults
from pygengamma.quadcore import QuadConfig


@pytest.fixture
def cfg():
    return QuadConfig(rel_tol=1e-10)


@pytest.fixture
def defaults(monkeypatch):
    monkeypatch.delenv("G2G_DEFAULTS", raising=False)
    return load_defaults()
