from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from config import Config  # noqa: E402
from groups.catalog import catalog, catalog_extension  # noqa: E402
from lib.extension import build_context  # noqa: E402

# testes nunca usam o cache em disco do usuário
Config.CACHE_DIR = None
Config.PROGRESS = False


@pytest.fixture(autouse=True)
def _isolated_settings(monkeypatch):
    monkeypatch.setattr(Config, "CACHE_DIR", None)
    monkeypatch.setattr(Config, "PROGRESS", False)


@pytest.fixture(scope="session")
def z1():
    return catalog("Zn", {"n": 1})


@pytest.fixture(scope="session")
def z2():
    return catalog("Zn", {"n": 2})


@pytest.fixture(scope="session")
def f2():
    return catalog("Free")


@pytest.fixture(scope="session")
def heisenberg():
    return catalog("Heisenberg")


@pytest.fixture(scope="session")
def bs12():
    return catalog("BS1m", {"m": 2})


@pytest.fixture(scope="session")
def lamplighter():
    return catalog("Lamplighter")


@pytest.fixture(scope="session")
def torus():
    return catalog("ZsdZ2")


@pytest.fixture(scope="session")
def heisenberg_ctx(heisenberg):
    """Heisenberg → ℤ², seção BFS até raio 8."""
    return build_context(catalog_extension(heisenberg), 8)


@pytest.fixture(scope="session")
def bs_ctx(bs12):
    return build_context(catalog_extension(bs12), 8)


@pytest.fixture(scope="session")
def torus_ctx(torus):
    return build_context(catalog_extension(torus), 6)
