import pytest

from ncsym.algebra import IndexedAlgebra
from ncsym.instances import preset
from ncsym.tilting import Tilting

PRESET_NAMES = {
    "k2": "kronecker2",
    "q2": "kronecker2 p=0",
    "k3": "kronecker3",
    "fe": "field-extension p=2 d=4",
    "k1": "kronecker1",
}

_cache = {}


def instance(key):
    """(config, algebra, tilting) for a named instance, shared across the session."""
    if key not in _cache:
        cfg = preset(PRESET_NAMES[key])
        S = IndexedAlgebra(cfg.bimodule, cfg.witness)
        _cache[key] = (cfg, S, Tilting(S) if not cfg.degenerate else None)
    return _cache[key]


@pytest.fixture(scope="session")
def k2():
    return instance("k2")


@pytest.fixture(scope="session")
def q2():
    return instance("q2")


@pytest.fixture(scope="session")
def k3():
    return instance("k3")


@pytest.fixture(scope="session")
def fe():
    return instance("fe")


@pytest.fixture(scope="session")
def k1():
    return instance("k1")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("NCSYM_CACHE", str(tmp_path / "cache"))
