import functools
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bracketgrowth.algebra import build_classical
from bracketgrowth.extremal import build_extremal_basis
from bracketgrowth.kernel import gf


@functools.lru_cache(maxsize=None)
def classical(kind, n, p, k=1, **kw):
    return build_classical(kind, n, gf(p, k), **kw)


@functools.lru_cache(maxsize=None)
def extremal(kind, n, p):
    return build_extremal_basis(classical(kind, n, p))


def vec(g, **coeffs):
    """Element from basis names, e.g. vec(g, e12=1, h1=2)."""
    v = np.zeros(g.dim, dtype=np.int64)
    for name, c in coeffs.items():
        v[g.names.index(name)] = c % g.ctx.p
    return v


@pytest.fixture
def sl2_5():
    return classical("sl", 2, 5)


@pytest.fixture
def sl2_11():
    return classical("sl", 2, 11)


# acceptance criteria report ------------------------------------------------------

_ACCEPTANCE = pytest.StashKey[dict]()

CRITERIA = {
    1: "identity suite",
    2: "dimension table",
    3: "simplicity",
    4: "extremal certification",
    5: "extremal identity on g2(F_7)",
    6: "escape suite",
    7: "Olson dichotomy",
    8: "dimensional estimate",
    9: "descent to one dimension",
    10: "sum-product theorems",
    11: "growth engine vs oracle",
    12: "diameter family",
}


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def criterion(request):
    """record(n, ok, detail) stores one acceptance line for the summary."""
    store = request.config.stash[_ACCEPTANCE]

    def record(n, ok, detail):
        store[n] = (bool(ok), detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash[_ACCEPTANCE]
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        ok, detail = store.get(n, (False, "not run or raised before reporting"))
        terminalreporter.write_line(f"criterion {n:2d} ({title}): {'PASS' if ok else 'FAIL'} - {detail}")
