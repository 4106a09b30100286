import numpy as np
import pytest

from sgtraffic.gpc import build_haar_basis, compute_triple_products
from sgtraffic.physics import PhysicsParams


def haar_phi(i, xi):
    """Direct formula: phi_0 = 1, phi_{2^l + k} = 2^(l/2) (+1 | -1) on the halves of cell k."""
    xi = np.asarray(xi, dtype=float)
    if i == 0:
        return np.ones_like(xi)
    lev = int(np.floor(np.log2(i)))
    k = i - 2 ** lev
    left, mid, right = k / 2 ** lev, (k + 0.5) / 2 ** lev, (k + 1) / 2 ** lev
    return 2 ** (lev / 2) * (((xi >= left) & (xi < mid)) * 1.0 - ((xi >= mid) & (xi < right)) * 1.0)


@pytest.fixture(scope="session")
def tensors():
    """Bases and triple-product tensors for levels 0..6, built once."""
    return {L: compute_triple_products(build_haar_basis(L)) for L in range(7)}


@pytest.fixture
def params():
    return PhysicsParams()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and report.passed:
        return
    number, text = mark.args
    ok = report.passed and report.when == "call"
    prev = item.config._criteria.get(number, (True, text))[0]
    item.config._criteria[number] = (prev and ok, text)


def pytest_terminal_summary(terminalreporter, config):
    if not config._criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(config._criteria):
        ok, text = config._criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}")
