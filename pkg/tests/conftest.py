import numpy as np
import pytest

from closurebisim.generators import random_model
from closurebisim.io import load_fixture

FIGURES = ("fig2", "fig3", "fig4", "fig6", "fig8", "fig10")


@pytest.fixture(scope="session")
def fig():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_fixture(name)
        return cache[name]
    return get


def random_corpus(seed, count, max_points=12, **kw):
    rng = np.random.default_rng(seed)
    return [random_model(rng, max_points=max_points, **kw) for _ in range(count)]


# ------------------------------------------------------------------ acceptance

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    ok = _criteria.get(crit, True)
    if report.when == "call" or report.failed:
        _criteria[crit] = ok and not report.failed


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_criteria):
        terminalreporter.write_line(f"criterion {crit:2d}: {'PASS' if _criteria[crit] else 'FAIL'}")
