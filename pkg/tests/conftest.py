"""Shared fixtures and the acceptance-criteria terminal summary."""

import re

import numpy as np
import pytest

import irpeuler as ie

#: runtime budgets (seconds) for the numbered acceptance criteria
ACCEPTANCE_BUDGETS = {
    1: 1.0,
    2: 5.0,
    3: 30.0,
    4: 60.0,
    5: 30.0,
    6: 30.0,
    7: 30.0,
    8: 30.0,
    9: 5.0,
}

TAIT_KW = dict(
    K_r=10.0, v_r=1.0, p_r=1.0, s_r=0.0, e_r=1.0, theta_r=1.0, C=1.0, D=0.5
)


@pytest.fixture
def poly_eos():
    return ie.PolytropicEos(ie.PolytropicParams(gamma0=1.4))


@pytest.fixture
def tait_eos():
    return ie.TaitEos(ie.TaitParams(nu=2.0, **TAIT_KW))


@pytest.fixture
def tait_eos_nu1():
    return ie.TaitEos(ie.TaitParams(nu=1.0, **TAIT_KW))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


# -- acceptance summary --------------------------------------------------------

_results = {}
_CRITERION = re.compile(r"test_criterion_(\d+)")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or "test_acceptance.py" not in item.nodeid:
        return
    match = _CRITERION.match(item.name)
    if not match:
        return
    number = int(match.group(1))
    elapsed = dict(report.user_properties).get("elapsed_s", report.duration)
    verdict = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
    _results[number] = (verdict, float(elapsed))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        verdict, elapsed = _results[number]
        budget = ACCEPTANCE_BUDGETS.get(number, float("nan"))
        terminalreporter.write_line(
            f"[acceptance] criterion {number}: {verdict} "
            f"({elapsed:.2f} s / budget {budget:g} s)"
        )
