from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, settings

from iterated_shimura import forms

settings.register_profile("repo", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def delta():
    return forms.delta(60)


@pytest.fixture(scope="session")
def omega_delta(delta):
    return forms.OmegaForm.closure(forms.letters(delta, [1, 11]))


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE: dict = {}


def record(n: int, ok: bool, detail: str):
    """Store and print the PASS/FAIL line of one acceptance criterion."""
    line = "criterion %2d: %s  %s" % (n, "PASS" if ok else "FAIL", detail)
    ACCEPTANCE[n] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
