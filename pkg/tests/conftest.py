from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from marine_reserves.params import BioParams, DiffusionSpec, EconParams

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

_ACCEPTANCE: list[str] = []


@pytest.fixture
def base_bio() -> BioParams:
    return BioParams(r1=0.4, r2=0.05, alpha=0.5, r=0.28739)


@pytest.fixture
def base_econ() -> EconParams:
    # p = 0.3 reverse-engineered from the reported global equilibrium
    return EconParams(p=0.3, q=2.0, c=0.15, delta=0.05)


@pytest.fixture
def theta20_econ() -> EconParams:
    return EconParams(p=1.5, q=2.0, c=0.15, delta=0.05)


@pytest.fixture
def lam20() -> DiffusionSpec:
    return DiffusionSpec.constant(20.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else ""))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
