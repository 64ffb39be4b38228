"""Shared fixtures and random-instance generators."""

from __future__ import annotations

import numpy as np
import pytest

from klocal.pauli import KLocalOperator, PauliString

_LETTERS = "XYZ"


def random_pauli_string(rng: np.random.Generator, n_sites: int, max_weight: int | None = None) -> PauliString:
    """Uniform random non-identity string of weight <= max_weight."""
    cap = n_sites if max_weight is None else min(max_weight, n_sites)
    weight = int(rng.integers(1, cap + 1))
    sites = rng.choice(n_sites, size=weight, replace=False)
    letters = {int(s): _LETTERS[int(rng.integers(0, 3))] for s in sites}
    return PauliString.from_letters(n_sites, letters)


def random_operator(
    rng: np.random.Generator,
    n_sites: int,
    n_terms: int,
    max_weight: int | None = None,
    complex_coeffs: bool = False,
) -> KLocalOperator:
    """Random Hermitian-coefficient operator (real coefficients by default)."""
    acc: dict[PauliString, complex] = {}
    for _ in range(n_terms):
        string = random_pauli_string(rng, n_sites, max_weight)
        coeff = rng.uniform(-1.0, 1.0) + (1j * rng.uniform(-1.0, 1.0) if complex_coeffs else 0.0)
        acc[string] = acc.get(string, 0j) + coeff
    op = KLocalOperator(n_sites, acc)
    if op.is_zero:  # absurdly unlikely; retry deterministically
        return random_operator(rng, n_sites, n_terms, max_weight, complex_coeffs)
    return op


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


@pytest.fixture
def acceptance_report(request):
    """Collect one-line acceptance results; printed in a terminal-summary
    section so they are visible even with output capture enabled."""

    def emit(line: str) -> None:
        lines = getattr(request.config, "_acceptance_lines", None)
        if lines is None:
            lines = []
            request.config._acceptance_lines = lines
        lines.append(line)

    return emit


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def tfi_chain():
    """Nearest-neighbour transverse-field Ising chain on 4 sites (k=2, g=3)."""
    acc: dict[PauliString, complex] = {}
    for i in range(3):
        acc[PauliString.from_letters(4, {i: "Z", i + 1: "Z"})] = 1.0 + 0j
    for i in range(4):
        acc[PauliString.from_letters(4, {i: "X"})] = 1.0 + 0j
    return KLocalOperator(4, acc)
