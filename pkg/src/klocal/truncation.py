"""Locality-truncated Heisenberg evolution witnesses.

``hadamard_truncate`` builds the series

    W(t) = sum_{m=0}^{m0} (-i t)**m / m! * L_m,      L_m = [H, L_{m-1}],

with m0 = floor((q - q0)/k), which is q-local by construction (each
nesting grows the weight by at most k) and whose exact distance to
gamma(t) is bounded by :func:`klocal.bounds.small_time_rhs` inside the
window |t| < 2/kappa.  ``chained_truncate`` splits larger times into
n = ceil(kappa*|t|) intervals and re-truncates at the locality levels of
:func:`klocal.bounds.q_schedule`, certified by
:func:`klocal.bounds.main_rhs`.

Each nesting level is pruned at ``threshold``; the summed magnitude of
dropped coefficients is reported as ``pruning_budget`` and belongs on
the right-hand side of any certificate involving the witness.  At the
default threshold the dropped terms are cancellation dust far below the
bound values.  Series coefficients are evaluated in the log domain, so
deep series (m0 in the hundreds) neither overflow nor underflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterator

from .bounds import BoundParams, QSchedule, main_rhs, q_schedule, small_time_rhs
from .errors import DomainError, InfeasibleScheduleError, ValidationError
from .pauli import KLocalOperator, commutator

__all__ = [
    "DEFAULT_PRUNE_TOL",
    "TruncationReport",
    "series_coefficient",
    "nested_commutator",
    "nested_commutator_levels",
    "hadamard_truncate",
    "chained_truncate",
]

DEFAULT_PRUNE_TOL = 1e-12


@dataclass(frozen=True)
class TruncationReport:
    """A locality-truncated witness plus its certificate ingredients.

    Attributes:
        witness: the truncated operator, locality <= target_q.
        m0: series order of the (final) truncation step.
        target_q: requested locality ceiling.
        pruning_budget: summed magnitude of pruned coefficients across
            all nesting levels (and all intervals, for chained runs).
        bound_rhs: analytic error bound evaluated with the cheap norm
            proxy ``gamma.norm_upper()``; certificates against the exact
            operator norm should re-evaluate the bound with it.
        schedule: locality schedule for chained runs, None otherwise.
    """

    witness: KLocalOperator
    m0: int
    target_q: int
    pruning_budget: float
    bound_rhs: float
    schedule: QSchedule | None = None


def series_coefficient(t: float, m: int) -> complex:
    """(-i t)**m / m! evaluated stably in the log domain."""
    if m < 0:
        raise DomainError(f"series order must be nonnegative, got {m}")
    if m == 0:
        return 1.0 + 0.0j
    if t == 0.0:
        return 0.0j
    log_mag = m * math.log(abs(t)) - math.lgamma(m + 1)
    if log_mag < -745.0:
        return 0.0j
    mag = math.exp(log_mag)
    phase = (-1j if t > 0 else 1j) ** (m & 3)
    return mag * phase


def nested_commutator_levels(
    hamiltonian: KLocalOperator,
    gamma: KLocalOperator,
    max_m: int,
    threshold: float = DEFAULT_PRUNE_TOL,
) -> Iterator[tuple[int, KLocalOperator, float]]:
    """Yield (m, L_m, dropped_m) for m = 0..max_m with per-level pruning.

    Stops early once a level vanishes (all later levels are zero too).
    """
    if hamiltonian.n_sites != gamma.n_sites:
        raise ValidationError(
            f"operators on {hamiltonian.n_sites} and {gamma.n_sites} sites"
        )
    level = gamma
    yield 0, level, 0.0
    for m in range(1, max_m + 1):
        level = commutator(hamiltonian, level)
        level, dropped = level.prune(threshold)
        yield m, level, dropped
        if level.is_zero:
            return


def nested_commutator(
    hamiltonian: KLocalOperator,
    gamma: KLocalOperator,
    m: int,
    threshold: float = DEFAULT_PRUNE_TOL,
) -> tuple[KLocalOperator, float]:
    """m-fold nested commutator [H, [H, ... [H, gamma]]] with pruning.

    Returns the final level and the total dropped magnitude.  m = 0
    returns gamma itself.  Each nesting raises locality by at most the
    interaction degree of H.
    """
    if m < 0:
        raise DomainError(f"nesting depth must be nonnegative, got {m}")
    total_dropped = 0.0
    result = gamma
    for level_m, level, dropped in nested_commutator_levels(hamiltonian, gamma, m, threshold):
        total_dropped += dropped
        result = level
        if level_m == m:
            break
    else:
        # generator stopped early on a vanished level
        result = KLocalOperator.zero(gamma.n_sites)
    return result, total_dropped


def _resolve_params(hamiltonian: KLocalOperator, params: BoundParams | None) -> BoundParams:
    return params if params is not None else BoundParams.from_operator(hamiltonian)


def hadamard_truncate(
    hamiltonian: KLocalOperator,
    gamma: KLocalOperator,
    t: float,
    q: int,
    threshold: float = DEFAULT_PRUNE_TOL,
    params: BoundParams | None = None,
) -> TruncationReport:
    """Single-window q-local witness for gamma(t).

    Requires |t| < 2/kappa and q >= locality(gamma).  The witness is
    exact at t = 0 and its locality never exceeds q.
    """
    if q < 1:
        raise DomainError(f"target locality q must be positive, got {q}")
    params = _resolve_params(hamiltonian, params)
    q0 = gamma.locality
    if q < q0:
        raise InfeasibleScheduleError(
            f"target locality q={q} below the locality {q0} of gamma"
        )
    if params.kappa > 0 and abs(t) >= 2.0 / params.kappa:
        raise DomainError(
            f"|t|={abs(t)} outside the series window |t| < 2/kappa = {2.0 / params.kappa}"
        )
    m0 = (q - q0) // params.k
    witness = gamma
    budget = 0.0
    for m, level, dropped in nested_commutator_levels(hamiltonian, gamma, m0, threshold):
        budget += dropped
        if m == 0:
            continue
        coeff = series_coefficient(t, m)
        if coeff != 0j:
            witness = witness + coeff * level
    assert witness.locality <= q, "nesting exceeded the locality budget"
    bound = small_time_rhs(params, q0, q, abs(t), gamma.norm_upper())
    return TruncationReport(
        witness=witness, m0=m0, target_q=q, pruning_budget=budget, bound_rhs=bound
    )


def chained_truncate(
    hamiltonian: KLocalOperator,
    gamma: KLocalOperator,
    t: float,
    q: int,
    threshold: float = DEFAULT_PRUNE_TOL,
    params: BoundParams | None = None,
) -> TruncationReport:
    """Multi-interval q-local witness for gamma(t).

    The time is split into n = ceil(kappa*|t|) equal intervals (each
    inside the series window) and the witness is re-truncated after each
    interval at the locality levels of :func:`klocal.bounds.q_schedule`.
    Requires q >= 2**n * locality(gamma).
    """
    params = _resolve_params(hamiltonian, params)
    q0 = gamma.locality
    n = params.intervals(t)
    if q < 2**n * q0:
        raise InfeasibleScheduleError(
            f"target locality q={q} infeasible: need q >= 2**n * q0 = {2**n * q0} "
            f"(q0={q0}, n={n})"
        )
    schedule = q_schedule(q0, q, n)
    dt = t / n
    witness = gamma
    budget = 0.0
    m0 = 0
    for level_q in schedule.levels:
        step = hadamard_truncate(hamiltonian, witness, dt, level_q, threshold, params)
        witness = step.witness
        budget += step.pruning_budget
        m0 = step.m0
    bound = main_rhs(params, q0, q, t, gamma.norm_upper())
    return TruncationReport(
        witness=witness,
        m0=m0,
        target_q=q,
        pruning_budget=budget,
        bound_rhs=bound,
        schedule=schedule,
    )
