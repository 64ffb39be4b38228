"""Spectral concentration of extensive observables in evolved product states.

Tools to measure how the spectrum of an extensive one-local observable
A = sum_i a_i (||a_i|| = 1, one term per site) concentrates in a state
that started as a product state and evolved for a short time:

- ``tail_profile``: upper-tail weights ||P_{>= <A> + R} psi|| over a grid
  of offsets R;
- ``band_matrix``: block norms of an evolved one-local Hamiltonian
  between eigenvalue windows of A, the tight-binding picture behind the
  concentration bound;
- ``topo_error_estimate``: sampled distinguishability of two states by
  weight-q Pauli probes;
- ``fit_tail_constants``: least-squares constants for the analytic tail
  shape c1 * exp(-R / (c2 * r_t * sqrt(t * N))) (fitted, never asserted).

Eigenvalue comparisons use a spectral tolerance of 1e-9 so that exact
integer spectra survive floating-point eigensolvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import BoundParams
from .errors import DomainError, ValidationError
from .oracle import (
    N_MAX_STATE,
    DenseOperator,
    EigenSystem,
    apply_pauli_string,
    spectral_norm,
    to_dense,
)
from .pauli import KLocalOperator, PauliString, Term

__all__ = [
    "SPECTRAL_TOL",
    "ExtensiveObservable",
    "TailProfile",
    "BandMatrix",
    "TopoErrorEstimate",
    "build_product_state",
    "evolve_product_state",
    "tail_profile",
    "band_matrix",
    "topo_error_estimate",
    "fit_tail_constants",
]

SPECTRAL_TOL = 1e-9

_NAMED_SITE_STATES = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    "-": np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0),
    "r": np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2.0),
    "l": np.array([1.0, -1.0j], dtype=complex) / math.sqrt(2.0),
}


class ExtensiveObservable:
    """A = sum_i a_i with exactly one unit-norm single-site term per site.

    Holds the dense matrix and its eigendecomposition so repeated tail
    and band queries are cheap.  Eigenvalues always lie in [-N, N].
    """

    def __init__(self, site_terms: Sequence[Term], n_sites: int, n_max: int = N_MAX_STATE):
        if len(site_terms) != n_sites:
            raise ValidationError(
                f"need one site term per site: got {len(site_terms)} for {n_sites} sites"
            )
        seen = set()
        for term in site_terms:
            if term.weight != 1:
                raise ValidationError(f"site term {term} is not single-site")
            if abs(term.norm - 1.0) > 1e-12:
                raise ValidationError(f"site term {term} does not have unit norm")
            seen.add(term.support[0])
        if seen != set(range(n_sites)):
            raise ValidationError("site terms must cover every site exactly once")
        self.n_sites = n_sites
        self.site_terms = tuple(site_terms)
        op = KLocalOperator.from_terms(n_sites, site_terms)
        self.operator = op
        self.dense = to_dense(op, n_max=n_max)
        eig = EigenSystem(self.dense)
        self.eigenvalues = eig.eigenvalues
        self.eigenvectors = eig.eigenvectors
        if np.min(self.eigenvalues) < -n_sites - 1e-9 or np.max(self.eigenvalues) > n_sites + 1e-9:
            raise ValidationError("extensive observable spectrum escaped [-N, N]")

    @classmethod
    def collective(cls, n_sites: int, axis: str = "z", n_max: int = N_MAX_STATE) -> "ExtensiveObservable":
        """A = sum_i sigma_i^axis."""
        letter = {"x": "X", "y": "Y", "z": "Z"}.get(axis.lower())
        if letter is None:
            raise ValidationError(f"axis must be x, y or z, got {axis!r}")
        terms = [
            Term(PauliString.from_letters(n_sites, {i: letter}), 1.0 + 0j)
            for i in range(n_sites)
        ]
        return cls(terms, n_sites, n_max=n_max)

    def expectation(self, psi: np.ndarray) -> float:
        return float(np.real(np.vdot(psi, self.dense.matrix @ psi)))


def build_product_state(site_states: str | Sequence, n_sites: int | None = None) -> np.ndarray:
    """Assemble a product state from named site states or 2-vectors.

    ``site_states`` is either a string over ``0 1 + - r l`` (one char per
    site) or a sequence of per-site length-2 vectors; every site state
    must be normalized to within 1e-10.
    """
    if isinstance(site_states, str):
        try:
            vectors = [_NAMED_SITE_STATES[ch] for ch in site_states]
        except KeyError as exc:
            raise ValidationError(
                f"unknown site state {exc.args[0]!r}; use one of {sorted(_NAMED_SITE_STATES)}"
            ) from None
    else:
        vectors = [np.asarray(v, dtype=complex).reshape(-1) for v in site_states]
    if n_sites is not None and len(vectors) != n_sites:
        raise ValidationError(f"got {len(vectors)} site states for {n_sites} sites")
    for i, v in enumerate(vectors):
        if v.shape != (2,):
            raise ValidationError(f"site state {i} is not a 2-vector")
        if abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise ValidationError(f"site state {i} is not normalized")
    acc = np.ones(1, dtype=complex)
    for v in reversed(vectors):
        acc = np.kron(acc, v)
    return acc


def evolve_product_state(
    hamiltonian: KLocalOperator | DenseOperator,
    site_states: str | Sequence,
    t: float,
    n_max: int = N_MAX_STATE,
) -> np.ndarray:
    """exp(-iHt) applied to a product state, exactly."""
    h_dense = to_dense(hamiltonian, n_max=n_max)
    psi = build_product_state(site_states, n_sites=h_dense.n_sites)
    return EigenSystem(h_dense).evolve_state(psi, t)


@dataclass(frozen=True)
class TailProfile:
    """Upper-tail weights tail(R) = ||P_{>= mean + R} psi|| on a grid of R."""

    mean: float
    samples: tuple[tuple[float, float], ...]

    def tail(self, r: float) -> float:
        for rr, tt in self.samples:
            if rr == r:
                return tt
        raise KeyError(f"R={r} not in the profile grid")


def tail_profile(
    psi: np.ndarray,
    observable: ExtensiveObservable,
    r_grid: Sequence[float] | None = None,
) -> TailProfile:
    """Tail weights of ``observable`` in state ``psi``.

    The default grid is integer offsets 0, 1, ..., up to the distance
    from ceil(<A>) to the top of the spectrum at N.  Projector membership
    uses the spectral tolerance, so exact integer spectra behave exactly.
    """
    dim = 2**observable.n_sites
    if psi.shape != (dim,):
        raise ValidationError(f"state shape {psi.shape} does not match {observable.n_sites} sites")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValidationError("state is not normalized")
    amps = observable.eigenvectors.conj().T @ psi
    weights = np.abs(amps) ** 2
    mean = float(np.real(np.vdot(psi, observable.dense.matrix @ psi)))
    if r_grid is None:
        top = observable.n_sites
        r_grid = list(range(0, max(int(math.floor(top - mean)), 0) + 1))
    samples = []
    for r in r_grid:
        mask = observable.eigenvalues >= mean + r - SPECTRAL_TOL
        samples.append((float(r), float(math.sqrt(max(np.sum(weights[mask]), 0.0)))))
    return TailProfile(mean=mean, samples=tuple(samples))


@dataclass(frozen=True)
class BandMatrix:
    """Block norms of an operator between eigenvalue bins of A.

    Bin x covers eigenvalues in [-N + x*w, -N + (x+1)*w); entry (x, x')
    is the spectral norm of the corresponding operator block.
    """

    bin_width: float
    anchor: float
    norms: np.ndarray
    occupancy: np.ndarray

    @property
    def n_bins(self) -> int:
        return self.norms.shape[0]


def band_matrix(
    op: KLocalOperator | DenseOperator,
    observable: ExtensiveObservable,
    bin_width: float,
    n_max: int = N_MAX_STATE,
) -> BandMatrix:
    """Block norms ||P_x op P_x'|| between eigenvalue bins of ``observable``.

    Bins are anchored at the bottom of the spectrum (-N) and have width
    ``bin_width``; a commuting pair (op diagonal in the A eigenbasis)
    yields a diagonal band matrix.
    """
    if bin_width <= 0:
        raise DomainError(f"bin_width must be positive, got {bin_width}")
    dense = to_dense(op, n_max=n_max)
    if dense.n_sites != observable.n_sites:
        raise ValidationError(
            f"operator on {dense.n_sites} sites, observable on {observable.n_sites}"
        )
    n = observable.n_sites
    anchor = -float(n)
    idx = np.floor((observable.eigenvalues - anchor) / bin_width + SPECTRAL_TOL).astype(int)
    n_bins = int(math.floor(2 * n / bin_width)) + 1
    idx = np.clip(idx, 0, n_bins - 1)
    rotated = observable.eigenvectors.conj().T @ dense.matrix @ observable.eigenvectors
    norms = np.zeros((n_bins, n_bins))
    occupancy = np.zeros(n_bins, dtype=bool)
    members = [np.flatnonzero(idx == b) for b in range(n_bins)]
    for b, rows in enumerate(members):
        occupancy[b] = rows.size > 0
    for bx, rows in enumerate(members):
        if rows.size == 0:
            continue
        for by, cols in enumerate(members):
            if cols.size == 0:
                continue
            norms[bx, by] = spectral_norm(rotated[np.ix_(rows, cols)])
    return BandMatrix(bin_width=bin_width, anchor=anchor, norms=norms, occupancy=occupancy)


@dataclass(frozen=True)
class TopoErrorEstimate:
    """Sampled distinguishability of two states under weight-q probes.

    Probes are uniformly random weight-q Pauli strings scaled to norm q
    (coefficient magnitude q, random phase).  ``diag_max`` tracks
    |<psi|P|psi> - <phi|P|phi>| and ``cross_max`` tracks |<psi|P|phi>|;
    ``eps_hat`` is the larger of the two.  ``eps_hat_unit`` rescales to
    unit-norm probes.
    """

    q: int
    n_samples: int
    seed: int
    diag_max: float
    cross_max: float

    @property
    def eps_hat(self) -> float:
        return max(self.diag_max, self.cross_max)

    @property
    def eps_hat_unit(self) -> float:
        return self.eps_hat / self.q


def topo_error_estimate(
    psi: np.ndarray,
    phi: np.ndarray,
    q: int,
    n_samples: int = 200,
    seed: int = 0,
) -> TopoErrorEstimate:
    """Probe two states with random weight-q Pauli strings of norm q."""
    if psi.shape != phi.shape or psi.ndim != 1:
        raise ValidationError(f"state shapes {psi.shape} and {phi.shape} do not match")
    n_sites = int(round(math.log2(psi.shape[0])))
    if 2**n_sites != psi.shape[0]:
        raise ValidationError(f"state length {psi.shape[0]} is not a power of two")
    if not 1 <= q <= n_sites:
        raise DomainError(f"probe weight q must be in [1, {n_sites}], got {q}")
    if n_samples < 1:
        raise DomainError(f"n_samples must be positive, got {n_samples}")
    rng = np.random.default_rng(seed)
    diag_max = 0.0
    cross_max = 0.0
    for _ in range(n_samples):
        sites = rng.choice(n_sites, size=q, replace=False)
        letters = {int(s): "XYZ"[int(i)] for s, i in zip(sites, rng.integers(0, 3, size=q))}
        string = PauliString.from_letters(n_sites, letters)
        coeff = q * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        probe_psi = coeff * apply_pauli_string(string, psi)
        probe_phi = coeff * apply_pauli_string(string, phi)
        diag = abs(np.vdot(psi, probe_psi) - np.vdot(phi, probe_phi))
        cross = abs(np.vdot(psi, probe_phi))
        diag_max = max(diag_max, float(diag))
        cross_max = max(cross_max, float(cross))
    return TopoErrorEstimate(
        q=q, n_samples=n_samples, seed=seed, diag_max=diag_max, cross_max=cross_max
    )


def fit_tail_constants(
    profile: TailProfile,
    params: BoundParams,
    t: float,
    n_sites: int,
) -> tuple[float, float]:
    """Least-squares fit of tail(R) ~ c1 * exp(-R / (c2 * r_t * sqrt(t*N))).

    Only samples with strictly positive tail weight enter the fit.  The
    constants are descriptive (reported, never asserted); requires at
    least two usable samples and t > 0.
    """
    if t <= 0:
        raise DomainError(f"fit requires t > 0, got {t}")
    scale = params.r_t(t) * math.sqrt(t * n_sites)
    rs = np.array([r for r, tail in profile.samples if tail > 0.0])
    logs = np.array([math.log(tail) for _, tail in profile.samples if tail > 0.0])
    if rs.size < 2:
        raise DomainError("need at least two positive tail samples to fit")
    slope, intercept = np.polyfit(rs, logs, 1)
    if slope >= 0:
        # non-decaying profile: report an infinite decay length
        return float(math.exp(intercept)), math.inf
    c1 = float(math.exp(intercept))
    c2 = float(-1.0 / (slope * scale))
    return c1, c2
