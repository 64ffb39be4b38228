"""Command line interface.

Subcommands:

- ``constants``: structural constants and derived bound parameters.
- ``bound``: evaluate any analytic bound over a small parameter grid.
- ``truncate``: build a locality-truncated witness, with oracle error
  when the instance is small enough.
- ``decompose``: discretize and pack into disjoint-support layers.
- ``verify``: run the certification suite on one instance.
- ``concentrate``: tail profile and band matrix of an evolved product
  state.

Reports are deterministic for a fixed config and seed (no timestamps;
the input file enters via its SHA-256).  Exit codes: 0 success, 1 bound
violation, 2 invalid input or parameters, 3 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .bounds import (
    BoundParams,
    band_rhs,
    delta_value,
    main_rhs,
    small_time_rhs,
    theorem1_rhs,
    topo_error_rhs,
)
from .concentration import (
    ExtensiveObservable,
    band_matrix,
    build_product_state,
    evolve_product_state,
    fit_tail_constants,
    tail_profile,
    topo_error_estimate,
)
from .errors import (
    DomainError,
    InfeasibleScheduleError,
    KLocalError,
    ResourceLimitError,
    ValidationError,
)
from .layers import discretize, pack_layers, reconstruct
from .models import load_spec, structural_constants
from .oracle import (
    N_MAX_OPERATOR,
    EigenSystem,
    energy_block_norm,
    heisenberg_evolve,
    operator_norm_exact,
    spectral_norm,
    to_dense,
)
from .pauli import KLocalOperator, PauliString, commutator
from .truncation import DEFAULT_PRUNE_TOL, chained_truncate, hadamard_truncate

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_BOUND_VIOLATION = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3


def _read_spec(path: str) -> tuple[KLocalOperator, str]:
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"spec file not found: {path}")
    raw = p.read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    return load_spec(raw.decode("utf-8")), digest


def _config_dict(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"handler", "out", "format"}
    return {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in skip and value is not None
    }


def _default_gamma(n_sites: int) -> KLocalOperator:
    return KLocalOperator(n_sites, {PauliString.from_letters(n_sites, {0: "Z"}): 1.0 + 0j})


def _load_gamma(args: argparse.Namespace, n_sites: int) -> tuple[KLocalOperator, str | None]:
    if getattr(args, "gamma", None):
        gamma, digest = _read_spec(args.gamma)
        if gamma.n_sites != n_sites:
            raise ValidationError(
                f"gamma is on {gamma.n_sites} sites but the Hamiltonian has {n_sites}"
            )
        return gamma, digest
    return _default_gamma(n_sites), None


def _float_list(text: str, name: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise ValidationError(f"{name} must be a comma-separated list of numbers: {text!r}") from None


def _int_list(text: str, name: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise ValidationError(f"{name} must be a comma-separated list of integers: {text!r}") from None


# ----------------------------------------------------------------- handlers


def _cmd_constants(args: argparse.Namespace) -> tuple[dict[str, Any], list[list], int]:
    op, digest = _read_spec(args.spec)
    const = structural_constants(op)
    params = BoundParams(g=const.g, k=max(const.k, 1))
    result: dict[str, Any] = {
        "n_sites": op.n_sites,
        "k": const.k,
        "g": const.g,
        "n_terms": const.n_terms,
        "norm_upper": const.norm_upper,
        "lambda": params.lam,
        "kappa": params.kappa,
        "xi": params.xi,
    }
    if args.t is not None:
        result["t"] = args.t
        result["intervals"] = params.intervals(args.t)
        result["delta_t"] = params.delta_t(args.t)
        result["r_t"] = params.r_t(args.t)
    rows = [["quantity", "value"]] + [[key, value] for key, value in result.items()]
    return {"input_hash": digest, "result": result}, rows, EXIT_OK


_EVALUATORS = ("theorem1", "small_time", "main", "delta", "topo", "band")


def _cmd_bound(args: argparse.Namespace) -> tuple[dict[str, Any], list[list], int]:
    if args.evaluator not in _EVALUATORS:
        raise ValidationError(f"unknown evaluator {args.evaluator!r}; choose from {_EVALUATORS}")
    digest = None
    if args.spec:
        op, digest = _read_spec(args.spec)
        params = BoundParams.from_operator(op)
        n_sites = op.n_sites
    else:
        if args.g is None or args.k is None:
            raise ValidationError("bound needs either --spec or both --g and --k")
        params = BoundParams(g=args.g, k=args.k)
        n_sites = args.n_sites or 1
    q_values = _int_list(args.q, "--q") if args.q else [max(args.q0 or 1, 1)]
    t_values = _float_list(args.t_grid, "--t") if args.t_grid else [0.0]
    q0 = args.q0 if args.q0 is not None else 1
    gamma_norm = args.gamma_norm
    points = []
    for t in t_values:
        for q in q_values:
            if args.evaluator == "theorem1":
                value = theorem1_rhs(params, q, gamma_norm)
            elif args.evaluator == "small_time":
                value = small_time_rhs(params, q0, q, t, gamma_norm)
            elif args.evaluator == "main":
                value = main_rhs(params, q0, q, t, gamma_norm)
            elif args.evaluator == "delta":
                value = delta_value(params, q0, q, t)
            elif args.evaluator == "topo":
                value = topo_error_rhs(params, q0, q, t)
            else:
                value = band_rhs(params, t, n_sites, float(q))
            points.append({"t": t, "q": q, "q0": q0, "value": value})
    result = {
        "evaluator": args.evaluator,
        "g": params.g,
        "k": params.k,
        "gamma_norm": gamma_norm,
        "points": points,
    }
    rows = [["evaluator", "q0", "q", "t", "value"]] + [
        [args.evaluator, p["q0"], p["q"], p["t"], p["value"]] for p in points
    ]
    report = {"result": result}
    if digest:
        report["input_hash"] = digest
    return report, rows, EXIT_OK


def _cmd_truncate(args: argparse.Namespace) -> tuple[dict[str, Any], list[list], int]:
    op, digest = _read_spec(args.spec)
    gamma, gamma_digest = _load_gamma(args, op.n_sites)
    if args.q is None:
        raise ValidationError("truncate requires --q")
    q = int(args.q)
    t = args.t if args.t is not None else 0.0
    params = BoundParams.from_operator(op)
    mode = args.mode
    if mode == "auto":
        mode = "chained" if params.intervals(t) > 1 else "small-time"
    if mode == "small-time":
        report_t = hadamard_truncate(op, gamma, t, q, threshold=args.threshold, params=params)
    else:
        report_t = chained_truncate(op, gamma, t, q, threshold=args.threshold, params=params)
    result: dict[str, Any] = {
        "mode": mode,
        "t": t,
        "target_q": report_t.target_q,
        "m0": report_t.m0,
        "witness_terms": report_t.witness.n_terms,
        "witness_locality": report_t.witness.locality,
        "pruning_budget": report_t.pruning_budget,
        "bound_rhs_norm_upper": report_t.bound_rhs,
    }
    if report_t.schedule is not None:
        result["schedule"] = list(report_t.schedule.levels)
        result["delta_q"] = report_t.schedule.delta_q
        result["intervals"] = report_t.schedule.n
    nmax = args.nmax if args.nmax is not None else N_MAX_OPERATOR
    if op.n_sites <= nmax:
        gamma_norm = operator_norm_exact(gamma, n_max=nmax)
        exact = heisenberg_evolve(op, gamma, t, n_max=nmax)
        err = spectral_norm(to_dense(report_t.witness, n_max=nmax).matrix - exact.matrix)
        if mode == "small-time":
            rhs = small_time_rhs(params, gamma.locality, q, abs(t), gamma_norm)
        else:
            rhs = main_rhs(params, gamma.locality, q, t, gamma_norm)
        result["oracle_error"] = err
        result["bound_rhs_exact_norm"] = rhs
        result["certified"] = bool(err <= rhs + report_t.pruning_budget)
    rows = [["quantity", "value"]] + [
        [key, value] for key, value in result.items() if key != "schedule"
    ]
    report = {"input_hash": digest, "result": result}
    if gamma_digest:
        report["gamma_hash"] = gamma_digest
    code = EXIT_OK
    if result.get("certified") is False:
        code = EXIT_BOUND_VIOLATION
    return report, rows, code


def _cmd_decompose(args: argparse.Namespace) -> tuple[dict[str, Any], list[list], int]:
    op, digest = _read_spec(args.spec)
    const = structural_constants(op)
    epsilon = args.epsilon
    if epsilon is None:
        if const.g <= 0:
            raise ValidationError("Hamiltonian has g = 0; pass --epsilon explicitly")
        epsilon = const.g / 10.0
    pool = discretize(op, epsilon)
    decomp = pack_layers(pool)
    exported = decomp.to_json_dict()
    discretized = reconstruct(decomp)
    exported["certificates"]["reconstruction_vs_source_norm_upper"] = (
        (discretized - op).norm_upper()
    )
    rows = [["layer", "sites", "paulis", "coeff_re", "coeff_im", "count"]]
    for layer_index, layer in enumerate(exported["layers"]):
        for entry in layer:
            rows.append(
                [
                    layer_index,
                    " ".join(str(s) for s in entry["sites"]),
                    entry["paulis"],
                    entry["coeff"][0],
                    entry["coeff"][1],
                    entry["count"],
                ]
            )
    return {"input_hash": digest, "result": exported}, rows, EXIT_OK


def _verify_checks(args: argparse.Namespace, op: KLocalOperator) -> list[dict[str, Any]]:
    const = structural_constants(op)
    params = BoundParams(g=const.g, k=max(const.k, 1))
    nmax = args.nmax if args.nmax is not None else N_MAX_OPERATOR
    gamma, _ = _load_gamma(args, op.n_sites)
    q0 = gamma.locality
    checks: list[dict[str, Any]] = []

    def add(name: str, lhs: float, rhs: float, note: str = "") -> None:
        checks.append(
            {
                "check": name,
                "lhs": lhs,
                "rhs": rhs,
                "margin": rhs - lhs,
                "status": "pass" if lhs <= rhs else "fail",
                "note": note,
            }
        )

    # commutator growth bound
    gamma_norm = operator_norm_exact(gamma, n_max=nmax)
    lhs = operator_norm_exact(commutator(op, gamma), n_max=nmax)
    add("commutator_growth", lhs, theorem1_rhs(params, q0, gamma_norm))

    # truncated-evolution witness
    t = args.t if args.t is not None else (0.5 / params.kappa if params.kappa > 0 else 0.0)
    n = params.intervals(t)
    q = args.q if args.q is not None else 2**n * max(q0, 1)
    trunc = chained_truncate(op, gamma, t, q, threshold=args.threshold, params=params)
    exact = heisenberg_evolve(op, gamma, t, n_max=nmax)
    err = spectral_norm(to_dense(trunc.witness, n_max=nmax).matrix - exact.matrix)
    add(
        "truncated_witness",
        err,
        main_rhs(params, q0, q, t, gamma_norm) + trunc.pruning_budget,
        note=f"t={t}, q={q}, intervals={n}",
    )

    # layer decomposition certificates
    epsilon = args.epsilon
    if epsilon is None and const.g > 0:
        epsilon = const.g / 10.0
    if epsilon is not None:
        decomp = pack_layers(discretize(op, epsilon))
        cert = decomp.verify()
        add("layer_count", float(cert["layer_count"]), float(cert["layer_bound"]))
        add(
            "layer_reconstruction",
            (reconstruct(decomp) - op).norm_upper(),
            decomp.reconstruction_gap + 1e-12,
            note=f"epsilon={epsilon}",
        )
        if not (cert["disjoint_ok"] and cert["commuting_ok"] and cert["multiplicity_ok"]):
            add("layer_structure", 1.0, 0.0, note=str(cert))
        else:
            add("layer_structure", 0.0, 0.0)

    # energy block law, commuting Hamiltonians only
    strings = [term.string for term in op.terms()]
    commuting = all(
        a.commutes_with(b) for i, a in enumerate(strings) for b in strings[i + 1 :]
    )
    if commuting and not op.is_zero:
        h_dense = to_dense(op, n_max=nmax)
        eig = EigenSystem(h_dense)
        lo = float(eig.eigenvalues[0])
        hi = float(eig.eigenvalues[-1])
        gap = 2.0 * const.g * q0
        width = hi - lo
        if width > gap * (1 + 1e-9) + 1e-9:
            worst = 0.0
            for frac in (0.0, 0.25, 0.5):
                e_lo = lo + frac * (width - gap) / 2.0
                e_hi = e_lo + gap * (1 + 1e-9) + 1e-9
                worst = max(
                    worst,
                    energy_block_norm(
                        h_dense, to_dense(gamma, n_max=nmax), e_lo, e_hi, n_max=nmax
                    ),
                )
            add("energy_block", worst, 1e-10, note=f"separation>2gq={gap}")
        else:
            checks.append(
                {
                    "check": "energy_block",
                    "lhs": 0.0,
                    "rhs": 0.0,
                    "margin": 0.0,
                    "status": "skipped",
                    "note": "spectrum narrower than 2gq",
                }
            )
    else:
        checks.append(
            {
                "check": "energy_block",
                "lhs": 0.0,
                "rhs": 0.0,
                "margin": 0.0,
                "status": "skipped",
                "note": "Hamiltonian terms do not commute pairwise",
            }
        )
    return checks


def _cmd_verify(args: argparse.Namespace) -> tuple[dict[str, Any], list[list], int]:
    op, digest = _read_spec(args.spec)
    checks = _verify_checks(args, op)
    failed = [c for c in checks if c["status"] == "fail"]
    result = {
        "checks": checks,
        "n_checks": len(checks),
        "n_failed": len(failed),
        "verdict": "pass" if not failed else "fail",
    }
    rows = [["check", "lhs", "rhs", "margin", "status"]] + [
        [c["check"], c["lhs"], c["rhs"], c["margin"], c["status"]] for c in checks
    ]
    code = EXIT_OK if not failed else EXIT_BOUND_VIOLATION
    return {"input_hash": digest, "result": result}, rows, code


def _bloch_parent(site_states: str, n_sites: int) -> KLocalOperator:
    """Parent one-local Hamiltonian with the product state as ground state
    at energy -N: h_i = -(v_i . sigma_i) with unit Bloch vectors v_i."""
    from .concentration import build_product_state  # local import to reuse validation

    if isinstance(site_states, str):
        if len(site_states) != n_sites:
            raise ValidationError(f"state string length {len(site_states)} != n_sites {n_sites}")
        vectors = [build_product_state(ch, 1) for ch in site_states]
    else:
        vectors = [np.asarray(v, dtype=complex) for v in site_states]
    acc: dict[PauliString, complex] = {}
    for i, v in enumerate(vectors):
        a, b = v[0], v[1]
        bloch = {
            "X": 2.0 * (np.conj(a) * b).real,
            "Y": 2.0 * (np.conj(a) * b).imag,
            "Z": (abs(a) ** 2 - abs(b) ** 2),
        }
        for letter, component in bloch.items():
            if abs(component) > 1e-14:
                string = PauliString.from_letters(n_sites, {i: letter})
                acc[string] = acc.get(string, 0j) - component
    return KLocalOperator(n_sites, acc)


def _cmd_concentrate(args: argparse.Namespace) -> tuple[dict[str, Any], list[list], int]:
    op, digest = _read_spec(args.spec)
    n_sites = op.n_sites
    params = BoundParams.from_operator(op)
    t = args.t if args.t is not None else 0.0
    nmax = args.nmax if args.nmax is not None else 12
    state = args.state or "+" * n_sites
    observable = ExtensiveObservable.collective(n_sites, args.axis, n_max=nmax)
    psi_t = evolve_product_state(op, state, t, n_max=nmax)
    profile = tail_profile(psi_t, observable)
    fitted: tuple[float, float] | None = None
    if t > 0:
        try:
            fitted = fit_tail_constants(profile, params, t, n_sites)
        except DomainError:
            fitted = None

    parent = _bloch_parent(state, n_sites)
    parent_t = heisenberg_evolve(op, parent, t, n_max=nmax)
    width = args.bin_width if args.bin_width is not None else float(params.r_t(t))
    band = band_matrix(parent_t, observable, width, n_max=nmax)

    tail_rows: list[list] = []
    for r, tail in profile.samples:
        if fitted is not None and fitted[1] != math.inf:
            c1, c2 = fitted
            bound = c1 * math.exp(-r / (c2 * params.r_t(t) * math.sqrt(t * n_sites)))
        else:
            bound = ""
        tail_rows.append(["tail", r, "", tail, bound])
    band_rows: list[list] = []
    occupied = [b for b in range(band.n_bins) if band.occupancy[b]]
    for bx in occupied:
        for by in occupied:
            gap = abs(bx - by)
            band_rows.append(
                ["band", bx, by, band.norms[bx, by], band_rhs(params, t, n_sites, gap)]
            )
    result = {
        "t": t,
        "state": state,
        "axis": args.axis,
        "mean": profile.mean,
        "tail": [{"R": r, "tail": tail} for r, tail in profile.samples],
        "fitted_c1": fitted[0] if fitted else None,
        "fitted_c2": fitted[1] if fitted else None,
        "bin_width": width,
        "band_norms": band.norms.tolist(),
        "band_occupancy": band.occupancy.tolist(),
    }
    rows = [["kind", "a", "b", "value", "bound"]] + tail_rows + band_rows
    if args.q is not None:
        # distinguishability of the evolved state from the initial one
        # under random weight-q probes
        psi_0 = build_product_state(state, n_sites)
        probe = topo_error_estimate(psi_0, psi_t, args.q, n_samples=args.samples, seed=args.seed)
        result["probe"] = {
            "q": probe.q,
            "n_samples": probe.n_samples,
            "diag_max": probe.diag_max,
            "cross_max": probe.cross_max,
            "eps_hat": probe.eps_hat,
            "eps_hat_unit": probe.eps_hat_unit,
        }
        rows.append(["probe", probe.q, probe.n_samples, probe.eps_hat, ""])
    return {"input_hash": digest, "result": result}, rows, EXIT_OK


# ------------------------------------------------------------------ driver


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="klocal",
        description="Locality-spreading bounds and certification for k-local spin systems.",
    )
    parser.add_argument("--version", action="version", version=f"klocal {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, spec_required: bool = True) -> None:
        p.add_argument("--spec", required=spec_required, help="Hamiltonian spec JSON file")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--nmax", type=int, default=None, help="dense-size override")

    p = sub.add_parser("constants", help="structural constants and bound parameters")
    common(p)
    p.add_argument("--t", type=float, default=None)
    p.set_defaults(handler=_cmd_constants)

    p = sub.add_parser("bound", help="evaluate an analytic bound on a grid")
    common(p, spec_required=False)
    p.add_argument("--evaluator", required=True, choices=_EVALUATORS)
    p.add_argument("--g", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--q0", type=int, default=None)
    p.add_argument("--q", default=None, help="comma-separated q grid (band: x-gap grid)")
    p.add_argument("--t", dest="t_grid", default=None, help="comma-separated t grid")
    p.add_argument("--gamma-norm", type=float, default=1.0)
    p.add_argument("--n-sites", type=int, default=None, help="site count for band bounds")
    p.set_defaults(handler=_cmd_bound)

    p = sub.add_parser("truncate", help="locality-truncated evolution witness")
    common(p)
    p.add_argument("--gamma", default=None, help="observable spec JSON (default: Z on site 0)")
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--q", type=int, default=None, required=True)
    p.add_argument("--threshold", type=float, default=DEFAULT_PRUNE_TOL)
    p.add_argument("--mode", choices=("auto", "small-time", "chained"), default="auto")
    p.set_defaults(handler=_cmd_truncate)

    p = sub.add_parser("decompose", help="disjoint-support layer decomposition")
    common(p)
    p.add_argument("--epsilon", type=float, default=None, help="unit norm (default g/10)")
    p.set_defaults(handler=_cmd_decompose)

    p = sub.add_parser("verify", help="certification suite for one instance")
    common(p)
    p.add_argument("--gamma", default=None, help="observable spec JSON (default: Z on site 0)")
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--threshold", type=float, default=DEFAULT_PRUNE_TOL)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("concentrate", help="tail profile and band matrix")
    common(p)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--state", default=None, help="product state string (default: all +)")
    p.add_argument("--axis", default="z", choices=("x", "y", "z"))
    p.add_argument("--bin-width", type=float, default=None)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--q", type=int, default=None)
    p.set_defaults(handler=_cmd_concentrate)

    return parser


def _render(report: dict[str, Any], rows: list[list], args: argparse.Namespace) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in rows:
            writer.writerow(row)
        return buf.getvalue()
    envelope = {
        "command": args.command,
        "version": __version__,
        "seed": getattr(args, "seed", 0),
        "config": _config_dict(args),
    }
    envelope.update(report)
    return json.dumps(envelope, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON-serializable: {type(value)}")


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_error(args: argparse.Namespace | None, exc: Exception, code: str) -> None:
    payload = {
        "error": {
            "code": code,
            "type": type(exc).__name__,
            "message": str(exc),
        }
    }
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    out = getattr(args, "out", None) if args is not None else None
    _write(text, out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, rows, code = args.handler(args)
    except (ValidationError, DomainError, InfeasibleScheduleError) as exc:
        _emit_error(args, exc, "invalid")
        return EXIT_INVALID
    except ResourceLimitError as exc:
        _emit_error(args, exc, "resource")
        return EXIT_RESOURCE
    except KLocalError as exc:
        _emit_error(args, exc, "invalid")
        return EXIT_INVALID
    _write(_render(report, rows, args), args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
