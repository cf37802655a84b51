"""Batch command line front end.

Subcommands read one JSON problem configuration and write deterministic
artifacts (CSV tables, JSON documents). Parsing is strict: unknown keys are
rejected by name, complex scalars are two-element [re, im] arrays, matrices
are row-major nested lists. All floating-point output uses 17 significant
digits so values round-trip exactly; identical inputs produce byte-identical
outputs.

Exit codes: 0 success, 2 validation failure, 3 numerical failure,
4 config parse error.
"""

import argparse
import json
import sys
import warnings

import numpy as np

from . import boundary, potential, scattering, spectrum
from ._integrator import DEFAULT_ATOL, DEFAULT_RTOL
from .errors import (ConfigParseError, MultiplicityMismatch, NumericalFailure,
                     SingularJost, ValidationFailure)
from .jost import jost_matrix
from .matkernel import row_sum_norm


def _f17(x):
    return "%.17g" % float(x)


def _emit_json(value, indent=0):
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = []
        for key in sorted(value):
            items.append(f'{pad}  "{key}": {_emit_json(value[key], indent + 1)}')
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_emit_json(v, indent) for v in value) + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _f17(value)
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    raise TypeError(f"cannot serialize {type(value)}")


def _ser_complex_matrix(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _write_out(text, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------- config

def _check_keys(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise ConfigParseError(f"{path} must be an object")
    for key in obj:
        if key not in required and key not in optional:
            raise ConfigParseError(f"unknown key '{path}.{key}'")
    for key in required:
        if key not in obj:
            raise ConfigParseError(f"missing key '{path}.{key}'")


def _real(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigParseError(f"{path} must be a real number")
    return float(value)


def _int(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigParseError(f"{path} must be an integer")
    return value


def _complex_cell(value, path):
    if (not isinstance(value, list) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)):
        raise ConfigParseError(f"{path} must be a [re, im] pair")
    return complex(value[0], value[1])


def _complex_matrix(value, n, path):
    if not isinstance(value, list) or len(value) != n:
        raise ConfigParseError(f"{path} must be a {n}x{n} matrix (row-major)")
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != n:
            raise ConfigParseError(f"{path}[{i}] must have {n} entries")
        for j, cell in enumerate(row):
            out[i, j] = _complex_cell(cell, f"{path}[{i}][{j}]")
    return out


def _real_list(value, path):
    if not isinstance(value, list) or not value:
        raise ConfigParseError(f"{path} must be a nonempty list of reals")
    return [_real(v, f"{path}[{i}]") for i, v in enumerate(value)]


class ProblemConfig:
    """Parsed configuration: boundary pair, potential, optional grid and
    tolerance overrides."""

    def __init__(self, n, bp, pot, grid, tols):
        self.n = n
        self.boundary_pair = bp
        self.potential = pot
        self.grid = grid
        self.tolerances = tols


def _parse_boundary(obj, n):
    _check_keys(obj, "boundary", required=("type",), optional=("A", "B", "theta"))
    btype = obj["type"]
    if btype == "matrices":
        _check_keys(obj, "boundary", required=("type", "A", "B"))
        a = _complex_matrix(obj["A"], n, "boundary.A")
        b = _complex_matrix(obj["B"], n, "boundary.B")
        return boundary.validate_pair(a, b)
    if btype == "theta":
        _check_keys(obj, "boundary", required=("type", "theta"))
        theta = _real_list(obj["theta"], "boundary.theta")
        if len(theta) != n:
            raise ConfigParseError(f"boundary.theta must have n = {n} entries")
        for i, t in enumerate(theta):
            if not 0 < t <= np.pi:
                raise ValidationFailure(
                    f"boundary.theta[{i}] = {t} outside (0, pi]")
        return boundary.pair_from_angles(theta)
    raise ConfigParseError(f"boundary.type must be 'matrices' or 'theta', got {btype!r}")


def _parse_potential(obj, n):
    _check_keys(obj, "potential", required=("type",),
                optional=("breakpoints", "values", "xs"))
    ptype = obj["type"]
    if ptype == "zero":
        _check_keys(obj, "potential", required=("type",))
        return potential.zero_potential(n)
    if ptype == "piecewise_constant":
        _check_keys(obj, "potential", required=("type", "breakpoints", "values"))
        xs = _real_list(obj["breakpoints"], "potential.breakpoints")
        if not isinstance(obj["values"], list) or len(obj["values"]) != len(xs) - 1:
            raise ConfigParseError(
                "potential.values must hold one matrix per breakpoint interval")
        vals = [_complex_matrix(v, n, f"potential.values[{i}]")
                for i, v in enumerate(obj["values"])]
        return potential.piecewise_constant(xs, vals)
    if ptype == "sampled_grid":
        _check_keys(obj, "potential", required=("type", "xs", "values"))
        xs = _real_list(obj["xs"], "potential.xs")
        if not isinstance(obj["values"], list) or len(obj["values"]) != len(xs):
            raise ConfigParseError("potential.values must hold one matrix per node")
        vals = [_complex_matrix(v, n, f"potential.values[{i}]")
                for i, v in enumerate(obj["values"])]
        return potential.sampled_grid(xs, vals)
    raise ConfigParseError(
        f"potential.type must be 'zero', 'piecewise_constant' or 'sampled_grid', got {ptype!r}")


def _parse_grid(obj):
    _check_keys(obj, "grid", required=("k_min", "k_max", "k_count"),
                optional=("spacing",))
    k_min = _real(obj["k_min"], "grid.k_min")
    k_max = _real(obj["k_max"], "grid.k_max")
    count = _int(obj["k_count"], "grid.k_count")
    spacing = obj.get("spacing", "linear")
    if spacing not in ("linear", "log"):
        raise ConfigParseError("grid.spacing must be 'linear' or 'log'")
    if not (0 < k_min <= k_max) or count < 1:
        raise ValidationFailure("grid needs 0 < k_min <= k_max and k_count >= 1")
    if count == 1:
        return np.array([k_min])
    if spacing == "log":
        return np.geomspace(k_min, k_max, count)
    return np.linspace(k_min, k_max, count)


_TOL_KEYS = ("integrator_tol", "kernel_tol", "class_tol", "refine_tol")


def load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigParseError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"config is not valid JSON: {exc}") from exc
    _check_keys(raw, "config", required=("n", "boundary", "potential"),
                optional=("grid", "tolerances"))
    n = _int(raw["n"], "config.n")
    if not 1 <= n <= 64:
        raise ValidationFailure(f"n = {n} out of supported range [1, 64]")
    tols = {}
    if "tolerances" in raw:
        _check_keys(raw["tolerances"], "tolerances", required=(), optional=_TOL_KEYS)
        for key in _TOL_KEYS:
            if key in raw["tolerances"]:
                tols[key] = _real(raw["tolerances"][key], f"tolerances.{key}")
    bp = _parse_boundary(raw["boundary"], n)
    pot = _parse_potential(raw["potential"], n)
    if pot.n != n:
        raise ValidationFailure("potential dimension disagrees with n")
    grid = _parse_grid(raw["grid"]) if "grid" in raw else None
    return ProblemConfig(n, bp, pot, grid, tols)


# ------------------------------------------------------------- commands

def _rtol_of(cfg, args):
    if args.tol_integrator is not None:
        return args.tol_integrator
    return cfg.tolerances.get("integrator_tol", DEFAULT_RTOL)


def cmd_validate(args):
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigParseError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"config is not valid JSON: {exc}") from exc

    failures = []
    doc = {"ok": False, "failures": failures}
    _check_keys(raw, "config", required=("n", "boundary", "potential"),
                optional=("grid", "tolerances"))
    n = _int(raw["n"], "config.n")

    bp = None
    try:
        bp = _parse_boundary(raw["boundary"], n)
    except ValidationFailure as exc:
        failures.append(f"{type(exc).__name__}: {exc}")
    if bp is not None:
        herm = row_sum_norm(bp.A.conj().T @ bp.B - bp.B.conj().T @ bp.A)
        gram = bp.A.conj().T @ bp.A + bp.B.conj().T @ bp.B
        lam = np.linalg.eigvalsh(gram)
        doc["boundary"] = {
            "hermiticity_residual": float(herm),
            "rank_margin": float(lam[0] / max(lam[-1], 1e-300)),
            "full_rank": bool(lam[0] > 1e-10 * lam[-1]),
        }

    pot = None
    try:
        pot = _parse_potential(raw["potential"], n)
    except ValidationFailure as exc:
        failures.append(f"{type(exc).__name__}: {exc}")
    if pot is not None:
        defect = 0.0
        if pot.kind != "zero":
            defect = max(row_sum_norm(np.asarray(v) - np.asarray(v).conj().T)
                         for v in pot.values)
        doc["potential"] = {
            "selfadjoint_residual": float(defect),
            "l1_norm": float(pot.l1_norm),
            "first_moment": float(pot.first_moment),
            "support_end": float(pot.support_end),
        }

    if "grid" in raw:
        try:
            _parse_grid(raw["grid"])
        except ValidationFailure as exc:
            failures.append(f"{type(exc).__name__}: {exc}")
    if "tolerances" in raw:
        _check_keys(raw["tolerances"], "tolerances", required=(), optional=_TOL_KEYS)

    doc["ok"] = not failures
    _write_out(_emit_json(doc) + "\n", args.out)
    return 0 if doc["ok"] else 2


def cmd_canonicalize(args):
    cfg = load_config(args.config)
    class_tol = cfg.tolerances.get("class_tol", 1e-9)
    cb = boundary.canonicalize(cfg.boundary_pair, class_tol=class_tol)
    doc = {
        "theta": [float(t) for t in cb.theta],
        "n_M": cb.n_mixed, "n_D": cb.n_dirichlet, "n_N": cb.n_neumann,
        "M": _ser_complex_matrix(cb.basis),
        "T1": _ser_complex_matrix(cb.pre_factor),
        "T2": _ser_complex_matrix(cb.post_factor),
        "reconstruction_residual": float(cb.reconstruction_residual),
    }
    _write_out(_emit_json(doc) + "\n", args.out)
    return 0


def cmd_scattering(args):
    cfg = load_config(args.config)
    if cfg.grid is None:
        raise ConfigParseError("the scattering command needs a grid section")
    rtol = _rtol_of(cfg, args)
    n = cfg.n
    header = ["k"]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            header += [f"S_re_{i}_{j}", f"S_im_{i}_{j}"]
    header += ["unitarity_defect", "det_phase_unwrapped", "status"]
    lines = [",".join(header)]
    prev_angle = None
    phase = 0.0
    for k in cfg.grid:
        try:
            sample = scattering.s_matrix(cfg.potential, cfg.boundary_pair,
                                         float(k), rtol=rtol, atol=DEFAULT_ATOL)
        except SingularJost:
            cells = [_f17(k)] + ["nan"] * (2 * n * n + 2) + ["singular"]
            lines.append(",".join(cells))
            continue
        det = complex(np.linalg.det(sample.S))
        ang = float(np.angle(det))
        if prev_angle is None:
            phase = ang
        else:
            delta = ang - prev_angle
            phase += (delta + np.pi) % (2 * np.pi) - np.pi
        prev_angle = ang
        cells = [_f17(k)]
        for i in range(n):
            for j in range(n):
                cells += [_f17(sample.S[i, j].real), _f17(sample.S[i, j].imag)]
        cells += [_f17(sample.unitarity_defect), _f17(phase), "ok"]
        lines.append(",".join(cells))
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def _search_kwargs(cfg, args):
    kw = {"rtol": _rtol_of(cfg, args), "atol": DEFAULT_ATOL}
    if "kernel_tol" in cfg.tolerances:
        kw["kernel_tol"] = cfg.tolerances["kernel_tol"]
    if "refine_tol" in cfg.tolerances:
        kw["refine_tol"] = cfg.tolerances["refine_tol"]
    if args.kappa_max is not None:
        kw["kappa_max"] = args.kappa_max
    return kw


def _boundstate_entry(s):
    return {"kappa": float(s.kappa), "multiplicity": s.multiplicity,
            "winding": s.winding, "det_residual": float(s.det_residual)}


def cmd_boundstates(args):
    cfg = load_config(args.config)
    states = spectrum.find_bound_states(cfg.potential, cfg.boundary_pair,
                                        **_search_kwargs(cfg, args))
    doc = {"bound_states": [_boundstate_entry(s) for s in states],
           "N_total": sum(s.multiplicity for s in states)}
    _write_out(_emit_json(doc) + "\n", args.out)
    return 0


def cmd_levinson(args):
    cfg = load_config(args.config)
    kw = _search_kwargs(cfg, args)
    if args.k_max is not None:
        kw["k_max"] = args.k_max
    rep = spectrum.levinson_verify(cfg.potential, cfg.boundary_pair, **kw)
    doc = {
        "bound_states": [_boundstate_entry(s) for s in rep.bound_states],
        "N_total": rep.N_total, "mu": rep.mu,
        "n_M": rep.n_M, "n_D": rep.n_D, "n_N": rep.n_N,
        "phase_at_zero": rep.phase_at_zero,
        "phase_at_infinity": rep.phase_at_infinity,
        "identity_residual": rep.identity_residual,
        "identity_residual_over_pi": rep.identity_residual / np.pi,
        "identity_holds": bool(abs(rep.identity_residual / np.pi) <= 1e-3),
        "contour": {"epsilon": rep.contour.epsilon, "R": rep.contour.R,
                    "n_real_samples": rep.contour.n_real_samples,
                    "n_arc_samples": rep.contour.n_arc_samples},
    }
    _write_out(_emit_json(doc) + "\n", args.out)
    return 0


def cmd_asymptotics(args):
    cfg = load_config(args.config)
    rtol = _rtol_of(cfg, args)
    j_hi = 8
    if args.k_max is not None:
        j_hi = max(5, int(np.log2(args.k_max)))
    ks = [2.0 ** j for j in range(4, j_hi + 1)]
    am = scattering.asymptotic_model(cfg.potential, cfg.boundary_pair)
    q1 = am.moments.first
    eye = np.eye(cfg.n)
    lines = ["k,s_model_residual,jj0_residual"]
    s_res, j_res = [], []
    for k in ks:
        sample = scattering.s_matrix(cfg.potential, cfg.boundary_pair, k,
                                     rtol=rtol, atol=DEFAULT_ATOL)
        rs = row_sum_norm(sample.S - am.S_inf - am.G(k) / (1j * k))
        ev = jost_matrix(cfg.potential, cfg.boundary_pair, k, rtol=rtol,
                         atol=DEFAULT_ATOL)
        _, j0_inv, _ = scattering.s0_reference(cfg.boundary_pair, k)
        corr = (q1 + am.moments.first_osc(k) @ am.S_inf) / (1j * k)
        rj = row_sum_norm(ev.J @ j0_inv - eye + corr)
        s_res.append(rs)
        j_res.append(rj)
        lines.append(",".join([_f17(k), _f17(rs), _f17(rj)]))
    logk = np.log(ks)
    slope_s = -np.polyfit(logk, np.log(np.maximum(s_res, 1e-300)), 1)[0]
    slope_j = -np.polyfit(logk, np.log(np.maximum(j_res, 1e-300)), 1)[0]
    lines.append(",".join(["slope", _f17(slope_s), _f17(slope_j)]))
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


_COMMANDS = {
    "validate": cmd_validate,
    "canonicalize": cmd_canonicalize,
    "scattering": cmd_scattering,
    "boundstates": cmd_boundstates,
    "levinson": cmd_levinson,
    "asymptotics": cmd_asymptotics,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="halfscat",
        description="Half-line matrix Schrodinger scattering computations.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fun in _COMMANDS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="problem configuration (JSON)")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--tol-integrator", type=float, default=None,
                        help="integrator relative tolerance override")
        sp.add_argument("--kappa-max", type=float, default=None,
                        help="bound-state search ceiling override")
        sp.add_argument("--k-max", type=float, default=None,
                        help="upper k for phase traces / dyadic tables")
        sp.add_argument("--strict", action=argparse.BooleanOptionalAction,
                        default=True,
                        help="treat numerical warnings as failures (default on)")
        sp.set_defaults(fun=fun)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            if args.strict:
                warnings.filterwarnings("error", category=MultiplicityMismatch)
            else:
                warnings.filterwarnings("always", category=MultiplicityMismatch)
            return args.fun(args)
    except ConfigParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 4
    except ValidationFailure as exc:
        print(f"validation failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except MultiplicityMismatch as exc:
        print(f"numerical failure (strict): {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
