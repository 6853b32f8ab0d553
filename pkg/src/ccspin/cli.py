"""Command-line front end.

Every output embeds the full run configuration and the package version.
Floats are written with 17 significant digits.

Exit codes: 0 success, 2 numerical non-convergence, 3 integration failure,
64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .catalog import (M4_STAR, BracketError, ExcludedLocus, KiteShape, equilateral_configuration,
                      equilateral_family, kite_configuration, kite_two_degree_scan,
                      locate_degenerate_mass, rhombic_eigenvalues, rhombic_family)
from .ccfind import (NoConvergence, bordered_nullity, cc_from_config, classify,
                     collision_manifold_dimension, solve_cc, tilde_mu)
from .core import CollisionError, MassedConfiguration
from .dynamics import (InsufficientRange, SeedEscape, StepFailure, asymptotic_exponents,
                       homothetic_cartesian, make_collision_orbit, theta_limit)
from .frame import build_chart
from .normal_forms import (IdenticallyZero, PlanarSystem, characteristic_directions, polar_forms,
                           rate_estimate, resonance_scan, simulate_and_fit, spin_verdict, trig_eval)

EXIT_OK, EXIT_NOCONV, EXIT_INTEGRATION, EXIT_USAGE = 0, 2, 3, 64

PRESETS = ("lagrange", "lagrange-perturbed", "equilateral", "equilateral-degenerate", "rhombic",
           "kite", "square", "random")


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    """Non-convergence; carries partial output."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class IntegrationFailure(Exception):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


# ---------------------------------------------------------------- output


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _plain(obj):
    """Convert numpy containers and dataclass-like objects to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_json"):
        return _plain(obj.to_json())
    return str(obj)


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with 17-significant-digit floats; non-finite floats become null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    return json.dumps(obj)


@dataclass
class Result:
    """Command output: a JSON body and optionally a table for CSV."""

    body: dict
    table: tuple | None = None  # (names, rows)
    exit_code: int = EXIT_OK


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, list) and v and not isinstance(v[0], (dict, list)):
            for i, x in enumerate(v):
                yield f"{key}[{i}]", x
        elif isinstance(v, list):
            yield key, json.dumps(v)
        else:
            yield key, v


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt_float(v) if math.isfinite(v) else "nan"
    if v is None:
        return ""
    return str(v)


def render(result: Result, fmt: str, run_config: dict, timestamp: bool = True) -> str:
    header = {"version": __version__, "run_config": run_config}
    if timestamp:
        header["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    if fmt == "json":
        return dumps(_plain({"header": header, "body": result.body})) + "\n"
    buf = io.StringIO()
    buf.write(f"# version: {__version__}\n")
    buf.write(f"# run_config: {json.dumps(_plain(run_config), sort_keys=True)}\n")
    if timestamp:
        buf.write(f"# timestamp: {header['timestamp']}\n")
    w = csv.writer(buf, lineterminator="\n")
    if result.table is not None:
        names, rows = result.table
        w.writerow(names)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    else:
        w.writerow(["key", "value"])
        for k, v in _flatten(_plain(result.body)):
            w.writerow([k, _cell(v)])
    return buf.getvalue()


# ---------------------------------------------------------------- parsing helpers


def _floats(text: str, name: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--{name}: expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"--{name}: expected finite numbers, got {text!r}")
    if n is not None and len(vals) != n:
        raise UsageError(f"--{name}: expected {n} values, got {len(vals)}")
    return vals


def _complexes(text: str) -> list[complex]:
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--eigs: cannot parse {text!r}") from None


def _regular_polygon(n: int) -> np.ndarray:
    ang = np.pi / 2 + 2 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(ang), np.sin(ang)]).ravel()


def _rng(args) -> np.random.Generator:
    return np.random.default_rng(args.seed if isinstance(args.seed, int) else 0)


def _start_name(args) -> str | None:
    start = getattr(args, "start", None)
    if start is not None:
        return start
    seed = getattr(args, "seed", None)
    return seed if isinstance(seed, str) else None


def configuration_from_args(args) -> tuple[MassedConfiguration, bool]:
    """Starting configuration and whether it is an exact closed-form CC."""
    preset = getattr(args, "preset", None)
    if getattr(args, "input", None):
        with open(args.input, encoding="utf-8") as fh:
            data = json.load(fh)
        body = data.get("body", data)
        cfg = body.get("cc", body).get("config", body.get("config"))
        if cfg is None:
            raise UsageError("--input: no 'config' entry found")
        return MassedConfiguration.from_json(cfg), False
    if preset == "equilateral":
        return equilateral_configuration(args.m4 if args.m4 is not None else 1.0), True
    if preset == "equilateral-degenerate":
        return equilateral_configuration(M4_STAR), True
    if preset == "rhombic":
        fam = rhombic_family(args.zeta if args.zeta is not None else 2.0)
        if not fam["positive"]:
            raise UsageError("--zeta outside (sqrt3, sqrt3+2): mass not positive")
        return fam["configuration"], True
    if preset == "kite":
        try:
            return kite_configuration(KiteShape(args.xi, args.eta)), True
        except (ExcludedLocus, ValueError) as exc:
            raise UsageError(f"kite preset: {exc}") from None
    masses = _floats(args.masses, "masses") if args.masses else None
    if getattr(args, "points", None):
        pts = _floats(args.points, "points")
        if masses is None or len(pts) != 2 * len(masses):
            raise UsageError("--points needs 2 coordinates per mass")
        return MassedConfiguration(masses, pts), False
    start = preset or _start_name(args) or "lagrange"
    if masses is None:
        masses = [1.0, 1.0, 1.0] if start not in ("square",) else [1.0] * 4
    if any(m <= 0 for m in masses):
        raise UsageError("--masses must be positive")
    n = len(masses)
    if n < 2:
        raise UsageError("--masses needs at least two bodies")
    rng = _rng(args)
    if start in ("lagrange", "square"):
        x = _regular_polygon(n)
    elif start == "lagrange-perturbed":
        x = _regular_polygon(n) + 1e-2 * rng.standard_normal(2 * n)
    elif start == "random":
        x = rng.uniform(-1, 1, 2 * n)
    else:
        raise UsageError(f"unknown starting configuration {start!r}; choose from {', '.join(PRESETS)}")
    return MassedConfiguration(masses, x), False


def central_configuration(args):
    cfg, exact = configuration_from_args(args)
    if exact and not getattr(args, "polish", False):
        return cc_from_config(cfg)
    return solve_cc(cfg, tol=args.tol, max_iter=args.max_iter, normalize=False)


def _cc_json(cc) -> dict:
    return {"config": cc.config.to_json(), "lambda": cc.lam, "residual": cc.residual,
            "iterations": cc.iterations, "inertia": cc.inertia}


def _report_json(rep, near_tol: float) -> dict:
    out = rep.to_json()
    rel = np.abs(rep.mu_unit) / rep.lam_unit
    out["n0"] = rep.partition.n0
    out["degenerate"] = rep.partition.n0 > 0
    near = np.flatnonzero(rel <= near_tol)
    out["near_zero"] = {"tol": near_tol, "count": int(near.size), "rel_mu": rel[near].tolist()}
    out["near_degenerate"] = bool(near.size > rep.partition.n0)
    return out


# ---------------------------------------------------------------- commands


def _solved(args):
    try:
        cc = central_configuration(args)
    except NoConvergence as exc:
        raise NumericalFailure(str(exc), {"converged": False, "residual": exc.residual,
                                          "iterations": exc.iterations}) from None
    return cc, classify(cc, args.zero_tol)


def cmd_cc_find(args) -> Result:
    cc, rep = _solved(args)
    body = {"converged": True, "cc": _cc_json(cc), "report": _report_json(rep, args.near_tol)}
    return Result(body)


def cmd_cc_classify(args) -> Result:
    cc, rep = _solved(args)
    body = {"cc": _cc_json(cc), "report": _report_json(rep, args.near_tol),
            "bordered_nullity": bordered_nullity(cc, args.zero_tol),
            "dimension": collision_manifold_dimension(rep).__dict__}
    rows = [[i + 5, rep.mu_unit[i], rep.eig[i], tm.real, tm.imag] for i, tm in enumerate(rep.tilde_mu)]
    return Result(body, (["mode", "mu_unit", "eig", "tilde_mu_re", "tilde_mu_im"], rows))


def _chart(args):
    cc, rep = _solved(args)
    return cc, rep, build_chart(rep)


def cmd_frame_build(args) -> Result:
    cc, rep, chart = _chart(args)
    return Result({"cc": _cc_json(cc), "chart": chart.to_json(), "n0": chart.n0})


def cmd_collide_simulate(args) -> Result:
    cc, rep, chart = _chart(args)
    mix = _floats(args.mix, "mix") if args.mix else None
    try:
        traj = make_collision_orbit(chart, mix=mix, delta=args.delta, tau_forward=args.tau_forward,
                                    zmax=args.zmax, rtol=args.rtol)
    except StepFailure as exc:
        raise IntegrationFailure(str(exc), {"status": "failed"}) from None
    except SeedEscape as exc:
        raise IntegrationFailure(str(exc), {"status": "seed_escape"}) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    body = {
        "status": traj.status,
        "n_samples": int(traj.tau.size),
        "tau_range": [float(traj.tau[0]), float(traj.tau[-1])],
        "max_energy_residual": float(np.max(np.abs(traj.energy_residual))),
        "max_J_residual": float(np.max(np.abs(traj.J_residual))),
        "kappa": chart.kappa,
        "tilde_mu": [[float(v.real), float(v.imag)] for v in tilde_mu(chart.mu, chart.kappa)],
    }
    if args.theta_limit:
        body["theta_limit"] = theta_limit(traj.tau, traj.theta).to_json()
    names, data = traj.columns()
    if args.trajectory_out:
        with open(args.trajectory_out, "w", encoding="utf-8") as fh:
            fh.write(render(Result({}, (names, data.tolist())), "csv", vars_config(args), timestamp=False))
    return Result(body, (names, data.tolist()))


def cmd_collide_asymptotics(args) -> Result:
    cc, rep, chart = _chart(args)
    if not (args.t1 > 0 and args.t0 > args.t1):
        raise UsageError("need t0 > t1 > 0 (a nonempty span toward the collision at t = 0)")
    try:
        tr = homothetic_cartesian(chart, t0=args.t0, t1=args.t1, rtol=args.rtol)
    except StepFailure as exc:
        raise IntegrationFailure(str(exc)) from None
    if tr.status != "ok":
        raise IntegrationFailure(f"integration status {tr.status}")
    try:
        fits = asymptotic_exponents(tr, t_c=0.0 if args.known_tc else None)
    except InsufficientRange as exc:
        raise UsageError(str(exc)) from None
    k = chart.kappa
    body = {
        "t_c": fits["t_c"],
        "J_max": fits["J_max"],
        "kappa": k,
        "fits": {n: fits[n].__dict__ for n in ("I", "U", "K", "r")},
        "expected": {"I": {"slope": 4 / 3, "prefactor": 1.5 ** (4 / 3) * k ** (2 / 3)},
                     "U": {"slope": -2 / 3, "prefactor": (1 / 18) ** (1 / 3) * k ** (2 / 3)}},
    }
    rows = [[n, fits[n].slope, fits[n].slope_err, fits[n].prefactor] for n in ("I", "U", "K", "r")]
    return Result(body, (["quantity", "slope", "slope_err", "prefactor"], rows))


def cmd_spin_check(args) -> Result:
    cc, rep, chart = _chart(args)
    v = spin_verdict(rep, chart)
    body = {"verdict": v.to_json(), "no_spin": v.no_spin, "partition": rep.partition.to_json()}
    return Result(body)


def cmd_catalog_rhombic(args) -> Result:
    lo, hi = _floats(args.zeta_range, "zeta", 2)
    if not lo < hi:
        raise UsageError("--zeta needs lo < hi")
    zs = np.linspace(lo, hi, args.n)
    rows = []
    for z in zs:
        f, e = rhombic_family(z), rhombic_eigenvalues(z)
        rows.append([z, f["m_tilde"], f["lambda"], e["mu5"], e["mu6"], e["mu7"], e["mu8"], f["kappa"],
                     e["kappa_half"], f["positive"], e["mu8"] < e["mu7"]])
    names = ["zeta", "m_tilde", "lambda", "mu5", "mu6", "mu7", "mu8", "kappa", "kappa_half",
             "positive", "mu8_lt_mu7"]
    flips = [float(0.5 * (rows[i][0] + rows[i + 1][0])) for i in range(len(rows) - 1)
             if rows[i][-1] != rows[i + 1][-1]]
    body = {"n": args.n, "ordering_flips_near": flips, "reference_flip": 1 + np.sqrt(2),
            "rows": [dict(zip(names, r)) for r in rows]}
    return Result(body, (names, rows))


def cmd_catalog_kite(args) -> Result:
    xr = _floats(args.xi_range, "xi-range", 2)
    er = _floats(args.eta_range, "eta-range", 2)
    scan = kite_two_degree_scan(xr, er, n=args.n, tol=args.scan_tol, threads=args.threads)
    rows = scan.table[np.isfinite(scan.table[:, 4])] if not args.all_cells else scan.table
    return Result(scan.to_json(), (list(scan.columns), rows.tolist()))


def cmd_catalog_equilateral(args) -> Result:
    if args.m4_values:
        m4s = _floats(args.m4_values, "m4")
    else:
        m4s = list(np.linspace(args.m4_min, args.m4_max, args.n))
    if any(m <= 0 for m in m4s):
        raise UsageError("--m4 values must be positive")
    rows = []
    for m4 in m4s:
        fam = equilateral_family(m4, args.zero_tol)
        rep = fam["report"]
        rows.append([m4, fam["lambda"], float(rep.eig[0]), float(rep.eig[-1]), rep.partition.n0,
                     bool(rep.eig[0] < 0)])
    body = {"rows": [dict(zip(["m4", "lambda", "min_eig", "max_eig", "n0", "indefinite"], r)) for r in rows]}
    try:
        body["m4_star"] = locate_degenerate_mass(tuple(_floats(args.bracket, "bracket", 2)))
        body["m4_star_closed_form"] = M4_STAR
    except BracketError as exc:
        raise NumericalFailure(str(exc), body) from None
    return Result(body, (["m4", "lambda", "min_eig", "max_eig", "n0", "indefinite"], rows))


def _planar_system(args) -> PlanarSystem:
    if args.c:
        return PlanarSystem.from_c(*_floats(args.c, "c", 4))
    if args.P and args.Q:
        P, Q = _floats(args.P, "P"), _floats(args.Q, "Q")
        return PlanarSystem(len(P) - 1, P, Q)
    if getattr(args, "preset", None):
        cc, rep, chart = _chart(args)
        v = spin_verdict(rep, chart)
        if "c" not in v.supporting:
            raise UsageError("preset has no two-dimensional center")
        return PlanarSystem.from_c(*v.supporting["c"])
    raise UsageError("give --c c1,c2,c3,c4, or --P and --Q, or a degenerate --preset")


def cmd_planar_analyze(args) -> Result:
    try:
        sys_ = _planar_system(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        phi, psi = polar_forms(sys_)
    except IdenticallyZero as exc:
        raise UsageError(str(exc)) from None
    roots = characteristic_directions(psi)
    rates = [rate_estimate(phi, t, sys_.m, psi) for t in roots]
    body = {"m": sys_.m, "P": sys_.Pm, "Q": sys_.Qm, "Phi": phi, "Psi": psi,
            "theta0": roots, "rates": [r.to_json() for r in rates]}
    if args.simulate:
        sims = []
        for r in rates:
            if not r.sharp:
                continue
            seed = args.rho0 * np.array([np.cos(r.theta0), np.sin(r.theta0)])
            fit = simulate_and_fit(sys_, seed, tau_end=args.tau_end)
            sims.append({k: v for k, v in fit.items() if k not in ("tau", "rho", "theta")}
                        | {"theta0": r.theta0, "Psi_at_fit": float(trig_eval(psi, fit["theta0_num"]))})
        body["simulations"] = sims
    rows = [[r.theta0, r.phi, r.psi_prime, r.sharp, r.prefactor if r.prefactor is not None else float("nan"),
             r.exponent, r.backward_attracting] for r in rates]
    names = ["theta0", "Phi", "Psi_prime", "sharp", "prefactor", "exponent", "backward_attracting"]
    return Result(body, (names, rows))


def cmd_resonance_scan(args) -> Result:
    if args.eigs:
        eigs = _complexes(args.eigs)
    else:
        cc, rep, chart = _chart(args)
        eigs = list(tilde_mu(chart.mu, chart.kappa))
    out = resonance_scan(eigs, max_order=args.max_order, rtol=args.res_tol, threads=args.threads)
    body = {"eigs": [[e.real, e.imag] for e in np.asarray(eigs, dtype=complex)],
            "resonances": [r.to_json() for r in out["resonances"]],
            "near": [r.to_json() for r in out["near"]],
            "checked": out["checked"],
            "label": "resonance relations found numerically; evidence only"}
    rows = [[r.k, " ".join(map(str, r.alpha)), r.order, r.defect, "exact"] for r in out["resonances"]]
    rows += [[r.k, " ".join(map(str, r.alpha)), r.order, r.defect, "near"] for r in out["near"]]
    return Result(body, (["k", "alpha", "order", "defect", "kind"], rows))


# ---------------------------------------------------------------- parser


def _seed_value(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def _globals(p, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)  # noqa: E731
    p.add_argument("--out", default=d(None), help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=d("json"))
    p.add_argument("--threads", type=int, default=d(1), help="worker count for scans")
    p.add_argument("--seed", type=_seed_value, default=d(0),
                   help="RNG seed (integer); for cc commands a name selects the start shape")
    p.add_argument("--tol", type=float, default=d(1e-10), help="Newton tolerance at I = 1")


def _config_args(p):
    p.add_argument("--masses", help="comma-separated masses")
    p.add_argument("--points", help="x1,y1,x2,y2,... starting coordinates")
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--start", choices=("lagrange", "lagrange-perturbed", "random", "square"))
    p.add_argument("--input", help="JSON produced by 'cc find'")
    p.add_argument("--m4", type=float)
    p.add_argument("--zeta", type=float)
    p.add_argument("--xi", type=float, default=3.0)
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--zero-tol", type=float, default=1e-8)
    p.add_argument("--near-tol", type=float, default=1e-5)
    p.add_argument("--polish", action="store_true", help="run Newton even on closed-form presets")


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="ccspin", description="Central configurations and collision spin tools")
    root.add_argument("--version", action="version", version=f"ccspin {__version__}")
    _globals(root, suppress=False)
    top = root.add_subparsers(dest="group", required=True)

    def leaf(group_parser, name, func, help_):
        p = group_parser.add_parser(name, help=help_)
        _globals(p, suppress=True)
        p.set_defaults(func=func)
        return p

    cc = top.add_parser("cc").add_subparsers(dest="cmd", required=True)
    _config_args(leaf(cc, "find", cmd_cc_find, "solve for a central configuration"))
    _config_args(leaf(cc, "classify", cmd_cc_classify, "restricted spectrum and partition"))

    fr = top.add_parser("frame").add_subparsers(dest="cmd", required=True)
    _config_args(leaf(fr, "build", cmd_frame_build, "moving-frame chart data"))

    co = top.add_parser("collide").add_subparsers(dest="cmd", required=True)
    p = leaf(co, "simulate", cmd_collide_simulate, "collision-ejection orbit on the collision manifold")
    _config_args(p)
    p.add_argument("--mix", help="weights over unstable modes")
    p.add_argument("--delta", type=float, default=1e-6)
    p.add_argument("--tau-forward", type=float, default=40.0)
    p.add_argument("--zmax", type=float, default=0.3)
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--theta-limit", action="store_true")
    p.add_argument("--trajectory-out")
    p = leaf(co, "asymptotics", cmd_collide_asymptotics, "homothetic collapse power laws")
    _config_args(p)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--t1", type=float, default=1e-8)
    p.add_argument("--rtol", type=float, default=1e-12)
    p.add_argument("--known-tc", action="store_true", help="fit with t_c = 0 instead of estimating it")

    sp = top.add_parser("spin").add_subparsers(dest="cmd", required=True)
    _config_args(leaf(sp, "check", cmd_spin_check, "infinite-spin verdict"))

    ca = top.add_parser("catalog").add_subparsers(dest="cmd", required=True)
    p = leaf(ca, "rhombic", cmd_catalog_rhombic, "rhombic family table")
    p.add_argument("--zeta", dest="zeta_range", default="1.8,3.7")
    p.add_argument("--n", type=int, default=200)
    p = leaf(ca, "kite", cmd_catalog_kite, "two-degree degeneracy scan")
    p.add_argument("--xi-range", default="1,6")
    p.add_argument("--eta-range", default="0.2,1")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--scan-tol", type=float, default=1e-8)
    p.add_argument("--all-cells", action="store_true")
    p = leaf(ca, "equilateral", cmd_catalog_equilateral, "central-mass sweep and m4*")
    p.add_argument("--m4", dest="m4_values")
    p.add_argument("--m4-min", type=float, default=0.1)
    p.add_argument("--m4-max", type=float, default=1.5)
    p.add_argument("--n", type=int, default=15)
    p.add_argument("--bracket", default="0.5,1.0")
    p.add_argument("--zero-tol", type=float, default=1e-8)

    pl = top.add_parser("planar").add_subparsers(dest="cmd", required=True)
    p = leaf(pl, "analyze", cmd_planar_analyze, "characteristic directions and rates")
    _config_args(p)
    p.add_argument("--c", help="c1,c2,c3,c4 of the quadratic center system")
    p.add_argument("--P")
    p.add_argument("--Q")
    p.add_argument("--simulate", action="store_true")
    p.add_argument("--rho0", type=float, default=1.0)
    p.add_argument("--tau-end", type=float, default=-60.0)

    rs = top.add_parser("resonance").add_subparsers(dest="cmd", required=True)
    p = leaf(rs, "scan", cmd_resonance_scan, "integer resonance search")
    _config_args(p)
    p.add_argument("--eigs", help="comma-separated (complex) eigenvalues")
    p.add_argument("--max-order", type=int, default=6)
    p.add_argument("--res-tol", type=float, default=1e-9)
    return root


def vars_config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        if not args.tol > 0:
            raise UsageError("--tol must be positive")
    except UsageError as exc:
        sys.stderr.write(str(exc) + "\n")
        return EXIT_USAGE
    cfg = vars_config(args)
    try:
        with np.errstate(all="ignore"):
            result = args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (NumericalFailure, IntegrationFailure) as exc:
        code = EXIT_NOCONV if isinstance(exc, NumericalFailure) else EXIT_INTEGRATION
        body = {"error": str(exc), "partial": exc.partial or {}}
        _emit(render(Result(body), args.format, cfg), args.out)
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return code
    except CollisionError as exc:
        sys.stderr.write(f"usage error: collision in input ({exc})\n")
        return EXIT_USAGE
    _emit(render(result, args.format, cfg), args.out)
    return result.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
