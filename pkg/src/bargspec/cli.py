"""Command-line front end.

Every subcommand builds a report dict with the keys in ``report.SCHEMA_KEYS``
and emits it as JSON (default) or CSV.  Exit codes: 0 ok, 1 domain error,
2 numerical non-convergence, 3 bad arguments.  Errors are also written to
stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .algebra import build_hamiltonian
from .core import (
    DEFAULT_KAPPA_COUNT,
    ConvergenceError,
    DomainError,
    ModelKind,
    ModelSpec,
    SectorLabel,
    exact_energy,
    full_spectrum,
    sector_labels,
)
from .exact import (
    bargmann_norm_sq,
    bethe_system,
    build_eigenstate,
    eval_wavefunction,
    ode_residual,
    explicit_roots,
    solve_bethe,
)
from .oracle import convergence_study, eigenvalues_tridiagonal
from .recurrence import (
    classify,
    coeffs_for,
    forward_recursion,
    limsup_estimate,
    minimal_solution,
    normalizability_diagnostic,
    physical_solution,
    scan_spectrum,
)
from .report import emit_report, render_json, render_plot_data

EXIT_OK, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_BAD_ARGS = 0, 1, 2, 3

ENV_PREFIX = "BARGSPEC_"
DEFAULT_TOLERANCES = {"root_tol": 1e-10, "cf_tol": 1e-14, "scan_tol": 1e-12}
DEFAULT_G = {"displaced": 0.2, "squeezed": 0.3, "two_mode": 0.6, "k_harmonic": 0.3}
VERIFY_DEFAULTS = (("displaced", 0.2), ("squeezed", 0.3), ("two_mode", 0.6))
VERIFY_TOL = 1e-7


class BadArguments(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadArguments(message)


# ----------------------------------------------------------------------------
# argument plumbing


def _model_name(s: str) -> str:
    name = s.strip().lower().replace("-", "_")
    if name not in {k.value for k in ModelKind}:
        raise argparse.ArgumentTypeError(f"unknown model {s!r}")
    return name


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}")


def _positive_float(s: str) -> float:
    try:
        x = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}")
    if not x > 0 or not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"must be positive, got {s}")
    return x


def _int_list(s: str) -> list:
    try:
        return [int(t) for t in s.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def _env_tolerances() -> dict:
    tols = dict(DEFAULT_TOLERANCES)
    for key in tols:
        raw = os.environ.get(ENV_PREFIX + key.upper())
        if raw is None:
            continue
        try:
            tols[key] = _positive_float(raw)
        except argparse.ArgumentTypeError as exc:
            raise BadArguments(f"{ENV_PREFIX + key.upper()}: {exc}")
    return tols


def _common(p: argparse.ArgumentParser, model=True, sector=True):
    if model:
        p.add_argument("--model", type=_model_name, default="squeezed",
                       help="displaced, squeezed, two-mode or k-harmonic (default squeezed)")
        p.add_argument("--omega", type=float, default=1.0)
        p.add_argument("--g", type=float, default=None, help="coupling (default depends on the model)")
        p.add_argument("--k", type=int, default=None, help="harmonic order for k-harmonic")
    if sector:
        p.add_argument("--sector", type=_fraction, default=None,
                       help="Bargmann index as p/q, e.g. 3/4 (default: lowest sector)")
    p.add_argument("--root-tol", type=_positive_float, default=None)
    p.add_argument("--cf-tol", type=_positive_float, default=None)
    p.add_argument("--scan-tol", type=_positive_float, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None, help="write the report here instead of stdout")
    p.add_argument("--plot-data", default=None, help="also write two-column x y text to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bargspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("spectrum", help="closed-form energies, all sectors merged")
    _common(p)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--kappa-count", type=int, default=DEFAULT_KAPPA_COUNT,
                   help="number of two-mode sectors to merge")

    p = sub.add_parser("roots", help="Bethe roots of a polynomial eigenstate")
    _common(p)
    p.add_argument("--M", type=int, required=True)

    p = sub.add_parser("wavefunction", help="exact eigenstate values, coefficients and norm")
    _common(p)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--z", type=complex, action="append", default=None,
                   help="evaluation point (repeatable; complex like 1+2j allowed)")
    p.add_argument("--n-max", type=int, default=400)
    p.add_argument("--coeffs", type=int, default=10, help="number of Taylor coefficients to report")

    p = sub.add_parser("cf-spectrum", help="eigenvalues as zeros of the continued-fraction F(E)")
    _common(p)
    p.add_argument("--E-min", type=float, default=-1.0)
    p.add_argument("--E-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=400)

    p = sub.add_parser("classify", help="growth classification of the order-k recurrence")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--g", type=float, default=None)
    _common(p, model=False, sector=False)

    p = sub.add_parser("limsup", help="(|K_n| (n!)^w)^(1/n) along a series solution")
    _common(p)
    p.add_argument("--E", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=5000)
    p.add_argument("--solution", choices=("physical", "forward", "minimal"), default="physical")
    p.add_argument("--stride", type=int, default=50, help="report every stride-th L_n")

    p = sub.add_parser("normcheck", help="sector-norm partial sums of the physical series")
    _common(p)
    p.add_argument("--E", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=400)
    p.add_argument("--delta", type=float, default=0.05)

    p = sub.add_parser("oracle", help="truncated-matrix convergence study")
    _common(p)
    p.add_argument("--truncations", type=_int_list, default=[50, 100, 200, 400])
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("verify", help="closed form vs continued fraction vs oracle")
    _common(p)
    p.add_argument("--levels", type=int, default=3, help="levels per sector")
    p.add_argument("--truncation", type=int, default=400)
    p.add_argument("--all", action="store_true",
                   help="run the default parameter sets of all three solvable models")

    p = sub.add_parser("rerun", help="regenerate a JSON report from its embedded argv")
    p.add_argument("report")
    return parser


# ----------------------------------------------------------------------------
# config resolution


def _resolve(args) -> dict:
    tols = _env_tolerances()
    for key in tols:
        val = getattr(args, key, None)
        if val is not None:
            tols[key] = val
    cfg = {"command": args.command, "tolerances": tols}
    if hasattr(args, "model"):
        g = args.g if args.g is not None else DEFAULT_G[args.model]
        k = args.k
        if args.model == "k_harmonic" and k is None:
            k = 3
        model = ModelSpec(ModelKind(args.model), args.omega, g, k)
        cfg["model"] = model
        cfg["sector"] = _sector(model, args.sector)
    return cfg


def _sector(model: ModelSpec, value):
    if value is None:
        return sector_labels(model, 1)[0]
    if model.is_two_mode:
        return SectorLabel.kappa(value)
    return SectorLabel.q(value, model.k)


def _base_report(cfg, method, sector=...) -> dict:
    """Report skeleton; ``sector=None`` marks a merged-sector result."""
    model = cfg.get("model")
    sector = cfg.get("sector") if sector is ... else sector
    return {
        "model": model.kind.value if model else "k_harmonic",
        "omega": model.omega if model else None,
        "g": model.g if model else None,
        "sector": None if sector is None else {"variant": sector.variant, "value": sector.value, "k": sector.k},
        "method": method,
        "tolerances": cfg["tolerances"],
        "results": [],
        "diagnostics": {},
        "version": __version__,
    }


# ----------------------------------------------------------------------------
# subcommands; each returns (report, plot_text or None)


def cmd_spectrum(args, cfg):
    model = cfg["model"]
    sectors = [cfg["sector"]] if args.sector is not None else sector_labels(model, args.kappa_count)
    levels = full_spectrum(model, args.levels, sectors)
    rep = _base_report(cfg, "closed_form", sector=cfg["sector"] if args.sector is not None else None)
    rep["results"] = [{"sector": str(lev.sector.value), "M": lev.M, "E": lev.E} for lev in levels]
    rep["diagnostics"]["levels"] = [lev.E for lev in levels]
    rep["diagnostics"]["sectors"] = [str(s.value) for s in sectors]
    return rep, None


def cmd_roots(args, cfg):
    model, sector = cfg["model"], cfg["sector"]
    rep = _base_report(cfg, "bethe_newton")
    E = exact_energy(model, sector, args.M).E
    if model.kind is ModelKind.DISPLACED or (model.kind is ModelKind.K_HARMONIC and model.k == 1) or model.g == 0:
        state = build_eigenstate(model, sector, args.M)
        roots, residual, iters = state.roots, 0.0, 0
        rep["method"] = "closed_form"
    else:
        roots, info = solve_bethe(bethe_system(model, sector, args.M), cfg["tolerances"]["root_tol"])
        residual, iters = info.max_residual, info.iterations
    rep["results"] = [{"index": i, "root": float(z)} for i, z in enumerate(roots)]
    rep["diagnostics"].update({"E": E, "M": args.M, "max_residual": residual, "iterations": iters})
    if 1 <= args.M <= 2 and rep["method"] == "bethe_newton":
        ref = explicit_roots(model, sector, args.M)
        rep["diagnostics"]["explicit_formula_roots"] = ref
        rep["diagnostics"]["explicit_formula_max_diff"] = float(np.max(np.abs(np.sort(roots) - ref)))
    return rep, None


def cmd_wavefunction(args, cfg):
    model, sector = cfg["model"], cfg["sector"]
    state = build_eigenstate(model, sector, args.M, cfg["tolerances"]["root_tol"])
    rep = _base_report(cfg, "exact_eigenstate")
    zs = args.z or [0j, 0.5 + 0j, 1 + 0j]
    for z in zs:
        psi = eval_wavefunction(state, z)
        rep["results"].append({"z_re": z.real, "z_im": z.imag, "psi_re": psi.real, "psi_im": psi.imag})
    n_max = max(args.n_max, args.coeffs)
    logs, signs = state.taylor(n_max)
    norm = bargmann_norm_sq((logs, signs), sector, args.n_max)
    with np.errstate(over="ignore"):
        coeffs = (signs[: args.coeffs] * np.exp(logs[: args.coeffs])).tolist()
    sample = np.linspace(-2.0, 2.0, 16)
    rep["diagnostics"].update({
        "E": state.E,
        "M": args.M,
        "roots": state.roots,
        "prefactor_rate": state.prefactor_rate,
        "taylor_coefficients": coeffs,
        "norm_sq": norm.value,
        "norm_converged": norm.converged,
        "ode_residual": ode_residual(state, sample),
    })
    plot = render_plot_data(list(zip(range(len(norm.log_partial_sums)), norm.log_partial_sums)))
    return rep, plot


def cmd_cf_spectrum(args, cfg):
    model, sector = cfg["model"], cfg["sector"]
    tols = cfg["tolerances"]
    if not args.E_min < args.E_max:
        raise BadArguments("--E-min must be below --E-max")
    if args.points < 2:
        raise BadArguments("--points must be at least 2")
    scan = scan_spectrum(model, sector, (args.E_min, args.E_max), args.points, tol=tols["scan_tol"],
                         cf_tol=tols["cf_tol"])
    rep = _base_report(cfg, "continued_fraction")
    zeros = [b for b in scan.brackets if b.kind == "zero"]
    poles = [b for b in scan.brackets if b.kind == "pole"]
    rep["results"] = [{"M": b.index, "E": b.E, "F": b.F, "verdict": b.verdict} for b in zeros]
    rep["diagnostics"].update({
        "eigenvalues": [b.E for b in zeros],
        "poles": [b.E for b in poles],
        "grid": {"E_min": args.E_min, "E_max": args.E_max, "points": args.points},
    })
    pairs = list(zip(scan.E_grid.tolist(), scan.F_values.tolist())) + [(b.E, math.nan) for b in poles]
    pairs.sort(key=lambda p: p[0])
    return rep, render_plot_data(pairs)


def _int_if_whole(x: Fraction):
    return int(x) if x.denominator == 1 else str(x)


def cmd_classify(args, cfg):
    rep = classify(args.k, args.omega, args.g)
    out = _base_report(cfg, "newton_puiseux")
    out["omega"], out["g"] = args.omega, args.g
    out["results"] = [{
        "k": rep.k,
        "sigma": _int_if_whole(rep.sigma),
        "tau": _int_if_whole(rep.tau),
        "verdict": rep.verdict,
        "minimal_exists": rep.minimal_exists,
        "predicted_limit": rep.predicted_limit,
    }]
    roots = None
    if rep.characteristic_roots is not None:
        roots = [complex(r) if isinstance(r, complex) else float(r) for r in rep.characteristic_roots]
    out["diagnostics"].update({"points": rep.points, "limit_formula": rep.limit_formula,
                               "characteristic_roots": roots})
    return out, None


def _series(args, gen, n_max):
    if args.solution == "forward":
        return forward_recursion(gen, n_max)
    if args.solution == "minimal":
        return minimal_solution(gen, n_max)
    return physical_solution(gen, n_max)[0]


def cmd_limsup(args, cfg):
    model, sector = cfg["model"], cfg["sector"]
    gen = coeffs_for(model, sector, args.E)
    series = _series(args, gen, args.n_max)
    res = limsup_estimate(gen, args.n_max, series=series)
    rep = _base_report(cfg, f"limsup_{args.solution}")
    stride = max(1, args.stride)
    rep["results"] = [{"n": int(n), "L": float(L)} for n, L in zip(res.n[::stride], res.L[::stride])]
    predicted = None
    if not model.is_two_mode:
        predicted = classify(model.k, model.omega, model.g).predicted_limit
    rep["diagnostics"].update({
        "E": args.E,
        "n_max": args.n_max,
        "weight": res.weight,
        "limit": res.limit,
        "predicted_limit": predicted,
        "relative_error": None if predicted in (None, 0) else abs(res.limit - predicted) / predicted,
        "final_quartile_decreasing": res.decreasing,
    })
    return rep, render_plot_data(list(zip(res.n.tolist(), res.L.tolist())))


def cmd_normcheck(args, cfg):
    model, sector = cfg["model"], cfg["sector"]
    gen = coeffs_for(model, sector, args.E)
    diag = normalizability_diagnostic(gen, args.n_max, delta=args.delta)
    rep = _base_report(cfg, "sector_norm")
    final = diag.log_partial_sums[-1]
    rep["results"] = [{"E": args.E, "verdict": diag.verdict, "F": diag.F, "log_partial_sum": float(final)}]
    rep["diagnostics"].update({"n_max": args.n_max, "delta": args.delta})
    n = np.arange(len(diag.log_partial_sums))
    return rep, render_plot_data(list(zip(n.tolist(), diag.log_partial_sums.tolist())))


def cmd_oracle(args, cfg):
    model, sector = cfg["model"], cfg["sector"]
    study = convergence_study(model, sector, args.truncations, args.m, args.tol)
    rep = _base_report(cfg, "truncated_tridiagonal")
    table = np.array(study.eigen_tables)
    for i in range(args.m):
        rep["results"].append({
            "level": i,
            "verdict": study.verdicts[i],
            "final": float(table[-1, i]),
            "drift": study.drift[i],
            "last_gap": float(study.cauchy_gaps[-1, i]),
        })
    rep["diagnostics"].update({"truncations": study.truncations, "eigen_tables": study.eigen_tables,
                               "converged": study.converged()})
    blocks = [list(zip(study.truncations, table[:, i].tolist())) for i in range(args.m)]
    return rep, render_plot_data(None, blocks=blocks)


def _verify_model(model: ModelSpec, sectors, levels, truncation, tols):
    rows = []
    for sector in sectors:
        closed = [exact_energy(model, sector, M).E for M in range(levels)]
        span = max(closed) - min(closed)
        pad = 0.25 * model.omega
        lo, hi = min(closed) - pad, max(closed) + pad
        points = max(200, int(200 * (span + 2 * pad) / model.omega))
        scan = scan_spectrum(model, sector, (lo, hi), points, tol=tols["scan_tol"], cf_tol=tols["cf_tol"])
        cf = {b.index: b.E for b in scan.brackets if b.kind == "zero"}
        orc = eigenvalues_tridiagonal(build_hamiltonian(model, sector, truncation), levels)
        for M, E in enumerate(closed):
            E_cf = cf.get(M, math.nan)
            E_or = float(orc[M])
            dis = max(abs(E - E_cf), abs(E - E_or), abs(E_cf - E_or))
            if math.isnan(dis):
                dis = math.inf
            rows.append({"model": model.kind.value, "g": model.g, "sector": str(sector.value), "M": M,
                         "E_closed_form": E, "E_cf": E_cf, "E_oracle": E_or, "max_abs_disagreement": dis})
    return rows


def cmd_verify(args, cfg):
    tols = cfg["tolerances"]
    if args.all:
        runs = [ModelSpec(ModelKind(name), 1.0, g) for name, g in VERIFY_DEFAULTS]
    else:
        runs = [cfg["model"]]
    rows = []
    for model in runs:
        if model.is_two_mode:
            sectors = [cfg["sector"]] if args.sector is not None and not args.all else sector_labels(model, 2)
        else:
            sectors = [cfg["sector"]] if args.sector is not None and not args.all else sector_labels(model)
        rows.extend(_verify_model(model, sectors, args.levels, args.truncation, tols))
    rep = _base_report(cfg, "closed_form_vs_cf_vs_oracle", sector=None if args.sector is None else cfg["sector"])
    if args.all:
        rep["model"], rep["omega"], rep["g"] = "all", 1.0, None
    rep["results"] = rows
    worst = max(r["max_abs_disagreement"] for r in rows)
    rep["diagnostics"].update({"max_abs_disagreement": worst, "threshold": VERIFY_TOL,
                               "passed": bool(worst < VERIFY_TOL), "truncation": args.truncation})
    return rep, None


COMMANDS = {
    "spectrum": cmd_spectrum,
    "roots": cmd_roots,
    "wavefunction": cmd_wavefunction,
    "cf-spectrum": cmd_cf_spectrum,
    "classify": cmd_classify,
    "limsup": cmd_limsup,
    "normcheck": cmd_normcheck,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
}


# ----------------------------------------------------------------------------
# entry points


def _config_snapshot(cfg) -> dict:
    snap = {"command": cfg["command"], "tolerances": cfg["tolerances"]}
    if "model" in cfg:
        m = cfg["model"]
        snap.update({"model": m.kind.value, "omega": m.omega, "g": m.g, "k": m.k,
                     "sector": str(cfg["sector"].value)})
    return snap


def _error(kind: str, message: str, code: int, details=None, stream=None) -> int:
    stream = sys.stderr if stream is None else stream
    payload = {"error": {"type": kind, "message": message, "exit_code": code}}
    if details:
        payload["error"]["details"] = details
    stream.write(render_json(payload))
    return code


def run_subcommand(argv, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run the subcommand, emit the report; returns the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(argv)
    try:
        args = build_parser().parse_args(argv)
        if args.command == "rerun":
            return _rerun(args.report, stdout, stderr)
        cfg = _resolve(args)
        report, plot = COMMANDS[args.command](args, cfg)
        report["diagnostics"]["config"] = _config_snapshot(cfg)
        report["diagnostics"]["argv"] = argv
        emit_report(report, args.format, args.output, stream=stdout)
        if args.plot_data and plot is not None:
            with open(args.plot_data, "w") as fh:
                fh.write(plot)
        if args.command == "verify" and not report["diagnostics"]["passed"]:
            return _error("VerificationFailed", "cross-method disagreement above threshold",
                          EXIT_CONVERGENCE, {"max_abs_disagreement": report["diagnostics"]["max_abs_disagreement"]},
                          stderr)
        return EXIT_OK
    except BadArguments as exc:
        return _error("BadArguments", str(exc), EXIT_BAD_ARGS, stream=stderr)
    except DomainError as exc:
        return _error("DomainError", str(exc), EXIT_DOMAIN, stream=stderr)
    except ConvergenceError as exc:
        return _error("ConvergenceError", str(exc), EXIT_CONVERGENCE,
                      json.loads(render_json(exc.details)) if exc.details else None, stderr)
    except OSError as exc:
        return _error("IOError", str(exc), EXIT_DOMAIN, stream=stderr)


def _rerun(path, stdout, stderr) -> int:
    try:
        with open(path) as fh:
            argv = json.load(fh)["diagnostics"]["argv"]
    except (KeyError, TypeError, ValueError) as exc:
        raise BadArguments(f"{path}: not a bargspec JSON report ({exc})")
    if argv and argv[0] == "rerun":
        raise BadArguments("refusing to rerun a rerun")
    return run_subcommand(argv, stdout, stderr)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        return run_subcommand(argv)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
