"""Command-line front end: verify, spectrum, shoot, sweep, oracle.

Exit codes: 0 success, 1 a numerical tolerance was missed (or a numerical
routine failed), 2 invalid input.  Every command writes a table, CSV by
default (header row, floats with 17 significant digits) or JSON with
``--format json``; in CSV mode the run summary goes to stderr as
``# key=value`` lines so stdout stays machine-readable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from cpn_harmonic.errors import BracketError, ConvergenceError, DivergenceError
from cpn_harmonic.geometry import HALF_PI, SpaceParams, gram_oracle, pt_diagonal, trace_p_inv_pdot
from cpn_harmonic.profiles import ClosedFormProfile
from cpn_harmonic.shooting import ShootingConfig, integrate, max_ode_residual, shoot
from cpn_harmonic.solutions import FamilyParam, convergence_gap, holomorphicity_residual
from cpn_harmonic.spectral import (
    SturmLiouvilleProblem,
    closed_spectrum,
    eigen_smallest,
    index_nullity,
    refined_spectrum,
)
from cpn_harmonic.tension import BoundaryData, admissible_k, boundary_gap, ode_residual

EXIT_OK, EXIT_TOLERANCE, EXIT_VALIDATION = 0, 1, 2


class ValidationError(ValueError):
    pass


@dataclass
class Report:
    columns: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    ok: bool = True


# ---------------------------------------------------------------- output


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _json_value(v) -> str:
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    if v is None:
        return "null"
    if isinstance(v, (float, np.floating)) and not math.isfinite(float(v)):
        return "null"
    if isinstance(v, (bool, np.bool_, int, np.integer, float, np.floating)):
        return format_value(v)
    return json.dumps(str(v))


def render(report: Report, fmt: str) -> tuple[str, str]:
    """Return (main output, stderr text)."""
    if fmt == "json":
        payload = {
            "summary": report.summary,
            "columns": list(report.columns),
            "rows": [dict(zip(report.columns, row)) for row in report.rows],
        }
        return _json_value(payload) + "\n", ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([format_value(v) for v in row])
    side = "".join(f"# {k}={format_value(v)}\n" for k, v in report.summary.items())
    return buf.getvalue(), side


# ---------------------------------------------------------------- parsing helpers


def parse_range(spec: str) -> list[float]:
    """START:STOP[:NUM][:lin|log] or a single number; rho = 0 is dropped."""
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            values = [float(parts[0])]
        else:
            if len(parts) > 4:
                raise ValueError
            start, stop = float(parts[0]), float(parts[1])
            if not (math.isfinite(start) and math.isfinite(stop)):
                raise ValidationError(f"range {spec!r} contains non-finite values")
            num, scale = 10, "lin"
            for extra in parts[2:]:
                if extra in ("lin", "log"):
                    scale = extra
                else:
                    num = int(extra)
            if num < 0:
                raise ValueError
            if start > stop:
                values = []
            elif scale == "log":
                if start <= 0:
                    raise ValidationError("log ranges need a positive start")
                values = list(np.geomspace(start, stop, num))
            else:
                values = list(np.linspace(start, stop, num))
    except ValidationError:
        raise
    except ValueError:
        raise ValidationError(f"bad range {spec!r}; expected START:STOP[:NUM][:lin|log]") from None
    if not all(math.isfinite(v) for v in values):
        raise ValidationError(f"range {spec!r} contains non-finite values")
    return [float(v) for v in values if v != 0]


def _params(args) -> SpaceParams:
    try:
        return SpaceParams(args.n, args.p)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _rho(value: float) -> float:
    if not math.isfinite(value) or value == 0:
        raise ValidationError(f"rho must be finite and nonzero, got {value!r}")
    return value


def _interior_grid(size: int, lo: float = 0.0, hi: float = HALF_PI) -> np.ndarray:
    if size < 1:
        raise ValidationError(f"grid must be positive, got {size}")
    return np.linspace(lo, hi, size + 2)[1:-1]


def _holo_max(profile, t) -> float:
    return float(np.max(np.abs(holomorphicity_residual(profile, t))))


# ---------------------------------------------------------------- commands


def cmd_verify(args) -> Report:
    params = _params(args)
    rho = _rho(float(args.rho))
    fp = FamilyParam(rho, args.ell)
    profile = ClosedFormProfile(rho, args.ell)
    t = _interior_grid(args.grid)
    res = np.abs(ode_residual(params, profile, t))
    holo = np.abs(holomorphicity_residual(profile, t))
    rep = Report(["t", "r", "ode_residual", "holomorphicity_residual"])
    rep.rows = [[ti, ri, a, b] for ti, ri, a, b in zip(t, profile(t), res, holo)]
    s = rep.summary
    s["max_ode_residual"] = float(res.max())
    s["max_holomorphicity_residual"] = float(holo.max())
    ok = s["max_ode_residual"] < args.tol_residual and s["max_holomorphicity_residual"] < args.tol_holo
    if args.ell == 0:
        left, right = boundary_gap(profile, BoundaryData(fp.terminal_k), args.eps)
        s["boundary_gap_left"], s["boundary_gap_right"] = left, right
        ok = ok and left < args.tol_gap and right < args.tol_gap
        # closed form of the supremum against a dense sample of [delta, pi/2)
        gap = convergence_gap(rho, args.delta)
        tt = np.linspace(args.delta, HALF_PI - args.eps, 2001)
        sampled = float(np.max(np.abs(profile(tt) - np.sign(rho) * HALF_PI)))
        s["convergence_gap"], s["convergence_gap_sampled"] = gap, sampled
        ok = ok and abs(gap - sampled) < args.tol_residual
    s["ok"] = ok
    rep.ok = ok
    return rep


def cmd_spectrum(args) -> Report:
    params = _params(args)
    rho = _rho(float(args.rho))
    if args.count < 0:
        raise ValidationError("count must be non-negative")
    problem = SturmLiouvilleProblem(params, ClosedFormProfile(rho), args.grid, args.eps)
    if args.levels > 1 or args.eps > 0:
        vals = refined_spectrum(problem, args.count, levels=args.levels, tol=args.tol_null).eigenvalues
    else:
        vals = eigen_smallest(problem, args.count, tol=args.tol_null).eigenvalues
    closed = params.n % 2 == 1 and params.p == (params.n - 1) // 2 and abs(rho) == 1
    cols = ["j", "eigenvalue"] + (["closed_form", "relative_error"] if closed else [])
    rep = Report(cols)
    ok = True
    for j, lam in enumerate(vals):
        row = [j, float(lam)]
        if closed:
            ref = closed_spectrum(params.n, j)
            rel = abs(lam - ref) / max(abs(ref), 1.0)
            ok = ok and rel < args.tol_closed
            row += [ref, rel]
        rep.rows.append(row)
    index, nullity = index_nullity(vals, args.tol_null)
    rep.summary.update(index=index, nullity=nullity, null_tol=args.tol_null)
    if len(vals):
        rep.summary["min_eigenvalue"] = float(vals[0])
    rep.summary["ok"] = ok
    rep.ok = ok
    return rep


def _shooting_config(args) -> ShootingConfig:
    kw = dict(t_start=args.eps, t_end_offset=args.eps, abs_tol=args.tol_abs, rel_tol=args.tol_rel,
              gap_tol=args.tol_gap, match_tol=args.tol_match, n_points=args.points)
    if args.bracket is not None:
        kw["bracket"] = tuple(args.bracket)
    try:
        return ShootingConfig(**kw)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def cmd_shoot(args) -> Report:
    params = _params(args)
    if (args.k is None) == (args.slope is None):
        raise ValidationError("give exactly one of --k or --slope")
    if args.k is not None and not admissible_k(args.k):
        raise ValidationError(f"k must be odd, got {args.k}")
    cfg = _shooting_config(args)
    if args.slope is not None:
        if not math.isfinite(args.slope):
            raise ValidationError("slope must be finite")
        prof = integrate(params, args.slope, cfg)
        gap = abs(prof.r[-1] - prof.k * HALF_PI)
        converged = abs(prof.match_defect) < cfg.match_tol and gap < cfg.gap_tol
        slope, message = args.slope, "fixed slope"
    else:
        result = shoot(params, BoundaryData(args.k), cfg)
        prof, gap, converged = result.profile, result.terminal_gap, result.converged
        slope, message = result.slope, result.message
    s = {
        "slope": float(slope),
        "k": prof.k,
        "terminal_value": float(prof.r[-1]),
        "terminal_gap": float(gap),
        "match_defect": prof.match_defect,
        "max_ode_residual": max_ode_residual(params, prof, 2 * cfg.t_start, HALF_PI - 2 * cfg.t_end_offset),
        "converged": bool(converged),
        "message": message,
    }
    rep = Report(["t", "r", "rdot", "rddot"], summary=s)
    rep.rows = [list(row) for row in zip(prof.t, prof.r, prof.rdot, prof.rddot)]
    rep.ok = bool(converged) and s["max_ode_residual"] < args.tol_residual
    return rep


def _sweep_point(what, params, rho, args):
    if what == "gap":
        return [rho, args.delta, convergence_gap(rho, args.delta)]
    if what == "residual":
        prof = ClosedFormProfile(rho, args.ell)
        t = _interior_grid(args.grid)
        return [rho, float(np.max(np.abs(ode_residual(params, prof, t)))), _holo_max(prof, t)]
    problem = SturmLiouvilleProblem(params, ClosedFormProfile(rho), args.grid, args.eps)
    vals = eigen_smallest(problem, args.count, tol=args.tol_null).eigenvalues
    index, nullity = index_nullity(vals, args.tol_null)
    return [rho, *[float(v) for v in vals], index, nullity]


def cmd_sweep(args) -> Report:
    params = _params(args)
    rhos = parse_range(args.rho)
    if args.what == "gap":
        if not 0 < args.delta < HALF_PI:
            raise ValidationError("delta must lie in (0, pi/2)")
        cols = ["rho", "delta", "gap"]
    elif args.what == "residual":
        cols = ["rho", "max_ode_residual", "max_holomorphicity_residual"]
    else:
        if args.count < 1:
            raise ValidationError("sweep --what spectrum needs --count >= 1")
        cols = ["rho"] + [f"lambda_{j}" for j in range(args.count)] + ["index", "nullity"]
    work = lambda rho: _sweep_point(args.what, params, rho, args)  # noqa: E731
    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(work, rhos))
    else:
        rows = [work(rho) for rho in rhos]
    rep = Report(cols, rows)
    ok = True
    if rows and args.what == "residual":
        ok = max(r[1] for r in rows) < args.tol_residual and max(r[2] for r in rows) < args.tol_holo
    elif rows and args.what == "spectrum":
        rep.summary["min_eigenvalue"] = min(r[1] for r in rows)
        ok = rep.summary["min_eigenvalue"] >= -args.tol_null
    rep.summary.update(points=len(rows), ok=ok)
    rep.ok = ok
    return rep


def cmd_oracle(args) -> Report:
    params = _params(args)
    t = _interior_grid(args.grid)
    a, b = params.first_order_coefficients
    rep = Report(["t", "gram_deviation", "table_deviation", "trace_deviation"])
    for ti in t:
        diag = pt_diagonal(params, ti).matrix()
        dev = float(np.max(np.abs(gram_oracle(params, ti) - diag), initial=0.0))
        tab = float(np.max(np.abs(gram_oracle(params, ti, fields="table") - diag), initial=0.0))
        tr = abs(0.5 * float(trace_p_inv_pdot(params, ti)) - (a / math.tan(ti) - b * math.tan(ti)))
        rep.rows.append([float(ti), dev, tab, tr])
    s = rep.summary
    s["max_gram_deviation"] = max(max(r[1], r[2]) for r in rep.rows)
    s["max_trace_deviation"] = max(r[3] for r in rep.rows)
    rep.ok = s["max_gram_deviation"] < args.tol_oracle and s["max_trace_deviation"] < args.tol_trace
    s["ok"] = rep.ok
    return rep


# ---------------------------------------------------------------- argparse

_COLUMNS = {
    "verify": "columns: t, r, ode_residual, holomorphicity_residual",
    "spectrum": "columns: j, eigenvalue[, closed_form, relative_error when n odd, p=(n-1)/2, |rho|=1]",
    "shoot": "columns: t, r, rdot, rddot (the integrated profile)",
    "sweep": "columns: gap -> rho, delta, gap; residual -> rho, max_ode_residual, "
             "max_holomorphicity_residual; spectrum -> rho, lambda_0.., index, nullity",
    "oracle": "columns: t, gram_deviation, table_deviation, trace_deviation",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpn-harmonic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", choices=("csv", "json"), default="csv")
    output.add_argument("--out", default=None, help="output path (default stdout)")

    def add(name, helptext, n_default=None, p_default=None):
        sp = sub.add_parser(name, parents=[output], help=helptext, epilog=_COLUMNS[name])
        sp.add_argument("--n", type=int, required=n_default is None, default=n_default)
        sp.add_argument("--p", type=int, required=p_default is None, default=p_default)
        return sp

    p = add("verify", "check a closed-form solution r_{rho,l}")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--ell", type=int, default=0)
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--tol-residual", type=float, default=1e-9)
    p.add_argument("--tol-holo", type=float, default=1e-6)
    p.add_argument("--tol-gap", type=float, default=1e-3)

    p = add("spectrum", "equivariant stability spectrum about r_{rho,0}")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--count", type=int, default=4)
    p.add_argument("--grid", type=int, default=511)
    p.add_argument("--levels", type=int, default=3, help="nested grids for Richardson extrapolation")
    p.add_argument("--eps", type=float, default=0.0, help="Dirichlet offset from the singular ends")
    p.add_argument("--tol-null", type=float, default=1e-3)
    p.add_argument("--tol-closed", type=float, default=1e-3)

    p = add("shoot", "solve the boundary problem by shooting")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--slope", type=float, default=None)
    p.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"), default=None)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--tol-abs", type=float, default=1e-12)
    p.add_argument("--tol-rel", type=float, default=1e-10)
    p.add_argument("--tol-gap", type=float, default=1e-6)
    p.add_argument("--tol-match", type=float, default=1e-6)
    p.add_argument("--tol-residual", type=float, default=1e-6)

    p = add("sweep", "scan a range of rho (n, p default to 3, 1)", n_default=3, p_default=1)
    p.add_argument("--what", choices=("residual", "spectrum", "gap"), required=True)
    p.add_argument("--rho", required=True, help="START:STOP[:NUM][:lin|log]")
    p.add_argument("--ell", type=int, default=0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--count", type=int, default=2)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--tol-residual", type=float, default=1e-9)
    p.add_argument("--tol-holo", type=float, default=1e-6)
    p.add_argument("--tol-null", type=float, default=1e-3)

    p = add("oracle", "compare the Gram-matrix construction of P_t with its closed form")
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--tol-oracle", type=float, default=1e-12)
    p.add_argument("--tol-trace", type=float, default=1e-10)
    return parser


def _glue_negative_values(argv: list[str]) -> list[str]:
    # "--rho -5:5" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--rho" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--rho={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


COMMANDS = {
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "shoot": cmd_shoot,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        report = COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (BracketError, DivergenceError, ConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except ValueError as exc:
        # domain and parameter checks raised inside the library
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    text, side = render(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        _write_quietly(sys.stdout, text)
    if side:
        _write_quietly(sys.stderr, side)
    return EXIT_OK if report.ok else EXIT_TOLERANCE


def _write_quietly(stream, text: str) -> None:
    try:
        stream.write(text)
        stream.flush()
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); not an error of ours.
        # Point the descriptor at devnull so the interpreter's final flush is silent.
        os.dup2(os.open(os.devnull, os.O_WRONLY), stream.fileno())


if __name__ == "__main__":
    sys.exit(main())
