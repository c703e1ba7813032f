"""Shooting solver for the singular boundary value problem of the reduced ODE.

Forward integration from t = 0 alone cannot reach t = pi/2: near the far
singular orbit the linearised equation has a mode growing like
(pi/2 - t)^-(2p+1), so any local error is amplified without bound.  The
solver therefore integrates two legs, each away from its own singular point:

* forward from t_start with r ~ a t + c3(a) t^3 up to a fitting point t_m;
* backward from pi/2 - t_end_offset with r ~ k pi/2 + b tau + c3(b) tau^3,
  tau = pi/2 - t.  Writing r = k pi/2 + q(tau) with k odd turns the ODE into
  itself with p replaced by n - 1 - p, so the same kernel serves both legs.

The terminal slope b is fixed by matching r at t_m (Newton on the variational
equation, safeguarded by bisection).  The left-over jump in rdot at t_m is the
shooting defect; it vanishes exactly when the forward trajectory is a regular
solution reaching k pi/2.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from cpn_harmonic.errors import BracketError, ConvergenceError, DivergenceError
from cpn_harmonic.geometry import HALF_PI, SpaceParams
from cpn_harmonic.profiles import NumericProfile
from cpn_harmonic.tension import BoundaryData, admissible_k, ode_residual, ode_rhs


@dataclass(frozen=True)
class ShootingConfig:
    t_start: float = 1e-6
    t_end_offset: float = 1e-6
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_bisection_iters: int = 200
    bracket: tuple[float, float] = (0.5, 2.0)
    t_match: float = 0.25 * math.pi
    n_points: int = 2001
    match_tol: float = 1e-6
    gap_tol: float = 1e-6
    blowup: float = 50.0
    max_newton_iters: int = 60

    def __post_init__(self):
        if not 0 < self.t_start < HALF_PI - self.t_end_offset:
            raise ValueError("need 0 < t_start < pi/2 - t_end_offset")
        if self.t_end_offset <= 0:
            raise ValueError("t_end_offset must be positive")
        if self.t_start > 1e-3 or self.t_end_offset > 1e-3:
            raise ValueError("series start needs t_start, t_end_offset <= 1e-3")
        if min(self.abs_tol, self.rel_tol, self.match_tol, self.gap_tol) <= 0:
            raise ValueError("tolerances must be positive")
        if not self.t_start < self.t_match < HALF_PI - self.t_end_offset:
            raise ValueError("t_match must lie strictly between the two start points")
        if self.n_points < 2:
            raise ValueError("n_points must be at least 2")

    @property
    def step_control(self) -> tuple[float, float]:
        return self.abs_tol, self.rel_tol

    @property
    def max_slope(self) -> float:
        # keeps |slope * t0| <= 1e-3 so the dropped O(t0^5) series terms stay below 1e-15
        return 1e-3 / max(self.t_start, self.t_end_offset)


def _cubic_coefficient_parts(params: SpaceParams) -> tuple[float, float, float]:
    """(alpha, beta, gamma) with c3(a) = (alpha a - beta a^3) / gamma.

    Obtained by substituting r = a t + c t^3 into the ODE and collecting the
    O(t) terms; the O(1/t) terms cancel identically because 2n-2p-1 = 2(n-p-1)+1.
    """
    big_a, big_b = params.first_order_coefficients
    p, q = params.p, params.n - params.p - 1
    alpha = big_a / 3 + big_b - 2 * p + 2 * q / 3 + 4 / 3
    beta = 4 * q / 3 + 8 / 3
    gamma = 5 + 3 * big_a - 2 * q
    return alpha, beta, gamma


def cubic_coefficient(params: SpaceParams, a: float) -> float:
    alpha, beta, gamma = _cubic_coefficient_parts(params)
    return (alpha * a - beta * a**3) / gamma


def series_start(params: SpaceParams, a: float, t0: float) -> tuple[float, float]:
    """(r(t0), rdot(t0)) from the local expansion r = a t + c3 t^3 at the singular end."""
    if not 0 < t0 <= 1e-3:
        raise ValueError(f"series start requires 0 < t0 <= 1e-3, got {t0!r}")
    c3 = cubic_coefficient(params, a)
    return a * t0 + c3 * t0**3, a + 3 * c3 * t0**2


def _series_sensitivity(params: SpaceParams, a: float, t0: float) -> tuple[float, float]:
    alpha, beta, gamma = _cubic_coefficient_parts(params)
    dc3 = (alpha - 3 * beta * a * a) / gamma
    return t0 + dc3 * t0**3, 1.0 + 3 * dc3 * t0**2


def _make_rhs(params: SpaceParams, sensitivity: bool):
    big_a, big_b = params.first_order_coefficients
    p, q = params.p, params.n - params.p - 1
    sin, cos = math.sin, math.cos

    def rhs(t, y):
        r, v = y[0], y[1]
        st, ct = sin(t), cos(t)
        s2t = sin(2 * t)
        c1 = big_a * ct / st - big_b * st / ct
        c2 = p / (ct * ct) - q / (st * st)
        acc = -c1 * v - c2 * sin(2 * r) + sin(4 * r) / (s2t * s2t)
        if not sensitivity:
            return [v, acc]
        jac_r = -2 * c2 * cos(2 * r) + 4 * cos(4 * r) / (s2t * s2t)
        return [v, acc, y[3], -c1 * y[3] + jac_r * y[2]]

    return rhs


def _integrate_leg(params: SpaceParams, slope: float, t0: float, t1: float,
                   cfg: ShootingConfig, sensitivity: bool = False):
    """Integrate from the singular end t0 (series start) to t1 with dense output."""
    y0 = list(series_start(params, slope, t0))
    if sensitivity:
        y0 += list(_series_sensitivity(params, slope, t0))

    def blowup(t, y):
        return cfg.blowup - abs(y[0])

    blowup.terminal = True
    sol = solve_ivp(
        _make_rhs(params, sensitivity),
        (t0, t1),
        y0,
        method="DOP853",
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        dense_output=True,
        events=blowup,
    )
    if sol.status == -1:
        raise DivergenceError(f"integration failed: {sol.message}", float(sol.t[-1]))
    if sol.status == 1:
        raise DivergenceError(f"|r| exceeded {cfg.blowup}", float(sol.t[-1]))
    if not np.all(np.isfinite(sol.y[:, -1])):
        raise DivergenceError("non-finite state", float(sol.t[-1]))
    return sol


def _nearest_odd(x: float) -> int:
    return 2 * int(round((x - 1.0) / 2.0)) + 1


def _terminal_slope(params: SpaceParams, target: float, cfg: ShootingConfig):
    """Find b with q(tau_m; b) = target for the backward leg (swapped parameters).

    Returns (b, solution).  q is increasing in b along the solution family
    (its Jacobi field does not vanish inside the interval), so Newton steps are
    safeguarded by a bisection bracket in b.
    """
    swapped = params.swapped()
    tau0, tau_m = cfg.t_end_offset, HALF_PI - cfg.t_match
    lo, hi = -cfg.max_slope, cfg.max_slope
    b = float(np.clip(target / tau_m, 0.9 * lo, 0.9 * hi))
    last_err = None
    for _ in range(cfg.max_newton_iters):
        try:
            sol = _integrate_leg(swapped, b, tau0, tau_m, cfg, sensitivity=True)
            f = sol.y[0, -1] - target
            df = sol.y[2, -1]
        except DivergenceError as exc:
            last_err = exc
            f, df, sol = math.nan, math.nan, None
        if sol is not None and abs(f) <= 1e-13 * max(1.0, abs(target)):
            return b, sol
        if sol is not None:
            if f < 0:
                lo = b
            else:
                hi = b
        else:
            # diverged: shrink toward the origin of slopes
            if b > 0:
                hi = b
            else:
                lo = b
        step_ok = sol is not None and df > 0 and np.isfinite(df)
        b_new = b - f / df if step_ok else math.nan
        if not (step_ok and lo < b_new < hi):
            b_new = 0.5 * (lo + hi)
        if abs(b_new - b) <= 1e-15 * max(1.0, abs(b)):
            if sol is not None and abs(f) <= 1e-9 * max(1.0, abs(target)):
                return b, sol
            break
        b = b_new
        if hi - lo <= 1e-15 * max(1.0, abs(b)):
            break
    msg = f"could not match r = {target:+.6g} (relative to k pi/2) at the fitting point"
    if last_err is not None:
        msg += f"; last integration error: {last_err}"
    raise ConvergenceError(msg)


class ShotProfile(NumericProfile):
    """Numeric profile produced by :func:`integrate`, with the shooting bookkeeping."""

    def __init__(self, t, r, rdot, rddot, *, slope, terminal_slope, k, match_defect, t_match):
        super().__init__(t, r, rdot, rddot)
        self.slope = slope
        self.terminal_slope = terminal_slope
        self.k = k
        self.match_defect = match_defect
        self.t_match = t_match


def output_grid(cfg: ShootingConfig) -> np.ndarray:
    t_lo, t_hi = cfg.t_start, HALF_PI - cfg.t_end_offset
    uniform = np.linspace(t_lo, t_hi, cfg.n_points)
    h = uniform[1] - uniform[0] if cfg.n_points > 1 else t_hi - t_lo
    # geometric clustering toward both singular ends
    left = np.geomspace(t_lo, max(h, 2 * t_lo), 40)
    right = HALF_PI - np.geomspace(cfg.t_end_offset, max(h, 2 * cfg.t_end_offset), 40)
    grid = np.unique(np.concatenate([uniform, left, right, [cfg.t_match]]))
    return grid[(grid >= t_lo) & (grid <= t_hi)]


def integrate(params: SpaceParams, a: float, cfg: ShootingConfig | None = None,
              k: int | None = None) -> ShotProfile:
    """Integrate the ODE for the regular solution with r'(0+) = a.

    ``k`` selects the terminal value k pi/2 of the backward leg; by default it is
    the odd multiple of pi/2 nearest to r(t_m).
    """
    cfg = cfg or ShootingConfig()
    if not np.isfinite(a):
        raise ValueError(f"slope must be finite, got {a!r}")
    if abs(a) > cfg.max_slope:
        raise ValueError(f"|slope| must not exceed {cfg.max_slope:g} for the series start")
    fwd = _integrate_leg(params, a, cfg.t_start, cfg.t_match, cfg)
    r_m, v_m = fwd.y[0, -1], fwd.y[1, -1]
    if k is None:
        k = _nearest_odd(r_m / HALF_PI)
    elif not admissible_k(k):
        raise ValueError(f"k must be odd, got {k!r}")
    b, bwd = _terminal_slope(params, r_m - k * HALF_PI, cfg)

    grid = output_grid(cfg)
    left = grid <= cfg.t_match
    r = np.empty_like(grid)
    rdot = np.empty_like(grid)
    r[left], rdot[left] = fwd.sol(grid[left])[:2]
    tau = HALF_PI - grid[~left]
    q, dq = bwd.sol(tau)[:2]
    r[~left] = k * HALF_PI + q
    rdot[~left] = -dq
    rddot = ode_rhs(params, grid, r, rdot)
    defect = float(-bwd.y[1, -1] - v_m)
    return ShotProfile(grid, r, rdot, rddot, slope=float(a), terminal_slope=float(-b), k=int(k),
                       match_defect=defect, t_match=cfg.t_match)


def max_ode_residual(params: SpaceParams, profile: NumericProfile, lo: float, hi: float,
                     midpoints: bool = False) -> float:
    """Largest |ODE residual| over the profile nodes lying in [lo, hi].

    At the nodes rddot is the ODE value, so this measures how consistently the
    stored triple was assembled.  ``midpoints=True`` also samples the Hermite
    interpolant halfway between nodes; near the singular ends that residual is
    dominated by conditioning (d rddot / d r grows like 1/tau^2) rather than by
    the accuracy of r itself.
    """
    t = profile.t
    pts = np.concatenate([t, 0.5 * (t[1:] + t[:-1])]) if midpoints else t
    pts = np.sort(pts[(pts >= lo) & (pts <= hi)])
    if len(pts) == 0:
        return 0.0
    return float(np.max(np.abs(ode_residual(params, profile, pts))))


@dataclass
class ShotResult:
    slope: float
    profile: ShotProfile
    terminal_value: float
    terminal_gap: float
    converged: bool
    k: int
    match_defect: float
    iterations: int = 0
    message: str = ""


def _shot(params, a, k, cfg) -> ShotResult:
    prof = integrate(params, a, cfg, k=k)
    terminal = float(prof.r[-1])
    gap = abs(terminal - k * HALF_PI)
    ok = abs(prof.match_defect) < cfg.match_tol and gap < cfg.gap_tol
    return ShotResult(a, prof, terminal, gap, ok, k, prof.match_defect)


def _safe_shot(params, a, k, cfg):
    try:
        return _shot(params, a, k, cfg)
    except (ConvergenceError, DivergenceError):
        return None


def shoot(params: SpaceParams, boundary: BoundaryData | int, cfg: ShootingConfig | None = None) -> ShotResult:
    """Find a slope a in ``cfg.bracket`` whose solution reaches k pi/2 regularly.

    Root-finds the shooting defect (regula falsi with bisection fallback).  The
    problem is degenerate along the explicit family, where the defect vanishes
    for a whole interval of slopes; any slope meeting both ``match_tol`` and
    ``gap_tol`` is accepted, so the result is not unique.
    """
    cfg = cfg or ShootingConfig()
    k = boundary.k if isinstance(boundary, BoundaryData) else boundary
    if not admissible_k(k):
        raise ValueError(f"k must be odd, got {k!r}")
    a_lo, a_hi = sorted(cfg.bracket)
    ends = [_safe_shot(params, a, k, cfg) for a in (a_lo, a_hi)]
    good = [s for s in ends if s is not None and s.converged]
    if good:
        best = min(good, key=lambda s: s.terminal_gap)
        best.message = "bracket endpoint already satisfies the boundary problem"
        return best
    lo, hi = ends
    if lo is None or hi is None:
        raise BracketError(f"no regular solution to k={k} at a bracket endpoint {cfg.bracket}")
    matched = [s for s in ends if abs(s.match_defect) < cfg.match_tol]
    if matched:
        best = min(matched, key=lambda s: s.terminal_gap)
        best.message = f"matched, but terminal gap {best.terminal_gap:.3g} >= gap_tol"
        return best
    f_lo, f_hi = lo.match_defect, hi.match_defect
    if np.sign(f_lo) == np.sign(f_hi):
        raise BracketError(
            f"shooting defect has no sign change on [{a_lo}, {a_hi}] "
            f"(defects {f_lo:.3g}, {f_hi:.3g})"
        )
    side = 0
    res = lo
    for it in range(1, cfg.max_bisection_iters + 1):
        a = (a_lo * f_hi - a_hi * f_lo) / (f_hi - f_lo)
        if not a_lo < a < a_hi:
            a = 0.5 * (a_lo + a_hi)
        res = _safe_shot(params, a, k, cfg)
        if res is None:
            a = 0.5 * (a_lo + a_hi)
            res = _safe_shot(params, a, k, cfg)
            if res is None:
                raise ConvergenceError(f"integration failed inside bracket at a={a:.17g}")
        res.iterations = it
        f = res.match_defect
        if abs(f) < cfg.match_tol:
            res.message = "defect root found"
            if not res.converged:
                res.message += f"; terminal gap {res.terminal_gap:.3g} >= gap_tol"
            return res
        # Illinois modification keeps the false-position update from stalling
        if np.sign(f) == np.sign(f_hi):
            a_hi, f_hi = a, f
            if side == -1:
                f_lo *= 0.5
            side = -1
        else:
            a_lo, f_lo = a, f
            if side == 1:
                f_hi *= 0.5
            side = 1
    res.converged = False
    res.message = f"no convergence after {cfg.max_bisection_iters} iterations"
    return res


def shoot_slopes(params: SpaceParams, slopes, cfg: ShootingConfig | None = None,
                 workers: int = 1) -> list[ShotProfile]:
    """Integrate several slopes, optionally concurrently; results keep input order."""
    cfg = cfg or ShootingConfig()
    if workers <= 1:
        return [integrate(params, a, cfg) for a in slopes]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda a: integrate(params, a, cfg), slopes))


def with_tolerances(cfg: ShootingConfig, abs_tol: float, rel_tol: float) -> ShootingConfig:
    return replace(cfg, abs_tol=abs_tol, rel_tol=rel_tol)
