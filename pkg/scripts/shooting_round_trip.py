"""Integrate from prescribed initial slopes and compare with the closed-form family.

Every slope a lands on arctan(a tan t), so the terminal value pi/2 does not pin
down a: the boundary-value problem for k = +-1 has a one-parameter family of
solutions.  The table shows this together with the recovery error.
"""

import argparse

import numpy as np

from cpn_harmonic import SpaceParams, ShootingConfig, integrate, shoot
from cpn_harmonic.geometry import HALF_PI
from cpn_harmonic.shooting import max_ode_residual
from cpn_harmonic.tension import BoundaryData


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--p", type=int, default=1)
    ap.add_argument("--slopes", type=float, nargs="+", default=[-4, -1, -0.25, 0.25, 1, 4])
    args = ap.parse_args()

    sp = SpaceParams(args.n, args.p)
    cfg = ShootingConfig()
    eps = cfg.t_start
    print(f"{'slope':>8} {'k':>3} {'terminal gap':>13} {'sup error':>11} {'residual':>11} {'end slope':>12}")
    for a in args.slopes:
        prof = integrate(sp, a, cfg)
        err = np.max(np.abs(prof.r - np.arctan(a * np.tan(prof.t))))
        gap = abs(prof.r[-1] - prof.k * HALF_PI)
        res = max_ode_residual(sp, prof, 2 * eps, HALF_PI - 2 * eps)
        print(f"{a:8.3f} {prof.k:3d} {gap:13.3e} {err:11.3e} {res:11.3e} {prof.terminal_slope:12.6f}")

    res = shoot(sp, BoundaryData(1), cfg)
    print(f"# shoot k=1 in {cfg.bracket}: slope={res.slope:.12g} gap={res.terminal_gap:.3e} "
          f"converged={res.converged} ({res.message})")


if __name__ == "__main__":
    main()
