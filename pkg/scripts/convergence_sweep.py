"""Uniform convergence of arctan(rho tan t) to pi/2 on [delta, pi/2) as rho grows.

The sup-gap is attained at t = delta and decays like 1 / (rho tan delta).
"""

import argparse

import numpy as np

from cpn_harmonic import convergence_gap


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--deltas", type=float, nargs="+", default=[0.01, 0.1, 0.5])
    ap.add_argument("--rho-max", type=float, default=1e6)
    ap.add_argument("--num", type=int, default=7)
    args = ap.parse_args()

    rhos = np.geomspace(1.0, args.rho_max, args.num)
    print("rho," + ",".join(f"gap(delta={d:g}),rho*tan(delta)*gap" for d in args.deltas))
    for rho in rhos:
        cells = []
        for d in args.deltas:
            g = convergence_gap(rho, d)
            cells += [f"{g:.6e}", f"{rho * np.tan(d) * g:.6f}"]
        print(f"{rho:.6g}," + ",".join(cells))


if __name__ == "__main__":
    main()
