"""Grid refinement of the equivariant spectrum about r = arctan(rho tan t).

Prints raw eigenvalues on nested grids, the Richardson-extrapolated values and,
for the identity-type cases, the closed-form values.
"""

import argparse

import numpy as np

from cpn_harmonic import SpaceParams, SturmLiouvilleProblem, closed_spectrum, eigen_smallest, refined_spectrum
from cpn_harmonic.profiles import ClosedFormProfile


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--p", type=int, default=1)
    ap.add_argument("--rho", type=float, default=1.0)
    ap.add_argument("--count", type=int, default=4)
    ap.add_argument("--base", type=int, default=127, help="coarsest grid (interior nodes)")
    ap.add_argument("--levels", type=int, default=5)
    args = ap.parse_args()

    sp = SpaceParams(args.n, args.p)
    prob = SturmLiouvilleProblem(sp, ClosedFormProfile(args.rho), grid_size=args.base)
    closed = None
    if args.n % 2 == 1 and 2 * args.p == args.n - 1 and abs(args.rho) == 1:
        closed = np.array([closed_spectrum(args.n, j) for j in range(args.count)])

    print(f"# n={args.n} p={args.p} rho={args.rho}")
    for k in range(args.levels):
        m = (args.base + 1) * 2**k - 1
        vals = eigen_smallest(prob.with_grid(m), args.count).eigenvalues
        line = " ".join(f"{v:16.10f}" for v in vals)
        if closed is not None:
            line += "   err " + " ".join(f"{e:9.2e}" for e in np.abs(vals - closed))
        print(f"N={m:6d}  {line}")
    ref = refined_spectrum(prob, args.count, levels=args.levels)
    print("richardson  " + " ".join(f"{v:16.10f}" for v in ref.eigenvalues))
    if closed is not None:
        print("closed      " + " ".join(f"{v:16.10f}" for v in closed))
    print(f"# index={ref.index} nullity={ref.nullity}")


if __name__ == "__main__":
    main()
