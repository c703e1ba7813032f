"""Equivariant stability spectrum of a (k, r)-map.

The Jacobi operator restricted to equivariant variations xi(t) along the normal
geodesic is the Sturm-Liouville operator

    L xi = -(w xi')' / w + V xi,   w(t) = sin^(2n-2p-1) t cos^(2p+1) t,

with V = 1/2 Tr(P_t^-1 P''(r)).  It is discretised by second-order finite
differences in flux form and symmetrised with eta = sqrt(w) xi, giving a
symmetric tridiagonal matrix.  Both endpoints are regular-singular; the
potential confines eigenfunctions like t (resp. pi/2 - t), so homogeneous
Dirichlet conditions at the endpoints (eps = 0) are consistent.  With eps > 0
the shift in each eigenvalue scales like eps^(2 min(n-p, p+1)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from cpn_harmonic.errors import ConvergenceError, DomainError
from cpn_harmonic.geometry import HALF_PI, SpaceParams, check_open_interval, trace_p_inv_pddot_shifted
from cpn_harmonic.jacobi import JacobiParams, jacobi_eval
from cpn_harmonic.profiles import ClosedFormProfile, Profile
from cpn_harmonic.solutions import deformation_mode_derivatives

DEFAULT_NULL_TOL = 1e-3


def weight(params: SpaceParams, t):
    t = np.asarray(t, dtype=float)
    a, b = params.first_order_coefficients
    return np.sin(t) ** a * np.cos(t) ** b


def log_weight_derivative(params: SpaceParams, t):
    """(log w)' computed from w by the quotient of its derivative, independent of the ODE coefficients."""
    t = check_open_interval(t)
    a, b = params.first_order_coefficients
    s, c = np.sin(t), np.cos(t)
    dw = a * s ** (a - 1) * c ** (b + 1) - b * s ** (a + 1) * c ** (b - 1)
    return dw / weight(params, t)


def potential(params: SpaceParams, profile: Profile, t):
    """V(t) = 2(n-p-1) cos 2r / sin^2 t - 2p cos 2r / cos^2 t + 4 cos 4r / sin^2 2t."""
    t = check_open_interval(t)
    s = profile.sample(t)
    q = params.n - params.p - 1
    return (
        2 * q * s.cos2r / np.sin(t) ** 2
        - 2 * params.p * s.cos2r / np.cos(t) ** 2
        + 4 * s.cos4r / np.sin(2 * t) ** 2
    )


def potential_via_traces(params: SpaceParams, profile: Profile, t):
    """Same potential as 1/2 Tr(P_t^-1 P''(r))."""
    t = check_open_interval(t)
    return 0.5 * trace_p_inv_pddot_shifted(params, t, profile(t))


@dataclass(frozen=True)
class SturmLiouvilleProblem:
    """Equivariant stability problem about ``profile`` on (eps, pi/2 - eps).

    ``eps = 0`` puts the Dirichlet conditions at the singular orbits themselves;
    only interior nodes are ever evaluated.
    """

    params: SpaceParams
    profile: Profile
    grid_size: int = 2000
    eps: float = 0.0

    def __post_init__(self):
        if int(self.grid_size) != self.grid_size or self.grid_size < 16:
            raise ValueError(f"grid_size must be an integer >= 16, got {self.grid_size!r}")
        if not 0 <= self.eps < 0.25 * np.pi:
            raise DomainError(f"eps must lie in [0, pi/4), got {self.eps!r}")

    @property
    def domain(self) -> tuple[float, float]:
        return self.eps, HALF_PI - self.eps

    @property
    def spacing(self) -> float:
        lo, hi = self.domain
        return (hi - lo) / (self.grid_size + 1)

    def grid(self) -> np.ndarray:
        """Interior nodes (grid_size of them); the Dirichlet ends are excluded."""
        lo, hi = self.domain
        return np.linspace(lo, hi, self.grid_size + 2)[1:-1]

    def with_grid(self, grid_size: int) -> "SturmLiouvilleProblem":
        return SturmLiouvilleProblem(self.params, self.profile, grid_size, self.eps)

    def with_eps(self, eps: float) -> "SturmLiouvilleProblem":
        return SturmLiouvilleProblem(self.params, self.profile, self.grid_size, eps)


@dataclass(frozen=True)
class TridiagonalOperator:
    diagonal: np.ndarray
    offdiagonal: np.ndarray
    grid: np.ndarray
    weight: np.ndarray
    spacing: float

    def dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.offdiagonal, 1) + np.diag(self.offdiagonal, -1)


def discretize(problem: SturmLiouvilleProblem) -> TridiagonalOperator:
    """Symmetric tridiagonal form of L on the interior grid.

    Flux form with midpoint weights: (L xi)_i = -[w_{i+1/2}(xi_{i+1} - xi_i)
    - w_{i-1/2}(xi_i - xi_{i-1})] / (h^2 w_i) + V_i xi_i; conjugating by
    diag(sqrt w_i) makes the off-diagonal entries
    -w_{i+1/2} / (h^2 sqrt(w_i w_{i+1})).
    """
    params = problem.params
    t = problem.grid()
    h = problem.spacing
    lo, hi = problem.domain
    mid = np.linspace(lo, hi, problem.grid_size + 2)
    mid = 0.5 * (mid[:-1] + mid[1:])
    w_node = weight(params, t)
    w_mid = weight(params, mid)
    diag = (w_mid[:-1] + w_mid[1:]) / (h * h * w_node) + potential(params, problem.profile, t)
    off = -w_mid[1:-1] / (h * h * np.sqrt(w_node[:-1] * w_node[1:]))
    return TridiagonalOperator(diag, off, t, w_node, h)


@dataclass(frozen=True)
class SpectrumResult:
    """Smallest eigenvalues of L with eigenvectors normalised in L^2(w dt)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)  # shape (count, grid_size)
    grid: np.ndarray = field(repr=False)
    weight: np.ndarray = field(repr=False)
    spacing: float = 0.0
    tol: float = DEFAULT_NULL_TOL

    @property
    def index(self) -> int:
        return index_nullity(self)[0]

    @property
    def nullity(self) -> int:
        return index_nullity(self)[1]

    def gram(self) -> np.ndarray:
        """Weighted inner products sum_i h w_i xi_a(t_i) xi_b(t_i)."""
        v = self.eigenvectors
        return (v * (self.spacing * self.weight)) @ v.T


def eigen_smallest(problem: SturmLiouvilleProblem, count: int, tol: float = DEFAULT_NULL_TOL) -> SpectrumResult:
    if int(count) != count or count < 0:
        raise ValueError(f"count must be a non-negative integer, got {count!r}")
    if count > problem.grid_size // 4:
        raise ValueError(f"count must not exceed grid_size/4 = {problem.grid_size // 4}")
    op = discretize(problem)
    if count == 0:
        return SpectrumResult(np.empty(0), np.empty((0, len(op.grid))), op.grid, op.weight, op.spacing, tol)
    try:
        vals, vecs = eigh_tridiagonal(
            op.diagonal, op.offdiagonal, select="i", select_range=(0, count - 1), lapack_driver="stemr"
        )
    except LinAlgError as exc:
        raise ConvergenceError(
            f"tridiagonal eigensolver failed (n={problem.params.n}, p={problem.params.p}, "
            f"grid_size={problem.grid_size}, count={count}): {exc}"
        ) from exc
    # eta = sqrt(w) xi is Euclidean-orthonormal; rescale so that sum h w xi^2 = 1
    xi = (vecs / np.sqrt(op.spacing * op.weight)[:, None]).T
    # fix the sign so each eigenfunction starts positive
    for row in xi:
        nz = np.flatnonzero(np.abs(row) > 1e-12 * np.max(np.abs(row)))
        if len(nz) and row[nz[0]] < 0:
            row *= -1
    return SpectrumResult(vals, xi, op.grid, op.weight, op.spacing, tol)


def index_nullity(result, tol: float | None = None) -> tuple[int, int]:
    """(number of eigenvalues < -tol, number in [-tol, tol]).

    Accepts a SpectrumResult or a plain array of eigenvalues.
    """
    if isinstance(result, SpectrumResult):
        vals = result.eigenvalues
        tol = result.tol if tol is None else tol
    else:
        vals = np.asarray(result, dtype=float)
        tol = DEFAULT_NULL_TOL if tol is None else tol
    return int(np.sum(vals < -tol)), int(np.sum(np.abs(vals) <= tol))


def eps_exponent(params: SpaceParams) -> int:
    """Order of the eigenvalue shift from Dirichlet conditions at eps instead of 0."""
    return 2 * min(params.n - params.p, params.p + 1)


@dataclass(frozen=True)
class RefinedSpectrum:
    eigenvalues: np.ndarray
    levels: tuple  # raw eigenvalue arrays on each grid
    grid_sizes: tuple
    eps_values: tuple
    tol: float = DEFAULT_NULL_TOL

    @property
    def index(self) -> int:
        return index_nullity(self.eigenvalues, self.tol)[0]

    @property
    def nullity(self) -> int:
        return index_nullity(self.eigenvalues, self.tol)[1]


def _richardson(values: list[np.ndarray]) -> np.ndarray:
    # grids are nested with h halving; the scheme is O(h^2) with an even expansion
    table = [np.asarray(v, dtype=float) for v in values]
    power = 2
    while len(table) > 1:
        f = 2.0**power
        table = [(f * fine - coarse) / (f - 1) for coarse, fine in zip(table[:-1], table[1:])]
        power += 2
    return table[0]


def refined_spectrum(problem: SturmLiouvilleProblem, count: int, levels: int = 3,
                     tol: float = DEFAULT_NULL_TOL) -> RefinedSpectrum:
    """Richardson-extrapolated spectrum over nested grids, then extrapolated to eps -> 0.

    Grids use N_k = (N_0 + 1) 2^k - 1 interior nodes so that each halves the
    previous spacing.  For eps > 0 the same is repeated at eps/2 and the pair is
    extrapolated with the exponent from :func:`eps_exponent`.
    """
    if levels < 1:
        raise ValueError("levels must be at least 1")
    n0 = problem.grid_size
    sizes = tuple((n0 + 1) * 2**k - 1 for k in range(levels))

    def at_eps(eps):
        base = problem.with_eps(eps)
        raw = [eigen_smallest(base.with_grid(m), count, tol).eigenvalues for m in sizes]
        return raw, _richardson(raw)

    raw, value = at_eps(problem.eps)
    eps_values = (problem.eps,)
    if problem.eps > 0 and count > 0:
        raw_half, half = at_eps(0.5 * problem.eps)
        f = 2.0 ** eps_exponent(problem.params)
        value = (f * half - value) / (f - 1)
        raw = raw + raw_half
        eps_values = (problem.eps, 0.5 * problem.eps)
    return RefinedSpectrum(value, tuple(raw), sizes, eps_values, tol)


def closed_spectrum(n: int, j: int) -> float:
    """4 j (j + n + 2), the equivariant eigenvalues about rho = +-1 for n odd, p = (n-1)/2."""
    if int(n) != n or n < 1 or n % 2 == 0:
        raise ValueError(f"closed spectrum needs odd n, got n={n!r}")
    if int(j) != j or j < 0:
        raise ValueError(f"j must be a non-negative integer, got {j!r}")
    return 4.0 * j * (j + n + 2)


def closed_eigenfunction_t(n: int, j: int, t):
    """sin 2t * P_j^(a, a)(-cos 2t), a = (n+1)/2: the line eigenfunction pulled back to t."""
    if int(n) != n or n < 1 or n % 2 == 0:
        raise ValueError(f"n must be odd, got {n!r}")
    t = check_open_interval(t)
    jp = JacobiParams((n + 1) / 2, (n + 1) / 2, j)
    return np.sin(2 * t) * jacobi_eval(jp, -np.cos(2 * t))


def apply_operator(params: SpaceParams, profile: Profile, t, xi, dxi, ddxi, lam: float = 0.0):
    """-(xi'' + (log w)' xi') + V xi - lam xi, given xi and its derivatives at t."""
    t = check_open_interval(t)
    a, b = params.first_order_coefficients
    c1 = a / np.tan(t) - b * np.tan(t)
    return -ddxi - c1 * dxi + potential(params, profile, t) * xi - lam * xi


def zero_mode_residual(params: SpaceParams, rho: float, t):
    """L applied to d r_{rho,0} / d rho about r_{rho,0}; vanishes identically."""
    if rho == 0:
        raise ValueError("rho must be nonzero")
    xi, dxi, ddxi = deformation_mode_derivatives(rho, t)
    return apply_operator(params, ClosedFormProfile(rho), t, xi, dxi, ddxi)


def sign_changes(values) -> int:
    v = np.asarray(values, dtype=float)
    v = v[np.abs(v) > 1e-12 * np.max(np.abs(v))] if len(v) else v
    return int(np.sum(np.signbit(v[1:]) != np.signbit(v[:-1])))
