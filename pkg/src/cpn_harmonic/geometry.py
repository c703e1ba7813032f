"""Group-action constants and the orbit endomorphism P_t.

The action of G = SU(p+1) x SU(n-p) on CP^n by block-diagonal matrices is of
cohomogeneity one; the normal geodesic is ``gamma(t) = [cos t e_1 + sin t e_{p+2}]``
for ``t in [0, pi/2]``.  Along it the induced metric on the principal orbit is
encoded by a positive endomorphism P_t of the complement n of the isotropy
algebra.  This module provides P_t in closed (diagonal) form and an oracle that
rebuilds it as a Gram matrix of action fields under the Fubini-Study metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cpn_harmonic.errors import DomainError

HALF_PI = 0.5 * np.pi


def check_open_interval(t, lo: float = 0.0, hi: float = HALF_PI):
    """Return ``t`` as a float array, raising DomainError unless lo < t < hi everywhere."""
    arr = np.asarray(t, dtype=float)
    if not np.all((arr > lo) & (arr < hi)):
        raise DomainError(f"t must lie in the open interval ({lo}, {hi}); got {t!r}")
    return arr


@dataclass(frozen=True)
class SpaceParams:
    """The pair (n, p) fixing the action of SU(p+1) x SU(n-p) on CP^n."""

    n: int
    p: int

    def __post_init__(self):
        if int(self.n) != self.n or int(self.p) != self.p:
            raise ValueError("n and p must be integers")
        if self.n < 1:
            raise ValueError(f"n must be positive, got n={self.n}")
        if not 0 <= self.p < self.n:
            raise ValueError(f"need 0 <= p < n, got n={self.n}, p={self.p}")

    @property
    def codim0(self) -> int:
        return 2 * (self.n - self.p)

    @property
    def codim1(self) -> int:
        return 2 * (self.p + 1)

    @property
    def weyl_order(self) -> int:
        return 2

    @property
    def eta_squared(self) -> float:
        return eta_squared(self)

    @property
    def degenerate(self) -> bool:
        """True for CP^1 (n=1): G is trivial, the D direction collapses and eta = 0."""
        return self.n - self.p - 1 == 0 and self.p == 0

    @property
    def first_order_coefficients(self) -> tuple[int, int]:
        """(2n-2p-1, 2p+1): the cot t and tan t coefficients of the reduced ODE."""
        return 2 * self.n - 2 * self.p - 1, 2 * self.p + 1

    def multiplicities(self) -> tuple[int, int, int]:
        return 2 * self.p, 2 * (self.n - self.p - 1), 1

    def swapped(self) -> "SpaceParams":
        """Parameters seen from the other singular orbit (t -> pi/2 - t, p -> n-1-p)."""
        return SpaceParams(self.n, self.n - 1 - self.p)


def eta_squared(params: SpaceParams) -> float:
    n, p = params.n, params.p
    return 2.0 * (n - p - 1) / (n - p) + 2.0 * p / (p + 1)


# Each diagonal block of P_s is c_i * f_i(s); only the shape f_i matters in
# the log-derivative traces, so the eta^2/4 constant cancels (also when eta = 0).
def _block_shapes(s):
    return np.cos(s) ** 2, np.sin(s) ** 2, np.sin(2 * s) ** 2


def _block_shapes_d1(s):
    return -np.sin(2 * s), np.sin(2 * s), 2 * np.sin(4 * s)


def _block_shapes_d2(s):
    return -2 * np.cos(2 * s), 2 * np.cos(2 * s), 8 * np.cos(4 * s)


@dataclass(frozen=True)
class OrbitEndomorphism:
    """P_t in the basis Lambda: three scalar blocks with fixed multiplicities."""

    t: float
    block1: float
    block2: float
    block3: float
    multiplicities: tuple[int, int, int]

    def diagonal(self) -> np.ndarray:
        m1, m2, m3 = self.multiplicities
        return np.concatenate(
            [np.full(m1, self.block1), np.full(m2, self.block2), np.full(m3, self.block3)]
        )

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal())


def pt_diagonal(params: SpaceParams, t: float) -> OrbitEndomorphism:
    """Closed form of P_t: (cos^2 t, sin^2 t, (eta^2/4) sin^2 2t) with multiplicities (2p, 2(n-p-1), 1)."""
    t = float(check_open_interval(t))
    f1, f2, f3 = _block_shapes(t)
    return OrbitEndomorphism(
        t=t,
        block1=float(f1),
        block2=float(f2),
        block3=float(0.25 * eta_squared(params) * f3),
        multiplicities=params.multiplicities(),
    )


def trace_p_inv_pdot(params: SpaceParams, t):
    """Tr(P_t^{-1} dP_t/dt), vectorised over ``t``."""
    t = check_open_interval(t)
    shapes = _block_shapes(t)
    derivs = _block_shapes_d1(t)
    return sum(m * d / f for m, d, f in zip(params.multiplicities(), derivs, shapes))


def trace_p_inv_pdot_shifted(params: SpaceParams, t, r):
    """Tr(P_t^{-1} (dP/ds)|_{s=r}): the derivative is taken at the image point r."""
    t = check_open_interval(t)
    r = np.asarray(r, dtype=float)
    shapes = _block_shapes(t)
    derivs = _block_shapes_d1(r)
    return sum(m * d / f for m, d, f in zip(params.multiplicities(), derivs, shapes))


def trace_p_inv_pddot_shifted(params: SpaceParams, t, r):
    """Tr(P_t^{-1} (d^2P/ds^2)|_{s=r}), the potential term of the stability operator."""
    t = check_open_interval(t)
    r = np.asarray(r, dtype=float)
    shapes = _block_shapes(t)
    derivs = _block_shapes_d2(r)
    return sum(m * d / f for m, d, f in zip(params.multiplicities(), derivs, shapes))


# --------------------------------------------------------------------------
# Lie-algebra basis and the Gram-matrix oracle
# --------------------------------------------------------------------------


def q_inner(x: np.ndarray, y: np.ndarray) -> float:
    """Bi-invariant inner product Q(X, Y) = -1/2 Tr XY on su(n+1)."""
    return float(-0.5 * np.trace(x @ y).real)


def _unit(size: int, j: int, k: int) -> np.ndarray:
    c = np.zeros((size, size), dtype=complex)
    c[j - 1, k - 1] = 1.0
    return c


@dataclass(frozen=True)
class ActionBasis:
    """Q-orthonormal basis of n, ordered (N1, N2, N3, N4, D).

    Labels use 1-based matrix indices: ``("E", 1, 3)`` is E_{1,3}.  ``lam`` is the
    positive normalisation constant of D (zero in the degenerate case n = 1).
    """

    params: SpaceParams
    labels: tuple
    elements: tuple = field(repr=False)
    lam: float

    def __len__(self):
        return len(self.elements)

    def q_gram(self) -> np.ndarray:
        m = len(self.elements)
        out = np.empty((m, m))
        for i, x in enumerate(self.elements):
            for j, y in enumerate(self.elements):
                out[i, j] = q_inner(x, y)
        return out

    def coordinate_fields(self, t: float) -> np.ndarray:
        """Action fields at gamma(t) as complex dz-components, from the closed-form table.

        Row i holds v with X_i^* = sum_j Re(v_j) d/dx_j + Im(v_j) d/dy_j.
        """
        t = float(check_open_interval(t))
        n, p = self.params.n, self.params.p
        eta = np.sqrt(eta_squared(self.params))
        out = np.zeros((len(self.labels), n), dtype=complex)
        for i, label in enumerate(self.labels):
            if label[0] == "D":
                out[i, p] = -1j * eta * np.tan(t)
                continue
            kind, j, k = label
            scale = 1.0 if j == 1 else np.tan(t)
            out[i, k - 2] = -scale if kind == "E" else 1j * scale
        return out


def action_basis(params: SpaceParams) -> ActionBasis:
    n, p = params.n, params.p
    size = n + 1
    labels, elements = [], []
    for kind, row, cols in (
        ("E", 1, range(2, p + 2)),
        ("F", 1, range(2, p + 2)),
        ("E", p + 2, range(p + 3, n + 2)),
        ("F", p + 2, range(p + 3, n + 2)),
    ):
        for col in cols:
            c_jk, c_kj = _unit(size, row, col), _unit(size, col, row)
            elements.append(c_jk - c_kj if kind == "E" else 1j * (c_jk + c_kj))
            labels.append((kind, row, col))

    weight_sum = (p + 1) * (n - p - 1) + (n - p) * p
    lam = np.sqrt(2.0 / ((p + 1) * (n - p) * weight_sum)) if weight_sum > 0 else 0.0
    diag = [p * (n - p)] + [p - n] * p + [-(p + 1) * (n - p - 1)] + [p + 1] * (n - p - 1)
    elements.append(lam * 1j * np.diag(np.asarray(diag, dtype=complex)))
    labels.append(("D",))
    return ActionBasis(params=params, labels=tuple(labels), elements=tuple(elements), lam=float(lam))


def geodesic_point(params: SpaceParams, t: float) -> np.ndarray:
    """Homogeneous coordinates of gamma(t) in C^{n+1}."""
    z = np.zeros(params.n + 1, dtype=complex)
    z[0] = np.cos(t)
    z[params.p + 1] = np.sin(t)
    return z


def action_field(x: np.ndarray, params: SpaceParams, t: float) -> np.ndarray:
    """d/ds|_0 of exp(sX).gamma(t) in the affine chart z_j = Z_j / Z_0 (exact derivative)."""
    z0 = geodesic_point(params, t)
    dz = x @ z0
    return dz[1:] / z0[0] - z0[1:] * dz[0] / z0[0] ** 2


@dataclass(frozen=True)
class MetricBlock:
    """Fubini-Study metric at gamma(t) as a complex-bilinear form on (d/dz, d/dzbar)."""

    t: float
    entries: np.ndarray

    def real_inner(self, u: np.ndarray, v: np.ndarray) -> float:
        """g(U, V) for real tangent vectors given by their dz-components."""
        uu = np.concatenate([u, np.conj(u)])
        vv = np.concatenate([v, np.conj(v)])
        val = uu @ self.entries @ vv
        return float(val.real)


def metric_block(params: SpaceParams, t: float) -> MetricBlock:
    t = float(check_open_interval(t))
    n, p = params.n, params.p
    diag = np.ones(n)
    diag[p] = np.cos(t) ** 2
    off = np.diag(diag)
    zero = np.zeros((n, n))
    entries = 0.5 * np.cos(t) ** 2 * np.block([[zero, off], [off, zero]])
    return MetricBlock(t=t, entries=entries)


def fubini_study_hermitian(z: np.ndarray) -> np.ndarray:
    """Coefficient matrix h_jk of dz_j dzbar_k for the Fubini-Study metric at affine point z."""
    z = np.asarray(z, dtype=complex)
    s = 1.0 + np.vdot(z, z).real
    return (s * np.eye(len(z)) - np.outer(np.conj(z), z)) / s**2


def gram_oracle(params: SpaceParams, t: float, fields: str = "derived") -> np.ndarray:
    """Matrix of P_t in the basis Lambda, rebuilt as g_FS(X_j^*, X_k^*) at gamma(t).

    ``fields="derived"`` differentiates the one-parameter subgroups acting on
    gamma(t); ``fields="table"`` uses the closed-form coordinate table instead.
    The basis is Q-orthonormal, so the Gram matrix is the matrix of P_t.
    """
    t = float(check_open_interval(t))
    basis = action_basis(params)
    if fields == "derived":
        vecs = np.array([action_field(x, params, t) for x in basis.elements])
    elif fields == "table":
        vecs = basis.coordinate_fields(t)
    else:
        raise ValueError(f"unknown fields mode {fields!r}")
    # Columns (v, conj v) are the (d/dz, d/dzbar) components of each real field.
    u = np.concatenate([vecs, np.conj(vecs)], axis=1).T
    gram = u.T @ metric_block(params, t).entries @ u
    return np.ascontiguousarray(gram.real)
