"""Jacobi polynomials and the closed-form equivariant eigenfunctions on the line.

Under t = arctan(e^x) the stability problem about the identity-type solutions
(rho = +-1, p = (n-1)/2) becomes an equation on the real line whose
eigenfunctions are sech x times symmetric Jacobi polynomials in tanh x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DEGREE = 50


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float
    degree: int

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError(f"need alpha, beta > -1, got ({self.alpha}, {self.beta})")
        if int(self.degree) != self.degree or self.degree < 0:
            raise ValueError(f"degree must be a non-negative integer, got {self.degree!r}")
        if self.degree > MAX_DEGREE:
            raise ValueError(f"degree capped at {MAX_DEGREE}, got {self.degree}")

    @property
    def eigenvalue(self) -> float:
        """j (j + 1 + alpha + beta), the constant in the Jacobi differential equation."""
        j = self.degree
        return j * (j + 1 + self.alpha + self.beta)


def jacobi_eval(jp: JacobiParams, y):
    """P_j^(alpha, beta)(y) by the three-term recurrence in the degree."""
    y = np.asarray(y, dtype=float)
    a, b, j = jp.alpha, jp.beta, jp.degree
    prev = np.ones_like(y)
    if j == 0:
        return prev
    cur = (a + 1) + (a + b + 2) * (y - 1) / 2
    for m in range(2, j + 1):
        s = 2 * m + a + b
        c0 = 2 * m * (m + a + b) * (s - 2)
        c1 = (s - 1) * (s * (s - 2) * y + a * a - b * b)
        c2 = 2 * (m + a - 1) * (m + b - 1) * s
        prev, cur = cur, (c1 * cur - c2 * prev) / c0
    return cur


def jacobi_derivative(jp: JacobiParams, y, order: int = 1):
    """d^order/dy^order P_j^(alpha, beta), via the index-shift identity for the derivative."""
    if order < 0:
        raise ValueError("order must be non-negative")
    y = np.asarray(y, dtype=float)
    a, b, j = jp.alpha, jp.beta, jp.degree
    scale = 1.0
    for _ in range(order):
        if j == 0:
            return np.zeros_like(y)
        scale *= 0.5 * (j + a + b + 1)
        a, b, j = a + 1, b + 1, j - 1
    return scale * jacobi_eval(JacobiParams(a, b, j), y)


def _fd_weights(offsets: np.ndarray, order: int) -> np.ndarray:
    # exact for polynomials of degree < len(offsets)
    m = len(offsets)
    vander = np.vander(offsets, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[order] = float(np.prod(np.arange(1, order + 1)))
    return np.linalg.solve(vander, rhs)


def jacobi_ode_residual(jp: JacobiParams, y, derivatives: str = "fd", h: float = 0.05):
    """(1 - y^2) u'' + [beta - alpha - (alpha + beta + 2) y] u' + j (j + 1 + alpha + beta) u.

    ``derivatives="fd"`` takes u', u'' from a centred finite-difference stencil
    evaluated on :func:`jacobi_eval` itself (wide enough to be exact on
    polynomials of degree j, so only rounding remains); ``"exact"`` uses
    :func:`jacobi_derivative`.
    """
    y = np.asarray(y, dtype=float)
    u = jacobi_eval(jp, y)
    if derivatives == "exact":
        du = jacobi_derivative(jp, y, 1)
        ddu = jacobi_derivative(jp, y, 2)
    elif derivatives == "fd":
        half = max(1, (jp.degree + 2) // 2)
        offsets = h * np.arange(-half, half + 1)
        w1, w2 = _fd_weights(offsets, 1), _fd_weights(offsets, 2)
        samples = np.stack([jacobi_eval(jp, y + o) for o in offsets])
        du = np.tensordot(w1, samples, axes=1)
        ddu = np.tensordot(w2, samples, axes=1)
    else:
        raise ValueError(f"unknown derivatives mode {derivatives!r}")
    a, b = jp.alpha, jp.beta
    return (1 - y * y) * ddu + (b - a - (a + b + 2) * y) * du + jp.eigenvalue * u


def _check_line_args(n: int, j: int):
    if int(n) != n or n < 1 or n % 2 == 0:
        raise ValueError(f"n must be a positive odd integer, got {n!r}")
    if int(j) != j or j < 0:
        raise ValueError(f"j must be a non-negative integer, got {j!r}")


def line_eigenvalue(n: int, j: int) -> float:
    _check_line_args(n, j)
    return 4.0 * j * (j + n + 2)


def line_eigenfunction(n: int, j: int, x):
    """(xi, xi', xi'') for xi_j(x) = sech x * P_j^(a, a)(tanh x), a = (n+1)/2."""
    _check_line_args(n, j)
    x = np.asarray(x, dtype=float)
    jp = JacobiParams((n + 1) / 2, (n + 1) / 2, j)
    s, u = 1.0 / np.cosh(x), np.tanh(x)
    pv = jacobi_eval(jp, u)
    dp = jacobi_derivative(jp, u, 1)
    ddp = jacobi_derivative(jp, u, 2)
    # s' = -s u, u' = s^2
    xi = s * pv
    dxi = -s * u * pv + s**3 * dp
    ddxi = s * (u * u - s * s) * pv - 4 * s**3 * u * dp + s**5 * ddp
    return xi, dxi, ddxi


def line_transform_residual(n: int, rho: float, j: int, x, lam: float | None = None):
    """Left side of the line-coordinate stability equation at xi_j.

    xi'' - (n-1) tanh x xi' - n tanh^2 x xi + (lam/4 + 1) sech^2 x xi, with
    lam = 4 j (j + n + 2) unless given.
    """
    if abs(rho) != 1:
        raise ValueError(f"the line form holds for rho = +-1 only, got {rho!r}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 20):
        raise ValueError("|x| must not exceed 20")
    if lam is None:
        lam = line_eigenvalue(n, j)
    xi, dxi, ddxi = line_eigenfunction(n, j, x)
    s, u = 1.0 / np.cosh(x), np.tanh(x)
    return ddxi - (n - 1) * u * dxi - n * u * u * xi + (lam / 4 + 1) * s * s * xi
