"""Normal component of the tension field of a (k, r)-map and the boundary data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cpn_harmonic.errors import DomainError
from cpn_harmonic.geometry import (
    HALF_PI,
    SpaceParams,
    check_open_interval,
    trace_p_inv_pdot,
    trace_p_inv_pdot_shifted,
)


def admissible_k(k: int) -> bool:
    """k = j + 1 with j even, i.e. k odd."""
    return int(k) == k and int(k) % 2 == 1


@dataclass(frozen=True)
class BoundaryData:
    """Target winding: r(0) = 0 and r(pi/2) = k pi/2."""

    k: int

    def __post_init__(self):
        if not admissible_k(self.k):
            raise ValueError(f"k must be odd for this action, got k={self.k!r}")

    @property
    def terminal_value(self) -> float:
        return self.k * HALF_PI


def ode_coefficients(params: SpaceParams, t):
    """(first-order coefficient, sin 2r coefficient) of the reduced ODE at ``t``."""
    a, b = params.first_order_coefficients
    p, q = params.p, params.n - params.p - 1
    c1 = a / np.tan(t) - b * np.tan(t)
    c2 = p / np.cos(t) ** 2 - q / np.sin(t) ** 2
    return c1, c2


def ode_rhs(params: SpaceParams, t, r, rdot, sin2r=None, sin4r=None):
    """rddot forced by the ODE given (t, r, rdot)."""
    c1, c2 = ode_coefficients(params, t)
    if sin2r is None:
        sin2r = np.sin(2 * r)
    if sin4r is None:
        sin4r = np.sin(4 * r)
    return -c1 * rdot - c2 * sin2r + sin4r / np.sin(2 * t) ** 2


def ode_residual(params: SpaceParams, profile, t):
    """Residual of the reduced harmonic-map ODE for ``profile`` at ``t`` (vectorised)."""
    t = check_open_interval(t)
    s = profile.sample(t)
    return s.rddot - ode_rhs(params, t, s.r, s.rdot, s.sin2r, s.sin4r)


def ode_residual_via_traces(params: SpaceParams, profile, t):
    """Same residual assembled from the P_t traces:
    rddot + 1/2 rdot Tr(P_t^-1 P_t') - 1/2 Tr(P_t^-1 P'(r)).
    """
    t = check_open_interval(t)
    s = profile.sample(t)
    return (
        s.rddot
        + 0.5 * s.rdot * trace_p_inv_pdot(params, t)
        - 0.5 * trace_p_inv_pdot_shifted(params, t, s.r)
    )


def boundary_gap(profile, boundary: BoundaryData, eps: float) -> tuple[float, float]:
    """(|r(eps)|, |r(pi/2 - eps) - k pi/2|)."""
    if not 0 < eps < 0.25 * np.pi:
        raise DomainError(f"eps must lie in (0, pi/4), got {eps!r}")
    left = abs(float(profile(eps)))
    right = abs(float(profile(HALF_PI - eps)) - boundary.terminal_value)
    return left, right


def brouwer_degree(codim0: int, codim1: int, weyl_order: int, k: int, j_parity: str) -> int:
    """Brouwer degree of a (k, r)-map of a cohomogeneity-one manifold.

    ``k`` must equal j |W|/2 + 1 for an integer j of the given parity
    ("even" or "odd").
    """
    if j_parity not in ("even", "odd"):
        raise ValueError(f"j_parity must be 'even' or 'odd', got {j_parity!r}")
    if weyl_order <= 0 or weyl_order % 2:
        raise ValueError(f"|W| must be a positive even integer, got {weyl_order}")
    j, rem = divmod(2 * (k - 1), weyl_order)
    if rem != 0 or (j % 2 == 0) != (j_parity == "even"):
        raise ValueError(
            f"k={k} is not of the form j|W|/2 + 1 with j {j_parity} (|W|={weyl_order})"
        )

    odd0, odd1 = codim0 % 2 == 1, codim1 % 2 == 1
    if odd0 and odd1:
        return k
    if j_parity == "even":
        return 1
    if not odd0 and not odd1 and weyl_order % 4 != 0:
        return 0
    if not odd0 and odd1 and weyl_order % 8 != 0:
        return -1
    return 1
