"""Explicit solutions r_{rho,l}(t) = arctan(rho tan t) + l pi and related quantities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cpn_harmonic.errors import DomainError
from cpn_harmonic.geometry import HALF_PI, check_open_interval


@dataclass(frozen=True)
class FamilyParam:
    """Parameters (rho, ell) of one member of the family.

    ``boundary=True`` (the default) rejects rho = 0, which solves the ODE but
    not the boundary problem (r stays at l pi).
    """

    rho: float
    ell: int = 0
    boundary: bool = True

    def __post_init__(self):
        if int(self.ell) != self.ell:
            raise ValueError(f"ell must be an integer, got {self.ell!r}")
        if not np.isfinite(self.rho):
            raise ValueError(f"rho must be finite, got {self.rho!r}")
        if self.boundary and self.rho == 0:
            raise ValueError("rho = 0 does not give a boundary-value solution")

    @property
    def terminal_k(self) -> int:
        """Odd k with r(pi/2^-) = k pi/2 (only meaningful for ell = 0, rho != 0)."""
        return int(np.sign(self.rho)) + 2 * self.ell


def family_eval(fp: FamilyParam, t):
    """Return (r, rdot, rddot, sin 2r, cos 2r) at ``t``.

    The trigonometric values come from the rational identities in rho and t,
    not from evaluating sin/cos of r, which keeps them accurate near the ends.
    """
    t = check_open_interval(t)
    rho = float(fp.rho)
    s2, c2 = np.sin(t) ** 2, np.cos(t) ** 2
    denom = rho * rho * s2 + c2
    r = np.arctan(rho * np.tan(t)) + fp.ell * np.pi
    rdot = rho / denom
    rddot = (rho - rho**3) * np.sin(2 * t) / denom**2
    sin2r = rho * np.sin(2 * t) / denom
    cos2r = (c2 - rho * rho * s2) / denom
    return r, rdot, rddot, sin2r, cos2r


def holomorphicity_residual(profile, t):
    """rdot (1 + tan^2 r) tan t - (1 + tan^2 t) tan r, reported raw.

    Raises DomainError where tan r has a pole.
    """
    t = check_open_interval(t)
    s = profile.sample(t)
    tan_r = s.tan_r
    if tan_r is None:
        if np.any(np.abs(np.cos(s.r)) < 1e-12):
            raise DomainError("tan r has a pole on the requested abscissae")
        tan_r = np.tan(s.r)
    tan_t = np.tan(t)
    return s.rdot * (1.0 + tan_r**2) * tan_t - (1.0 + tan_t**2) * tan_r


def convergence_gap(rho: float, delta: float) -> float:
    """sup over t in [delta, pi/2) of |r_{rho,0}(t) - sign(rho) pi/2|.

    r_{rho,0} is monotone, so the supremum sits at t = delta and equals
    pi/2 - arctan(|rho| tan delta).
    """
    if rho == 0:
        raise ValueError("rho must be nonzero")
    if not 0 < delta < HALF_PI:
        raise DomainError(f"delta must lie in (0, pi/2), got {delta!r}")
    # pi/2 - arctan(x) = arctan(1/x) for x > 0, without cancellation
    return float(np.arctan(1.0 / (abs(rho) * np.tan(delta))))


def deformation_mode(rho: float, t):
    """d r_{rho,0} / d rho = tan t / (1 + rho^2 tan^2 t)."""
    t = check_open_interval(t)
    return np.sin(t) * np.cos(t) / (np.cos(t) ** 2 + rho * rho * np.sin(t) ** 2)


def deformation_mode_derivatives(rho: float, t):
    """(xi, xi', xi'') for xi = sin 2t / (2 D), D = 1 + (rho^2 - 1) sin^2 t."""
    t = check_open_interval(t)
    u = np.sin(2 * t)
    du, ddu = 2 * np.cos(2 * t), -4 * u
    kappa = rho * rho - 1.0
    d = 1.0 + kappa * np.sin(t) ** 2
    dd = kappa * u
    ddd = 2 * kappa * np.cos(2 * t)
    xi = u / (2 * d)
    dxi = du / (2 * d) - u * dd / (2 * d**2)
    ddxi = ddu / (2 * d) - (2 * du * dd + u * ddd) / (2 * d**2) + u * dd**2 / d**3
    return xi, dxi, ddxi
