"""Profiles r: (0, pi/2) -> R together with their first two derivatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from cpn_harmonic.errors import DomainError
from cpn_harmonic.geometry import HALF_PI, check_open_interval
from cpn_harmonic.solutions import FamilyParam, family_eval


@dataclass(frozen=True)
class ProfileSample:
    r: np.ndarray
    rdot: np.ndarray
    rddot: np.ndarray
    sin2r: np.ndarray
    cos2r: np.ndarray
    tan_r: np.ndarray | None = None

    @property
    def sin4r(self):
        return 2.0 * self.sin2r * self.cos2r

    @property
    def cos4r(self):
        return self.cos2r**2 - self.sin2r**2


class Profile:
    """Common interface: ``sample(t)`` returns a ProfileSample, ``profile(t)`` returns r."""

    def sample(self, t) -> ProfileSample:
        raise NotImplementedError

    def __call__(self, t):
        return self.sample(t).r


class ClosedFormProfile(Profile):
    def __init__(self, rho: float, ell: int = 0):
        self.param = FamilyParam(rho, ell, boundary=False)

    @property
    def rho(self):
        return self.param.rho

    @property
    def ell(self):
        return self.param.ell

    def sample(self, t):
        r, rdot, rddot, sin2r, cos2r = family_eval(self.param, t)
        tan_r = self.rho * np.tan(np.asarray(t, dtype=float))
        return ProfileSample(r, rdot, rddot, sin2r, cos2r, tan_r)

    def __repr__(self):
        return f"ClosedFormProfile(rho={self.rho!r}, ell={self.ell!r})"


class ConstantProfile(Profile):
    """kappa_l(t) = l pi / 2."""

    def __init__(self, ell: int):
        if int(ell) != ell:
            raise ValueError("ell must be an integer")
        self.ell = int(ell)

    def sample(self, t):
        t = check_open_interval(t)
        zeros = np.zeros_like(t)
        # exact values: sin(l pi) = 0, cos(l pi) = (-1)^l
        return ProfileSample(
            r=zeros + self.ell * HALF_PI,
            rdot=zeros,
            rddot=zeros.copy(),
            sin2r=zeros.copy(),
            cos2r=zeros + (-1.0) ** self.ell,
            tan_r=None,
        )

    def __repr__(self):
        return f"ConstantProfile(ell={self.ell})"


class NumericProfile(Profile):
    """Profile sampled on a grid with explicit r, rdot and rddot.

    Between nodes r is the cubic Hermite interpolant of (r, rdot) and rdot the
    cubic Hermite interpolant of (rdot, rddot); rddot is the derivative of the
    latter.  At the nodes the stored values are returned unchanged.
    """

    def __init__(self, t, r, rdot, rddot):
        t = np.asarray(t, dtype=float)
        arrays = [np.asarray(a, dtype=float) for a in (r, rdot, rddot)]
        if t.ndim != 1 or len(t) < 2:
            raise ValueError("numeric profile needs a 1-D grid with at least 2 points")
        if any(a.shape != t.shape for a in arrays):
            raise ValueError("r, rdot, rddot must match the grid shape")
        if not np.all(np.diff(t) > 0):
            raise ValueError("grid must be strictly increasing")
        check_open_interval(t)
        self.t = t
        self.r, self.rdot, self.rddot = arrays
        for a in (self.t, self.r, self.rdot, self.rddot):
            a.setflags(write=False)
        self._r_spline = CubicHermiteSpline(t, self.r, self.rdot)
        self._rdot_spline = CubicHermiteSpline(t, self.rdot, self.rddot)
        self._rddot_spline = self._rdot_spline.derivative()

    def sample(self, t):
        t = np.asarray(t, dtype=float)
        if np.any((t < self.t[0]) | (t > self.t[-1])):
            raise DomainError(
                f"numeric profile covers [{self.t[0]!r}, {self.t[-1]!r}]; cannot evaluate at {t!r}"
            )
        r = self._r_spline(t)
        rdot = self._rdot_spline(t)
        rddot = self._rddot_spline(t)
        # snap exact node hits back to stored values
        idx = np.clip(np.searchsorted(self.t, t), 0, len(self.t) - 1)
        hit = self.t[idx] == t
        if np.any(hit):
            r = np.where(hit, self.r[idx], r)
            rdot = np.where(hit, self.rdot[idx], rdot)
            rddot = np.where(hit, self.rddot[idx], rddot)
        return ProfileSample(r, rdot, rddot, np.sin(2 * r), np.cos(2 * r), None)

    def __len__(self):
        return len(self.t)

    def __repr__(self):
        return f"NumericProfile({len(self.t)} nodes on [{self.t[0]:.3g}, {self.t[-1]:.6g}])"
