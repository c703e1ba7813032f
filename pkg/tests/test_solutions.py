import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpn_harmonic.errors import DomainError
from cpn_harmonic.geometry import HALF_PI
from cpn_harmonic.profiles import ClosedFormProfile, ConstantProfile, NumericProfile
from cpn_harmonic.solutions import (
    FamilyParam,
    convergence_gap,
    deformation_mode,
    deformation_mode_derivatives,
    family_eval,
    holomorphicity_residual,
)

nonzero_rho = st.floats(min_value=-10, max_value=10).filter(lambda x: abs(x) > 1e-2)
interior_t = st.floats(min_value=1e-2, max_value=HALF_PI - 1e-2)


def test_family_param_validation():
    with pytest.raises(ValueError):
        FamilyParam(0.0)
    with pytest.raises(ValueError):
        FamilyParam(1.0, 0.5)
    with pytest.raises(ValueError):
        FamilyParam(np.inf)
    assert FamilyParam(0.0, boundary=False).rho == 0.0
    assert FamilyParam(2.0).terminal_k == 1
    assert FamilyParam(-2.0).terminal_k == -1
    assert FamilyParam(2.0, 1).terminal_k == 3


def test_family_eval_examples():
    r, rd, rdd, s2, c2 = family_eval(FamilyParam(1.0), 0.4)
    assert (r, rd, rdd) == pytest.approx((0.4, 1.0, 0.0), abs=1e-15)
    assert (s2, c2) == pytest.approx((np.sin(0.8), np.cos(0.8)), abs=1e-15)
    r, rd, rdd, s2, c2 = family_eval(FamilyParam(2.0), np.pi / 4)
    assert (rd, s2, c2) == pytest.approx((0.8, 0.8, -0.6), abs=1e-14)
    r, rd, *_ = family_eval(FamilyParam(-1.0), 0.9)
    assert r == pytest.approx(-0.9, abs=1e-15) and rd == pytest.approx(-1.0, abs=1e-15)
    with pytest.raises(DomainError):
        family_eval(FamilyParam(1.0), HALF_PI)


@settings(max_examples=200, deadline=None)
@given(nonzero_rho, st.integers(-2, 2), interior_t)
def test_family_identities(rho, ell, t):
    r, rd, rdd, s2, c2 = family_eval(FamilyParam(rho, ell), t)
    assert s2 * s2 + c2 * c2 == pytest.approx(1.0, abs=1e-12)
    assert s2 == pytest.approx(np.sin(2 * r), abs=1e-10)
    assert c2 == pytest.approx(np.cos(2 * r), abs=1e-10)
    h = 1e-5
    rp, rdp, *_ = family_eval(FamilyParam(rho, ell), t + h)
    rm, rdm, *_ = family_eval(FamilyParam(rho, ell), t - h)
    # finite-difference tolerance scales with the third derivative, which reaches |rho|^3
    scale = max(1.0, abs(rho)) ** 3
    assert (rp - rm) / (2 * h) == pytest.approx(rd, abs=1e-7 * scale)
    assert (rdp - rdm) / (2 * h) == pytest.approx(rdd, abs=1e-7 * scale * max(1.0, abs(rho)))


@settings(max_examples=200, deadline=None)
@given(nonzero_rho, st.floats(min_value=0.05, max_value=HALF_PI - 0.05))
def test_holomorphicity_residual_vanishes_for_all_signs(rho, t):
    assert abs(holomorphicity_residual(ClosedFormProfile(rho), t)) < 1e-10


def test_holomorphicity_examples():
    assert abs(holomorphicity_residual(ClosedFormProfile(3.0), 0.6)) < 1e-10
    t = np.linspace(0.05, 1.5, 50)
    assert np.max(np.abs(holomorphicity_residual(ClosedFormProfile(1.0), t))) < 1e-12
    grid = np.linspace(0.1, 1.0, 19)
    prof = NumericProfile(grid, grid**2, 2 * grid, 2 + 0 * grid)
    val = float(holomorphicity_residual(prof, 0.5))
    tan_r, tan_t = np.tan(0.25), np.tan(0.5)
    assert val == pytest.approx(1.0 * (1 + tan_r**2) * tan_t - (1 + tan_t**2) * tan_r, abs=1e-12)
    assert abs(val) > 0.1
    with pytest.raises(DomainError):
        holomorphicity_residual(ConstantProfile(1), 0.5)


def test_convergence_gap_examples():
    assert convergence_gap(100, 0.1) == pytest.approx(HALF_PI - np.arctan(100 * np.tan(0.1)), abs=1e-12)
    assert convergence_gap(100, 0.1) == pytest.approx(0.0993, abs=1e-4)
    assert convergence_gap(1, 0.1) == pytest.approx(HALF_PI - 0.1, abs=1e-14)
    assert convergence_gap(-100, 0.1) == convergence_gap(100, 0.1)
    assert convergence_gap(1e12, 0.1) < 1e-10
    with pytest.raises(ValueError):
        convergence_gap(0, 0.1)
    with pytest.raises(DomainError):
        convergence_gap(1, 0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.01, max_value=1e6), st.floats(min_value=1.001, max_value=10),
       st.floats(min_value=1e-3, max_value=HALF_PI - 1e-3))
def test_convergence_gap_decreases_in_rho(rho, factor, delta):
    assert convergence_gap(rho * factor, delta) < convergence_gap(rho, delta)
    # it is the supremum over [delta, pi/2): attained at delta
    t = np.linspace(delta, HALF_PI - 1e-9, 200)
    sampled = np.max(np.abs(ClosedFormProfile(rho)(t) - HALF_PI))
    assert sampled == pytest.approx(convergence_gap(rho, delta), rel=1e-12, abs=1e-14)


def test_deformation_mode_examples():
    t = np.linspace(0.1, 1.4, 20)
    np.testing.assert_allclose(deformation_mode(1.0, t), 0.5 * np.sin(2 * t), atol=1e-15)
    for rho in (-3.0, 0.5, 2.0, 7.0):
        assert deformation_mode(rho, np.pi / 4) == pytest.approx(1 / (1 + rho**2), rel=1e-14)
    h = 1e-5
    fd = (ClosedFormProfile(2 + h)(0.3) - ClosedFormProfile(2 - h)(0.3)) / (2 * h)
    assert deformation_mode(2.0, 0.3) == pytest.approx(fd, abs=1e-8)


@settings(max_examples=100, deadline=None)
@given(nonzero_rho, interior_t)
def test_deformation_mode_is_rho_derivative(rho, t):
    h = 1e-5
    fd = (ClosedFormProfile(rho + h)(t) - ClosedFormProfile(rho - h)(t)) / (2 * h)
    assert deformation_mode(rho, t) == pytest.approx(fd, abs=1e-7)
    xi, dxi, ddxi = deformation_mode_derivatives(rho, t)
    assert xi == pytest.approx(deformation_mode(rho, t), rel=1e-12, abs=1e-15)
    ht = 1e-5
    xp, dxp, _ = deformation_mode_derivatives(rho, t + ht)
    xm, dxm, _ = deformation_mode_derivatives(rho, t - ht)
    assert (xp - xm) / (2 * ht) == pytest.approx(dxi, rel=1e-6, abs=1e-6)
    assert (dxp - dxm) / (2 * ht) == pytest.approx(ddxi, rel=1e-6, abs=1e-6)


def test_numeric_profile_contract():
    t = np.linspace(0.1, 1.2, 12)
    prof = NumericProfile(t, np.sin(t), np.cos(t), -np.sin(t))
    assert len(prof) == 12
    with pytest.raises(ValueError):
        prof.r[0] = 1.0  # immutable after construction
    s = prof.sample(t[3])
    assert float(s.r) == np.sin(t[3]) and float(s.rddot) == -np.sin(t[3])
    mid = 0.5 * (t[3] + t[4])
    s = prof.sample(mid)
    assert float(s.r) == pytest.approx(np.sin(mid), abs=1e-6)
    assert float(s.rdot) == pytest.approx(np.cos(mid), abs=1e-6)
    assert float(s.rddot) == pytest.approx(-np.sin(mid), abs=1e-3)
    with pytest.raises(ValueError):
        NumericProfile([0.3], [0.0], [0.0], [0.0])
    with pytest.raises(ValueError):
        NumericProfile([0.3, 0.2], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        NumericProfile([0.3, 0.4], [0.0], [0.0, 0.0], [0.0, 0.0])
    with pytest.raises(DomainError):
        NumericProfile([0.0, 0.4], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0])
