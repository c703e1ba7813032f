import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpn_harmonic.errors import BracketError, DivergenceError
from cpn_harmonic.geometry import HALF_PI, SpaceParams
from cpn_harmonic.shooting import (
    ShootingConfig,
    cubic_coefficient,
    integrate,
    max_ode_residual,
    output_grid,
    series_start,
    shoot,
    shoot_slopes,
    with_tolerances,
)
from cpn_harmonic.tension import BoundaryData, ode_rhs

ROUND_TRIP_PARAMS = [(2, 0), (3, 1), (5, 2)]
ROUND_TRIP_SLOPES = [-4.0, -1.0, -0.25, 0.25, 1.0, 4.0]


def closed(a, t):
    return np.arctan(a * np.tan(t))


@st.composite
def space_params(draw):
    n = draw(st.integers(min_value=1, max_value=9))
    return SpaceParams(n, draw(st.integers(min_value=0, max_value=n - 1)))


@settings(max_examples=100, deadline=None)
@given(space_params(), st.floats(min_value=-20, max_value=20))
def test_cubic_coefficient_matches_family_taylor_term(sp, a):
    # arctan(a tan t) = a t + a (1 - a^2) t^3 / 3 + O(t^5)
    assert cubic_coefficient(sp, a) == pytest.approx(a * (1 - a * a) / 3, rel=1e-12, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(space_params(), st.floats(min_value=-5, max_value=5), st.floats(min_value=1e-5, max_value=1e-3))
def test_series_start_agrees_with_closed_form(sp, a, t0):
    r0, v0 = series_start(sp, a, t0)
    # the dropped t^5 term bounds the gap
    bound = 2 * (1 + abs(a)) ** 5 * t0**5
    assert r0 == pytest.approx(closed(a, t0), abs=bound + 1e-18)
    assert v0 == pytest.approx(a / (a * a * np.sin(t0) ** 2 + np.cos(t0) ** 2), abs=5 * bound / t0 + 1e-15)


def test_series_start_trivial_cases():
    sp = SpaceParams(3, 1)
    assert series_start(sp, 1.0, 1e-4) == (pytest.approx(1e-4, rel=1e-15), pytest.approx(1.0))
    assert series_start(sp, 0.0, 1e-4) == (0.0, 0.0)
    assert cubic_coefficient(sp, 1.0) == 0.0
    with pytest.raises(ValueError):
        series_start(sp, 1.0, 1e-2)


def test_series_cubic_term_cancels_leading_residual():
    # independent of the closed form: the residual of the truncated series
    # must be O(t^3) with the derived c3 and O(t) with any other value
    sp = SpaceParams(4, 1)
    a = 0.7
    t = np.array([1e-3, 2e-3])
    c3 = cubic_coefficient(sp, a)

    def res(c):
        r, rd, rdd = a * t + c * t**3, a + 3 * c * t**2, 6 * c * t
        return rdd - ode_rhs(sp, t, r, rd)

    good, bad = res(c3), res(c3 + 0.1)
    assert np.all(np.abs(good) < 1e-4)
    assert np.all(np.abs(bad) > 1e-3)
    # doubling t multiplies the good residual by 8, the bad one only by 2
    assert abs(good[1] / good[0]) == pytest.approx(8, rel=0.05)
    assert abs(bad[1] / bad[0]) == pytest.approx(2, rel=0.05)


def test_config_validation():
    with pytest.raises(ValueError):
        ShootingConfig(t_start=0.0)
    with pytest.raises(ValueError):
        ShootingConfig(t_end_offset=-1e-6)
    with pytest.raises(ValueError):
        ShootingConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        ShootingConfig(t_start=1e-2)
    with pytest.raises(ValueError):
        ShootingConfig(t_match=1e-7)
    cfg = ShootingConfig()
    assert cfg.step_control == (1e-12, 1e-10)
    assert cfg.max_bisection_iters == 200 and cfg.bracket == (0.5, 2.0)


@pytest.mark.parametrize("n,p,a,tol", [(3, 1, 1.0, 1e-8), (2, 0, 2.0, 1e-6), (3, 1, -0.5, 1e-6)])
def test_integrate_examples(n, p, a, tol):
    prof = integrate(SpaceParams(n, p), a)
    assert np.max(np.abs(prof.r - closed(a, prof.t))) < tol
    assert prof.k == int(np.sign(a))


@pytest.mark.parametrize("n,p", ROUND_TRIP_PARAMS)
@pytest.mark.parametrize("a", ROUND_TRIP_SLOPES)
def test_round_trip_against_family(n, p, a):
    sp = SpaceParams(n, p)
    cfg = ShootingConfig()
    prof = integrate(sp, a, cfg)
    assert np.max(np.abs(prof.r - closed(a, prof.t))) < 1e-6
    eps = cfg.t_start
    assert max_ode_residual(sp, prof, 2 * eps, HALF_PI - 2 * eps) < 1e-6
    # away from the singular ends the Hermite interpolant is itself a near-solution
    assert max_ode_residual(sp, prof, 0.05, HALF_PI - 0.05, midpoints=True) < 1e-5
    assert prof.terminal_slope == pytest.approx(1.0 / a, rel=1e-6)
    assert abs(prof.match_defect) < 1e-8


def test_profile_stores_ode_second_derivative():
    sp = SpaceParams(5, 2)
    prof = integrate(sp, 0.25)
    np.testing.assert_array_equal(prof.rddot, ode_rhs(sp, prof.t, prof.r, prof.rdot))
    assert prof.t[0] == 1e-6 and prof.t[-1] == pytest.approx(HALF_PI - 1e-6, abs=1e-15)
    assert np.all(np.diff(prof.t) > 0)
    assert prof.t_match in prof.t


def test_refinement_reduces_sup_error():
    levels = [(1e-8, 1e-6), (1e-10, 1e-8), (1e-12, 1e-10), (1e-14, 1e-12)]
    for n, p in ROUND_TRIP_PARAMS:
        for a in (0.25, -1.0, 4.0):
            errs = []
            for atol, rtol in levels:
                cfg = with_tolerances(ShootingConfig(), atol, rtol)
                prof = integrate(SpaceParams(n, p), a, cfg)
                errs.append(np.max(np.abs(prof.r - closed(a, prof.t))))
            assert all(e1 <= 1.01 * e0 for e0, e1 in zip(errs, errs[1:])), (n, p, a, errs)
            assert errs[-1] < 0.01 * errs[0]


def test_shoot_degenerate_family_is_residual_first():
    sp = SpaceParams(3, 1)
    res = shoot(sp, BoundaryData(1), ShootingConfig(bracket=(0.5, 2.0)))
    assert res.converged and res.terminal_gap < 1e-6
    assert 0.5 <= res.slope <= 2.0
    assert max_ode_residual(sp, res.profile, 2e-6, HALF_PI - 2e-6) < 1e-6
    assert np.max(np.abs(res.profile.r - closed(res.slope, res.profile.t))) < 1e-6


def test_shoot_negative_winding():
    res = shoot(SpaceParams(2, 0), BoundaryData(-1), ShootingConfig(bracket=(-2.0, -0.5)))
    assert res.converged and res.k == -1
    assert res.terminal_value == pytest.approx(-HALF_PI, abs=1e-6)


def test_fixed_slope_terminal_gap():
    prof = integrate(SpaceParams(2, 0), 3.0)
    gap = abs(prof.r[-1] - HALF_PI)
    assert gap < 1e-4
    assert gap == pytest.approx(HALF_PI - closed(3.0, HALF_PI - 1e-6), rel=1e-6)


def test_degeneracy_witness():
    sp = SpaceParams(3, 1)
    gaps = [abs(integrate(sp, a).r[-1] - HALF_PI) for a in (1.0, 2.0)]
    assert all(g < 1e-3 for g in gaps)


def test_shoot_rejects_even_k():
    with pytest.raises(ValueError):
        shoot(SpaceParams(3, 1), 2)
    with pytest.raises(ValueError):
        integrate(SpaceParams(3, 1), 1.0, k=2)


def test_bracket_errors():
    sp = SpaceParams(3, 1)
    with pytest.raises(BracketError):
        shoot(sp, BoundaryData(3))
    with pytest.raises(BracketError):
        shoot(sp, BoundaryData(1), ShootingConfig(bracket=(-2.0, -0.5)))


def test_divergence_carries_last_valid_t():
    with pytest.raises(DivergenceError) as info:
        integrate(SpaceParams(3, 1), 4.0, ShootingConfig(blowup=1.0))
    assert 0 < info.value.t_last < HALF_PI


def test_slope_limits():
    with pytest.raises(ValueError):
        integrate(SpaceParams(3, 1), float("nan"))
    with pytest.raises(ValueError):
        integrate(SpaceParams(3, 1), 1e4)


def test_concurrent_shots_match_serial():
    sp = SpaceParams(3, 1)
    slopes = [0.25, 1.0, 4.0, -1.0, -0.25]
    serial = shoot_slopes(sp, slopes)
    parallel = shoot_slopes(sp, slopes, workers=4)
    assert [p.slope for p in parallel] == slopes
    for s, p in zip(serial, parallel):
        np.testing.assert_array_equal(s.r, p.r)


def test_output_grid_clusters_at_both_ends():
    cfg = ShootingConfig()
    g = output_grid(cfg)
    assert g[0] == cfg.t_start and g[-1] == pytest.approx(HALF_PI - cfg.t_end_offset, abs=1e-15)
    assert np.sum(g < 1e-4) >= 20 and np.sum(g > HALF_PI - 1e-4) >= 20
