import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_jacobi

from cpn_harmonic.jacobi import (
    MAX_DEGREE,
    JacobiParams,
    jacobi_derivative,
    jacobi_eval,
    jacobi_ode_residual,
    line_eigenfunction,
    line_eigenvalue,
    line_transform_residual,
)

Y = np.linspace(-1, 1, 41)
X = np.linspace(-10, 10, 401)


def test_examples():
    assert jacobi_eval(JacobiParams(2, 2, 1), 0.5) == pytest.approx(1.5, abs=1e-15)
    np.testing.assert_array_equal(jacobi_eval(JacobiParams(2, 2, 0), Y), np.ones_like(Y))
    assert JacobiParams(2, 2, 3).eigenvalue == 3 * 8


@settings(max_examples=150, deadline=None)
@given(st.floats(min_value=-0.9, max_value=6), st.floats(min_value=-0.9, max_value=6),
       st.integers(min_value=0, max_value=20), st.floats(min_value=-1, max_value=1))
def test_recurrence_matches_scipy(a, b, j, y):
    got = float(jacobi_eval(JacobiParams(a, b, j), y))
    ref = float(eval_jacobi(j, a, b, y))
    assert got == pytest.approx(ref, rel=1e-10, abs=1e-10 * max(1.0, abs(ref)))


@settings(max_examples=80, deadline=None)
@given(st.floats(min_value=0, max_value=5), st.integers(min_value=0, max_value=15))
def test_symmetric_parity(a, j):
    jp = JacobiParams(a, a, j)
    np.testing.assert_allclose(jacobi_eval(jp, -Y), (-1) ** j * jacobi_eval(jp, Y), rtol=1e-12, atol=1e-12)


def test_derivative_matches_finite_difference():
    jp = JacobiParams(3.0, 3.0, 6)
    h = 1e-6
    fd = (jacobi_eval(jp, Y + h) - jacobi_eval(jp, Y - h)) / (2 * h)
    np.testing.assert_allclose(jacobi_derivative(jp, Y), fd, rtol=1e-6, atol=1e-6)
    np.testing.assert_array_equal(jacobi_derivative(jp, Y, 0), jacobi_eval(jp, Y))
    assert np.all(jacobi_derivative(JacobiParams(1, 1, 2), Y, 3) == 0)
    with pytest.raises(ValueError):
        jacobi_derivative(jp, Y, -1)


@pytest.mark.parametrize("n", [3, 5, 7])
@pytest.mark.parametrize("mode", ["fd", "exact"])
def test_differential_equation_residual(n, mode):
    alpha = (n + 1) / 2
    for j in range(11):
        res = jacobi_ode_residual(JacobiParams(alpha, alpha, j), Y, derivatives=mode)
        assert np.max(np.abs(res)) < 1e-8, (n, j)


def test_residual_detects_wrong_degree_constant():
    # a different j in the eigenvalue slot leaves a nonzero multiple of P_j
    jp = JacobiParams(2, 2, 3)
    res = jacobi_ode_residual(jp, Y, derivatives="exact") - jp.eigenvalue * jacobi_eval(jp, Y)
    assert np.max(np.abs(res)) > 1.0
    with pytest.raises(ValueError):
        jacobi_ode_residual(jp, Y, derivatives="spline")


@pytest.mark.parametrize("n", [3, 5, 7])
@pytest.mark.parametrize("rho", [1.0, -1.0])
def test_line_transform_residual(n, rho):
    for j in range(11):
        assert np.max(np.abs(line_transform_residual(n, rho, j, X))) < 1e-8, (n, j)


def test_line_ground_state_and_wrong_lambda():
    assert np.max(np.abs(line_transform_residual(3, 1.0, 0, X))) < 1e-10
    assert line_eigenvalue(3, 0) == 0.0 and line_eigenvalue(5, 2) == 72.0
    # lam = 1 instead of 0 adds sech^2 x * sech x / 4
    wrong = line_transform_residual(3, 1.0, 0, X, lam=1.0)
    np.testing.assert_allclose(wrong, 0.25 / np.cosh(X) ** 3, atol=1e-12)
    assert wrong[200] == pytest.approx(0.25)


def test_line_eigenfunction_derivatives():
    h = 1e-5
    xi, dxi, ddxi = line_eigenfunction(5, 3, X)
    xp, dxp, _ = line_eigenfunction(5, 3, X + h)
    xm, dxm, _ = line_eigenfunction(5, 3, X - h)
    np.testing.assert_allclose(dxi, (xp - xm) / (2 * h), atol=1e-8)
    np.testing.assert_allclose(ddxi, (dxp - dxm) / (2 * h), atol=1e-8)


def test_validation():
    with pytest.raises(ValueError):
        JacobiParams(-1.0, 0.0, 2)
    with pytest.raises(ValueError):
        JacobiParams(1.0, 1.0, -1)
    with pytest.raises(ValueError):
        JacobiParams(1.0, 1.0, 2.5)
    with pytest.raises(ValueError):
        JacobiParams(1.0, 1.0, MAX_DEGREE + 1)
    with pytest.raises(ValueError):
        line_transform_residual(3, 2.0, 0, X)
    with pytest.raises(ValueError):
        line_transform_residual(3, 1.0, 0, np.array([21.0]))
    with pytest.raises(ValueError):
        line_eigenvalue(4, 1)
