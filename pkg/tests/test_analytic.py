import itertools

import numpy as np
import pytest

from rkocp.analytic import (
    ExactSolution,
    ModeSolution,
    boundary_defects,
    exact_fields,
    mode_coefficients,
    residual_check,
    shoot,
)
from rkocp.spatial import build_fem, build_modal

LAMBDAS = [0.0, 1.0, np.pi ** 2, 4 * np.pi ** 2]
NUS = [1e-1, 1e-3, 1e-6]
DATA = [(1.0, 1.0), (0.7, -1.3), (0.0, 2.0)]
GRID = list(itertools.product(LAMBDAS, NUS, DATA))


@pytest.mark.parametrize("lam, nu, ab", GRID)
def test_invariants(lam, nu, ab):
    s = mode_coefficients(lam, *ab, nu)
    if lam > 0:
        assert s.C3 == pytest.approx(2 * lam * nu * s.C1, rel=1e-15)
    init, term = boundary_defects(s)
    assert init <= 1e-14
    assert term <= 1e-12
    assert residual_check(s) <= 1e-10


@pytest.mark.parametrize("lam, nu, ab", GRID)
def test_agrees_with_shooting(lam, nu, ab):
    times = (0.0, 0.125, 0.5, 1.0)
    s = mode_coefficients(lam, *ab, nu)
    ys, ps = shoot(lam, *ab, nu, times)
    y = np.array([exact_fields([s], t)[0][0] for t in times])
    p = np.array([exact_fields([s], t)[1][0] for t in times])
    scale = max(np.abs(y).max(), np.abs(p).max())
    assert np.max(np.abs(ys - y)) <= 1e-10 * scale
    assert np.max(np.abs(ps - p)) <= 1e-10 * scale


def test_reference_values_scalar_problem():
    # 50-digit evaluation of the closed form, independent of float rounding
    import mpmath

    with mpmath.workdps(50):
        L, nu = mpmath.pi ** 2, mpmath.mpf("0.001")
        den = -2 * nu * L * mpmath.exp(L) - mpmath.exp(L) + mpmath.exp(-L)
        c1 = (-1 + mpmath.exp(-L)) / den
    s = mode_coefficients(np.pi ** 2, 1.0, 1.0, 1e-3)
    assert s.C1 == pytest.approx(float(c1), rel=1e-14)
    assert s.C1 + s.C2 == pytest.approx(1.0, rel=1e-14)


def test_zero_data():
    s = mode_coefficients(np.pi ** 2, 0.0, 0.0, 1e-3)
    assert (s.C1, s.C2, s.C3) == (0.0, 0.0, 0.0)
    assert residual_check(s) == 0.0


def test_large_nu_is_uncontrolled_decay():
    s = mode_coefficients(np.pi ** 2, 1.0, 1.0, 1e9)
    for t in (0.0, 0.3, 1.0):
        y, p, u = exact_fields([s], t)
        assert y[0] == pytest.approx(np.exp(-np.pi ** 2 * t), abs=1e-6)
        assert abs(u[0]) <= 1e-6


def test_constant_mode_equal_data_needs_no_control():
    s = mode_coefficients(0.0, 0.4, 0.4, 1e-3)
    for t in (0.0, 0.5, 1.0):
        y, p, _ = exact_fields([s], t)
        assert y[0] == pytest.approx(0.4)
        assert p[0] == 0.0


def test_terminal_optimality():
    s = mode_coefficients(1.0, 0.2, 0.9, 0.05)
    y, p, _ = exact_fields([s], 1.0)
    assert p[0] == pytest.approx(0.9 - y[0], rel=1e-14)


def test_corrupted_coefficients_detected():
    s = mode_coefficients(np.pi ** 2, 1.0, 1.0, 1e-3)
    bad = ModeSolution(s.lam, s.a, s.b, s.nu, s.C1 * 1.01, s.C2, s.C3)
    assert residual_check(bad) > 1e-4


@pytest.mark.parametrize("kwargs", [dict(T=2.0), dict(nu=0.0), dict(lam=-1.0)])
def test_refusals(kwargs):
    args = dict(lam=1.0, a=1.0, b=1.0, nu=1e-3)
    args.update(kwargs)
    with pytest.raises(ValueError):
        mode_coefficients(**args)


def test_exact_solution_fields():
    ex = ExactSolution([1], [1.0], [1.0], 1e-3)
    y1 = ex.coefficients(0.5)[0][0]
    yv, _ = ex.field(build_modal(3), 0.5)
    assert yv.tolist() == [0.0, y1, 0.0]
    fem = build_fem(1, 4)
    yf, _ = ex.field(fem, 0.5)
    assert np.allclose(yf, y1 * np.sqrt(2) * np.cos(np.pi * fem.nodes))
    with pytest.raises(ValueError):
        ex.field(build_modal(1), 0.5)
