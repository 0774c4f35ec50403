import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crsobolev.config import cr_total_mass, euclidean_sphere_area
from crsobolev.harmonics import build_basis, random_sphere_points
from crsobolev.operators import make_cr_operator
from crsobolev.polyalg import Poly
from crsobolev.sphere_numerics import (
    AutomorphismParams, BalanceError, ExtremalFunction, UnsupportedGridError, apply_automorphism, balance,
    boost, build_grid, cayley, certify_grid, dilation, load_grid, numeric_expand, pushed_moments, save_grid,
    synthesize,
)
from crsobolev.sphere_numerics.checks import (
    StepSizeError, appendix_coefficients, verify_dilation_derivative, verify_intertwining,
)
from crsobolev.sphere_numerics.sobolev import (
    calibrate_cr_total_mass, cr_exponent, quotient_grid_orders, sharp_constant_classical, sharp_constant_cr,
    sobolev_quotient_classical, sobolev_quotient_cr,
)

F = Fraction


@pytest.fixture(scope="module")
def grid12():
    return build_grid("cr", 1, degree=12)


@pytest.fixture(scope="module")
def grid_mid():
    return build_grid("cr", 1, orders=(24, 40))


# -- grids ---------------------------------------------------------------------

def test_grid_invariants(grid12):
    assert abs(grid12.weights.sum() - cr_total_mass(1)) < 1e-12 * cr_total_mass(1)
    assert np.all(grid12.weights > 0)
    assert np.max(np.abs(np.linalg.norm(grid12.nodes, axis=1) - 1)) < 1e-14
    cert = certify_grid(grid12)
    assert cert.degree >= 12 and cert.passed


def test_certification_detects_overreach(grid12):
    assert not certify_grid(grid12, grid12.exactness_degree + 2).passed


@pytest.mark.parametrize("n, degree", [(1, 15), (2, 14), (3, 14)])
def test_real_grids(n, degree):
    grid = build_grid("real", n, degree=degree)
    assert grid.weights.sum() == pytest.approx(euclidean_sphere_area(n), rel=1e-12)
    assert certify_grid(grid, degree).passed


def test_unsupported_grids():
    with pytest.raises(UnsupportedGridError):
        build_grid("cr", 2, degree=4)
    with pytest.raises(UnsupportedGridError):
        build_grid("real", 4, degree=4)


def test_grid_file_round_trip(tmp_path, grid12):
    path = tmp_path / "grid.npz"
    save_grid(grid12, path)
    back = load_grid(path)
    assert np.array_equal(back.nodes, grid12.nodes) and np.array_equal(back.weights, grid12.weights)
    assert back.exactness_degree == grid12.exactness_degree
    assert back.total_mass == grid12.total_mass
    assert certify_grid(back, 12).passed


def test_sphere_area_against_mpmath():
    for n in (1, 2, 3, 5):
        ref = 2 * mpmath.pi ** (mpmath.mpf(n + 1) / 2) / mpmath.gamma(mpmath.mpf(n + 1) / 2)
        assert euclidean_sphere_area(n) == pytest.approx(float(ref), rel=1e-13)


# -- maps ----------------------------------------------------------------------

def test_cayley_examples():
    assert np.allclose(cayley(np.zeros(1), 0.0), [0, 1])
    rng = np.random.default_rng(0)
    z = rng.standard_normal((50, 2)) + 1j * rng.standard_normal((50, 2))
    t = rng.standard_normal(50) * 5
    img = cayley(z, t)
    assert np.max(np.abs(np.linalg.norm(img, axis=1) - 1)) < 1e-14
    assert np.min(np.abs(img[:, -1] + 1)) > 0


def test_dilation_examples():
    pts = random_sphere_points(1, 30, np.random.default_rng(1))
    img, J = dilation(1.0, pts)
    assert np.allclose(img, pts) and np.allclose(J, 1)
    a, _ = dilation(1.7, pts)
    b, _ = dilation(0.6, a)
    c, _ = dilation(1.7 * 0.6, pts)
    assert np.max(np.abs(b - c)) < 1e-12
    north, J = dilation(2.5, np.array([[0, 1]]))
    assert np.allclose(north, [[0, 1]]) and J[0] == pytest.approx(2.5)
    assert np.max(np.abs(np.linalg.norm(a, axis=1) - 1)) < 1e-14


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0), st.integers(0, 2**31))
def test_dilation_group_law_property(d1, d2, seed):
    pts = random_sphere_points(1, 8, np.random.default_rng(seed))
    a, J1 = dilation(d1, pts)
    b, J2 = dilation(d2, a)
    c, J = dilation(d1 * d2, pts)
    assert np.max(np.abs(b - c)) < 1e-11
    assert np.allclose(J1 * J2, J, rtol=1e-11)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-0.5, 0.5), min_size=4, max_size=4), st.integers(0, 2**31))
def test_boost_keeps_points_on_sphere(coords, seed):
    a = np.array([coords[0] + 1j * coords[1], coords[2] + 1j * coords[3]])
    pts = random_sphere_points(1, 8, np.random.default_rng(seed))
    img, J = boost(a, pts)
    assert np.max(np.abs(np.linalg.norm(img, axis=1) - 1)) < 1e-13
    assert np.all(J > 0)


def test_dilation_jacobian_preserves_mass(grid_mid):
    _, J = dilation(1.4, grid_mid.nodes)
    assert grid_mid.mean(np.abs(J) ** 4).real == pytest.approx(1, abs=1e-10)


def test_boost_examples():
    pts = random_sphere_points(1, 20, np.random.default_rng(2))
    img, J = boost(np.zeros(2), pts)
    assert np.allclose(img, pts) and np.allclose(J, 1)
    a = np.array([0.2 + 0.1j, -0.3j])
    img, _ = boost(a, np.zeros((1, 2)))
    assert np.allclose(img[0], a)
    img, J = boost(a, pts)
    assert np.max(np.abs(np.linalg.norm(img, axis=1) - 1)) < 1e-14
    with pytest.raises(ValueError):
        boost(np.array([1.0, 0]), pts)


def test_automorphism_mass_preservation():
    grid = build_grid("cr", 1, orders=(30, 48))
    params = AutomorphismParams(np.array([0.25, 0.1j]), delta=1.2)
    _, J = apply_automorphism(params, grid.nodes)
    assert grid.mean(J**4).real == pytest.approx(1, abs=1e-9)


# -- extremals and expansions ---------------------------------------------------

def test_extremal_examples(grid_mid):
    f = ExtremalFunction([0, 0], 0.5, 1)
    vals = f(grid_mid.nodes)
    assert np.allclose(vals, vals[0])
    g = ExtremalFunction([0.3, 0], 0.5, 1)
    vals = g(grid_mid.nodes)
    assert np.all(vals > 0)
    p = cr_exponent(1, 0.5)
    assert grid_mid.integrate(vals**p).real == pytest.approx(1, rel=1e-12)
    # unitaries fixing xi = (0.3, 0) act by a phase on z2
    pts = grid_mid.nodes[:200]
    rotated = pts * np.array([1, np.exp(0.7j)])
    assert np.allclose(g(rotated), g(pts))
    with pytest.raises(ValueError):
        ExtremalFunction([0.8, 0.7], 0.5, 1)


def test_expand_basis_element(grid12):
    Y = build_basis(1, 2, 1).evaluate(grid12.nodes)[:, 1]
    exp = numeric_expand(Y, grid12, 4)
    for g, c in exp.coeffs.items():
        if g == (2, 1):
            assert abs(np.linalg.norm(c) - 1) < 1e-11
        else:
            assert np.max(np.abs(c), initial=0) < 1e-11
    one = numeric_expand(np.ones(grid12.size), grid12, 4)
    assert abs(one.coeffs[(0, 0)][0] - 1) < 1e-13
    assert all(np.max(np.abs(c)) < 1e-13 for g, c in one.coeffs.items() if g != (0, 0))


def test_synthesis_round_trip(grid12):
    z = grid12.nodes
    vals = z[:, 0] ** 2 * np.conj(z[:, 1]) + 0.5 * np.abs(z[:, 1]) ** 2
    exp = numeric_expand(vals, grid12, 5)
    assert np.max(np.abs(synthesize(exp.coeffs, grid12) - vals)) < 1e-12
    assert abs(exp.tail) < 1e-13


def test_parseval_monotone_for_extremal(grid_mid):
    f = ExtremalFunction([0.3, 0], 0.5, 1)
    energies = [numeric_expand(f, grid_mid, d).captured_energy for d in (2, 4, 8, 12, 16)]
    assert all(b >= a - 1e-15 for a, b in zip(energies, energies[1:]))
    assert numeric_expand(f, grid_mid, 16).tail < 1e-12


# -- constants and quotients ---------------------------------------------------

def test_sharp_constant_against_mpmath():
    for n, g in [(1, 0.5), (1, 1.0), (2, 1.5)]:
        ref = (4 * mpmath.pi) ** (-g) * (mpmath.gamma((n + 1 - g) / 2) / mpmath.gamma((n + 1 + g) / 2)) ** 2
        assert sharp_constant_cr(n, g) == pytest.approx(float(ref), rel=1e-13)
    assert sharp_constant_cr(1, 0.5) == pytest.approx(0.5156, abs=5e-5)
    vals = [sharp_constant_cr(1, g) for g in (1.0, 1.5, 1.9, 1.99)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    ref = mpmath.gamma(2.5) / mpmath.gamma(0.5) * (2 * mpmath.pi**2) ** (2 / 3)
    assert sharp_constant_classical(3, 1.0) == pytest.approx(float(ref), rel=1e-13)


@pytest.mark.parametrize("gamma", [0.25, 0.5, 1.0, 1.5])
def test_calibrated_mass_is_gamma_independent(gamma):
    assert calibrate_cr_total_mass(1, gamma) == pytest.approx((4 * math.pi) ** 2, rel=1e-12)


def test_quotients_cr():
    maxdeg = 16
    grid = build_grid("cr", 1, orders=quotient_grid_orders(maxdeg))
    r1 = sobolev_quotient_cr(lambda z: np.ones(len(z)), 0.5, grid, maxdeg)
    assert r1.relative_error < 1e-10 and r1.value * sharp_constant_cr(1, 0.5) == pytest.approx(1, abs=1e-10)
    r2 = sobolev_quotient_cr(ExtremalFunction([0.2j, 0.1], 0.5, 1), 0.5, grid, maxdeg)
    assert r2.relative_error < 1e-8 and not r2.truncated
    r3 = sobolev_quotient_cr(lambda z: 1 + 0.2 * (z[:, 0] * np.conj(z[:, 1])).real, 0.5, grid, maxdeg)
    assert r3.value > r3.target


def test_truncation_flag():
    grid = build_grid("cr", 1, orders=(30, 40))
    r = sobolev_quotient_cr(ExtremalFunction([0.8, 0], 0.5, 1), 0.5, grid, 4)
    assert r.truncated


def test_quotients_classical():
    maxdeg = 12
    grid = build_grid("real", 3, orders=quotient_grid_orders(maxdeg))
    r1 = sobolev_quotient_classical(lambda x: np.ones(len(x)), 1.0, grid, maxdeg)
    assert r1.relative_error < 1e-10
    r2 = sobolev_quotient_classical(ExtremalFunction([0, 0.3, 0, 0], 1.0, 3, kind="real"), 1.0, grid, maxdeg)
    assert r2.relative_error < 1e-8
    r3 = sobolev_quotient_classical(lambda x: 1 + 0.1 * x[:, 1], 1.0, grid, maxdeg)
    assert r3.value > r3.target


# -- intertwining and the dilation derivative -----------------------------------

@pytest.fixture(scope="module")
def grid_int():
    return build_grid("cr", 1, orders=(40, 64))


def test_intertwining(grid_int):
    op = make_cr_operator(1, F(1, 2))
    f = Poly.z(0, 2) * Poly.zbar(1, 2)
    assert verify_intertwining(op, 1.0, f, grid_int).residual < 1e-13
    assert verify_intertwining(op, 1.3, f, grid_int).residual < 1e-8
    g = f + Poly.z(1, 2) * Poly.z(0, 2) * Poly.zbar(0, 2) - 2
    asym = make_cr_operator(1, F(1, 2), F(-1, 4), F(-5, 4))
    assert verify_intertwining(asym, 0.8, g, grid_int).residual < 1e-8


def test_intertwining_mutation_linear_response(grid_int):
    op = make_cr_operator(1, F(1, 2))
    f = Poly.z(0, 2) * Poly.zbar(1, 2)
    r1 = verify_intertwining(op.mutated((1, 1), F(101, 100)), 1.3, f, grid_int).residual
    r2 = verify_intertwining(op.mutated((1, 1), F(201, 200)), 1.3, f, grid_int).residual
    assert r1 > 1e-4
    assert r1 / r2 == pytest.approx(2, rel=1e-3)


@pytest.mark.parametrize("j, k", [(0, 0), (0, 1), (1, 1), (1, 2)])
@pytest.mark.parametrize("w, wp", [(F(-3, 4), F(-3, 4)), (F(-1, 4), F(-5, 4))])
def test_dilation_derivative(grid12, j, k, w, wp):
    r = verify_dilation_derivative(1, j, k, w, wp, grid12)
    A, B = appendix_coefficients(1, j, k, w, wp)
    assert (r.expected_A, r.expected_B) == (float(A), float(B))
    assert r.error < 1e-6 and r.other_components < 1e-8 and r.passed()


def test_dilation_derivative_errors(grid12):
    with pytest.raises(ValueError):
        verify_dilation_derivative(1, 2, 1, F(-3, 4), F(-3, 4), grid12)
    with pytest.raises(StepSizeError):
        verify_dilation_derivative(1, 1, 2, F(-3, 4), F(-3, 4), grid12, step=1e-11)


# -- balancing -------------------------------------------------------------------

@pytest.fixture(scope="module")
def grid_bal():
    return build_grid("cr", 1, orders=(24, 40))


def extremal_density(xi0):
    f = ExtremalFunction(xi0, 0.5, 1)
    p = cr_exponent(1, 0.5)
    return lambda pts: f(pts) ** p


def test_balance_recovers_extremal_center(grid_bal):
    dens = extremal_density([0.3, 0])
    res = balance(dens, grid_bal)
    assert res.converged and res.residual < 1e-8
    assert np.linalg.norm(res.params.xi) == pytest.approx(0.3, abs=1e-8)
    assert np.max(np.abs(pushed_moments(res.params, dens, grid_bal))) < 1e-8


def test_balance_identity_and_idempotence(grid_bal):
    res = balance(lambda pts: np.ones(len(pts)), grid_bal)
    assert np.linalg.norm(res.params.xi) < 1e-12
    dens = extremal_density([0.2, 0.25j])
    first = balance(dens, grid_bal)
    _, J = apply_automorphism(first.params, grid_bal.nodes)
    image, _ = apply_automorphism(first.params, grid_bal.nodes)
    values = J**4 * dens(image)
    table = dict(zip(map(tuple, np.round(grid_bal.nodes, 14)), values))
    again = balance(lambda pts: np.array([table[tuple(p)] for p in np.round(pts, 14)]), grid_bal)
    assert np.linalg.norm(again.params.xi) < 1e-6


def test_balance_symmetric_density_stays_on_axis(grid_bal):
    # depends on z2 only through |1 - 0.4 conj(z2)|, so it is symmetric about the z2 axis
    res = balance(extremal_density([0, 0.4]), grid_bal)
    assert abs(res.params.xi[0]) < 1e-10
    assert abs(res.params.xi[1].imag) < 1e-10


def test_balance_failure_is_reported(grid_bal):
    with pytest.raises(BalanceError):
        balance(extremal_density([0.3, 0]), grid_bal, max_iter=1, tol=1e-30)
