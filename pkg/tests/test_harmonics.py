from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from crsobolev import harmonics as H
from crsobolev.polyalg import REAL, Poly, reduce_mod_sphere

GOLDEN = Path(__file__).parent / "golden"


def sphere_points(n, count, seed=0):
    return H.random_sphere_points(n, count, np.random.default_rng(seed))


def test_dimension_examples():
    for n in (1, 2, 3):
        assert H.dim_hjk(n, 0, 0) == 1
    assert H.dim_hjk(1, 1, 0) == 2
    assert H.dim_hjk(2, 1, 1) == 8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dimension_matches_nullspace_rank(n):
    for d in range(5 if n < 3 else 4):
        for j in range(d + 1):
            assert H.nullspace_rank(n, j, d - j) == H.dim_hjk(n, j, d - j)


def test_printed_factorial_variant_overcounts():
    assert H.dim_hjk_printed(2, 1, 1) == 48
    assert H.nullspace_rank(2, 1, 1) == 8
    assert H.dim_hjk_printed(1, 0, 0) == H.dim_hjk(1, 0, 0)


def test_basis_examples():
    b = H.build_basis(1, 0, 1)
    assert {e.to_text() for e in b.elements} == {"complex[2]: 1*zb1", "complex[2]: 1*zb2"}
    b = H.build_basis(1, 1, 1)
    assert len(b) == 3
    z1, z2, zb1, zb2 = Poly.z(0, 2), Poly.z(1, 2), Poly.zbar(0, 2), Poly.zbar(1, 2)
    keys = b.keys
    mat = np.array([[float(e.terms.get(k, 0)) for k in keys] for e in b.elements])
    for target in (z1 * zb2, z2 * zb1, z1 * zb1 - z2 * zb2):
        vec = np.array([float(target.terms.get(k, 0)) for k in keys])
        coef, res, *_ = np.linalg.lstsq(mat.T, vec, rcond=None)
        assert np.allclose(mat.T @ coef, vec)


@pytest.mark.parametrize("n, j, k", [(1, 2, 1), (1, 3, 2), (2, 1, 2), (2, 2, 2)])
def test_basis_invariants(n, j, k):
    b = H.build_basis(n, j, k)
    assert len(b) == H.dim_hjk(n, j, k)
    assert all(e.laplacian().is_zero() for e in b.elements)
    g = np.array([[complex(x) for x in row] for row in b.gram], dtype=complex)
    assert np.allclose(g, g.conj().T)
    assert np.linalg.eigvalsh(g).min() > 0


def test_orthonormal_copies_on_exact_grid():
    from crsobolev.sphere_numerics import build_grid
    grid = build_grid("cr", 1, degree=12)
    for j, k in [(0, 0), (2, 1), (3, 3)]:
        Y = H.build_basis(1, j, k).evaluate(grid.nodes)
        G = (Y.conj().T * (grid.weights / grid.total_mass)) @ Y
        assert np.allclose(G, np.eye(len(G)), atol=1e-12)


def test_hopf_basis_spans_same_space():
    from crsobolev.sphere_numerics import build_grid
    grid = build_grid("cr", 1, degree=16)
    w = grid.weights / grid.total_mass
    for j, k in [(1, 0), (2, 2), (4, 1)]:
        A = H.hopf_evaluate(j, k, grid.nodes)
        B = H.build_basis(1, j, k).evaluate(grid.nodes)
        assert np.allclose((A.conj().T * w) @ A, np.eye(j + k + 1), atol=1e-12)
        # unitary change of basis
        U = (A.conj().T * w) @ B
        assert np.allclose(U.conj().T @ U, np.eye(j + k + 1), atol=1e-12)


def test_expand_examples():
    z1, zb1, zb2 = Poly.z(0, 2), Poly.zbar(0, 2), Poly.zbar(1, 2)
    Y = H.build_basis(1, 2, 1).elements[0]
    assert list(H.expand(Y)) == [(2, 1)]
    assert set(H.expand(z1 * zb1)) == {(0, 0), (1, 1)}
    p = z1 * (z1 * zb2)
    assert set(H.expand(p)) == {(2, 1)}
    parts = H.expand(z1 * z1 * zb1)
    assert set(parts) == {(2, 1), (1, 0)}
    total = sum(parts.values(), Poly.zero(2))
    assert total == reduce_mod_sphere(z1 * z1 * zb1)


def test_ar95_examples():
    zb1 = Poly.zbar(0, 2)
    plus, minus = H.ar95_decompose_cr(0, zb1)
    assert plus == Poly.z(0, 2) * zb1 - Poly.norm_sq(2).scale(Fraction(1, 2))
    assert minus == Fraction(1, 2)
    Y = H.build_basis(1, 2, 0).elements[0]
    assert H.ar95_decompose_cr(1, Y)[1].is_zero()
    with pytest.raises(H.NotHarmonicError):
        H.ar95_decompose_cr(0, Poly.z(0, 2) * zb1)


@pytest.mark.parametrize("n", [1, 2])
def test_ar95_reconstruction(n):
    m = n + 1
    for d in range(5):
        for j in range(d + 1):
            for Y in H.build_basis(n, j, d - j).elements:
                for l in range(m):
                    plus, minus = H.ar95_decompose_cr(l, Y)
                    assert plus.laplacian().is_zero() and minus.laplacian().is_zero()
                    assert reduce_mod_sphere(plus + minus) == reduce_mod_sphere(Poly.z(l, m) * Y)


def test_decompose_real_examples():
    x1 = Poly.x(0, 3)
    assert H.decompose_real(0, Poly.constant(1, 3, REAL)) == (x1, Poly.zero(3, REAL))
    plus, minus = H.decompose_real(0, x1)
    assert plus == x1 * x1 - Poly.norm_sq(3, REAL).scale(Fraction(1, 3))
    assert minus == Fraction(1, 3)
    assert plus.laplacian().is_zero()


@pytest.mark.parametrize("n", [2, 3])
def test_decompose_real_reconstruction_and_euler(n):
    N = n + 1
    for h in range(4):
        for Y in H.build_basis_real(n, h).elements:
            euler = sum((Poly.x(i, N) * Y.diff_x(i) for i in range(N)), Poly.zero(N, REAL))
            assert euler == Y.scale(h)
            for i in range(N):
                plus, minus = H.decompose_real(i, Y)
                assert plus.laplacian().is_zero() and minus.laplacian().is_zero()
                assert reduce_mod_sphere(plus + minus) == reduce_mod_sphere(Poly.x(i, N) * Y)


@pytest.mark.parametrize("j, k", [(0, 0), (1, 0), (0, 2), (1, 1), (2, 3), (3, 3)])
def test_zonal_addition_theorem(j, k):
    assert H.zonal_addition_residual(1, j, k, pairs=100, seed=3) < 1e-10


def test_zonal_addition_n2():
    assert H.zonal_addition_residual(2, 1, 2, pairs=50) < 1e-10


def test_zonal_diagonal_is_dimension_over_mass():
    for j, k in [(0, 0), (2, 1), (1, 3)]:
        assert H.zonal_eval(1, j, k, 1.0) == pytest.approx(H.dim_hjk(1, j, k))
        assert H.zonal_eval(1, j, k, 1.0, total_mass=2.5) == pytest.approx(H.dim_hjk(1, j, k) / 2.5)


def test_zonal_conjugation_symmetry():
    rng = np.random.default_rng(0)
    t = 0.9 * (rng.random(20) * np.exp(2j * np.pi * rng.random(20)))
    for j, k in [(1, 2), (0, 3), (2, 2)]:
        assert np.allclose(H.zonal_eval(1, j, k, t), np.conj(H.zonal_eval(1, k, j, t)))


def test_golden_bases():
    text = "".join(H.build_basis(n, j, k).to_text() for n, j, k in [(1, 0, 1), (1, 1, 1), (1, 2, 1), (2, 1, 1), (2, 0, 2)])
    assert text == (GOLDEN / "bases_cr.txt").read_text()
    text = "".join(H.build_basis_real(n, h).to_text() for n, h in [(2, 2), (2, 3), (3, 2)])
    assert text == (GOLDEN / "bases_real.txt").read_text()


def test_golden_basis_content_is_harmonic():
    blocks = (GOLDEN / "bases_cr.txt").read_text().split("# ")[1:]
    for block in blocks:
        header, *lines = [ln for ln in block.splitlines() if ln]
        polys = [Poly.from_text(ln) for ln in lines]
        assert f"dim={len(polys)}" in header
        assert all(p.laplacian().is_zero() for p in polys)


def test_golden_reduction():
    chunks = [c for c in (GOLDEN / "reduce_mod_sphere.txt").read_text().split("\n\n") if c.strip()]
    for chunk in chunks:
        src, expected = chunk.strip().splitlines()
        reduced = reduce_mod_sphere(Poly.from_text(src))
        assert reduced.to_text() == expected
        pts = sphere_points(1, 6)
        assert np.allclose(Poly.from_text(src).evaluate(pts), reduced.evaluate(pts))
