"""Spherical harmonics on S^{2n+1} (bidegree (j, k)) and on S^n (degree h).

Exact bases come from the nullspace of the Laplacian on the monomial basis
of P_{j,k} or P_h. For S^3 there is also an analytic orthonormal basis built
from Jacobi polynomials in |z_2|^2, used when the degree is too large for the
exact route.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exact
from .polyalg import COMPLEX, REAL, Poly, harmonic_decomposition, inner, monomial_matrix, monomials
from .specfun import JacobiParams, jacobi_eval, log_gamma

MAX_EXACT_DEGREE = 8


class NotHarmonicError(ValueError):
    pass


def dim_hjk(n: int, j: int, k: int) -> int:
    """Dimension of H_{j,k} on S^{2n+1}.

    Uses the factor (j + k + n); the factorial printed in some references
    overcounts (e.g. n = 2, j = k = 1 must give 9 - 1 = 8).
    """
    if n < 1 or j < 0 or k < 0:
        raise ValueError("need n >= 1 and j, k >= 0")
    num = math.factorial(j + n - 1) * math.factorial(k + n - 1) * (j + k + n)
    den = math.factorial(n) * math.factorial(n - 1) * math.factorial(j) * math.factorial(k)
    return num // den


def dim_hjk_printed(n: int, j: int, k: int) -> Fraction:
    """The same formula with (j + k + n)! in place of (j + k + n); kept for reports."""
    num = math.factorial(j + n - 1) * math.factorial(k + n - 1) * math.factorial(j + k + n)
    den = math.factorial(n) * math.factorial(n - 1) * math.factorial(j) * math.factorial(k)
    return Fraction(num, den)


def dim_real(n: int, h: int) -> int:
    """Dimension of degree-h harmonics on S^n."""
    if h < 0:
        return 0
    return math.comb(h + n, n) - (math.comb(h - 2 + n, n) if h >= 2 else 0)


@dataclass
class HarmonicSpaceBasis:
    n: int
    grade: tuple
    mode: str
    elements: list
    gram: list
    keys: list = field(repr=False)
    orthonormal_numeric: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.elements)

    def evaluate(self, points, orthonormal=True):
        """Values of the basis at ``points``, shape ``(N, dim)``."""
        pts = np.asarray(points)
        if self.mode == REAL and np.iscomplexobj(pts):
            raise ValueError("real basis needs real points")
        mat = monomial_matrix(self.keys, pts, self.mode)
        if orthonormal:
            return mat @ self.orthonormal_numeric.T
        coeffs = np.array([[float(e.terms.get(k, 0)) for k in self.keys] for e in self.elements])
        return mat @ coeffs.T

    def to_text(self) -> str:
        label = "H_{%s}" % ",".join(map(str, self.grade))
        lines = [f"# {label} n={self.n} mode={self.mode} dim={len(self)}"]
        lines += [e.to_text() for e in self.elements]
        return "\n".join(lines) + "\n"


def _nullspace_basis(n, grade, mode):
    nvars = n + 1
    cols = monomials(nvars, grade, mode)
    if mode == COMPLEX:
        j, k = grade
        target = monomials(nvars, (j - 1, k - 1), mode) if j and k else []
    else:
        target = monomials(nvars, (grade[0] - 2,), mode) if grade[0] >= 2 else []
    row_index = {key: i for i, key in enumerate(target)}
    rows = [[0] * len(cols) for _ in target]
    for c, key in enumerate(cols):
        for tkey, val in Poly({key: 1}, nvars, mode).laplacian().terms.items():
            rows[row_index[tkey]][c] += val
    vecs = exact.nullspace(rows, len(cols))
    return cols, [Poly(dict(zip(cols, v)), nvars, mode) for v in vecs]


def _finish_basis(n, grade, mode, keys, elements):
    gram = [[inner(a, b) for b in elements] for a in elements]
    g = np.array([[float(x) for x in row] for row in gram])
    coeffs = np.array([[float(e.terms.get(key, 0)) for key in keys] for e in elements])
    chol = np.linalg.cholesky(g)
    ortho = np.linalg.solve(chol, coeffs)
    return HarmonicSpaceBasis(n, grade, mode, elements, gram, keys, ortho)


@lru_cache(maxsize=None)
def build_basis(n: int, j: int, k: int) -> HarmonicSpaceBasis:
    """Exact basis of H_{j,k} on S^{2n+1} with exact Gram and orthonormal float copy."""
    if n < 1:
        raise ValueError("CR sphere needs n >= 1")
    if j + k > MAX_EXACT_DEGREE + 4:
        raise ValueError(f"exact bases are limited to j + k <= {MAX_EXACT_DEGREE + 4}")
    keys, elements = _nullspace_basis(n, (j, k), COMPLEX)
    if len(elements) != dim_hjk(n, j, k):
        raise AssertionError(f"nullspace rank {len(elements)} != dim formula {dim_hjk(n, j, k)}")
    return _finish_basis(n, (j, k), COMPLEX, keys, elements)


@lru_cache(maxsize=None)
def build_basis_real(n: int, h: int) -> HarmonicSpaceBasis:
    """Exact basis of degree-h harmonics on S^n (polynomials in n + 1 real variables)."""
    if n < 1:
        raise ValueError("need n >= 1")
    keys, elements = _nullspace_basis(n, (h,), REAL)
    if len(elements) != dim_real(n, h):
        raise AssertionError(f"nullspace rank {len(elements)} != {dim_real(n, h)}")
    return _finish_basis(n, (h,), REAL, keys, elements)


def nullspace_rank(n: int, j: int, k: int) -> int:
    """dim P_{j,k} minus the rank of the Laplacian on it."""
    return len(_nullspace_basis(n, (j, k), COMPLEX)[1])


def expand(p: Poly):
    """Harmonic components of ``p`` on the sphere, keyed by (j, k) or (h,)."""
    return harmonic_decomposition(p)


def is_harmonic(p: Poly) -> bool:
    return p.laplacian().is_zero()


def _single_grade(Y: Poly):
    parts = Y.homogeneous_parts()
    if len(parts) != 1 or not is_harmonic(Y):
        raise NotHarmonicError("expected a nonzero homogeneous harmonic polynomial")
    return next(iter(parts))


def ar95_decompose_cr(l: int, Y: Poly, n: int | None = None):
    """Split z_l * Y for Y in H_{j,k} into its H_{j+1,k} and H_{j,k-1} parts.

    Returns ``(h_plus, h_minus)`` with ``z_l Y = h_plus + |z|^2 h_minus``, so
    the two agree with ``z_l Y`` on the sphere.
    """
    Y._require_complex()
    j, k = _single_grade(Y)
    n = Y.nvars - 1 if n is None else n
    m = n + 1
    h_minus = Y.diff_zbar(l).scale(Fraction(1, n + j + k))
    h_plus = Poly.z(l, m) * Y - Poly.norm_sq(m) * h_minus
    return h_plus, h_minus


def decompose_real(jcoord: int, Y: Poly, n: int | None = None):
    """Split x_j * Y for Y in H_h on S^n into its H_{h+1} and H_{h-1} parts."""
    if Y.mode != REAL:
        raise NotHarmonicError("decompose_real needs a real-mode polynomial")
    (h,) = _single_grade(Y)
    n = Y.nvars - 1 if n is None else n
    grad = Y.diff_x(jcoord)
    xY = Poly.x(jcoord, n + 1) * Y
    if grad.is_zero():
        return xY, Poly.zero(n + 1, REAL)
    c = Fraction(1, 1 - n - 2 * h)
    return xY + Poly.norm_sq(n + 1, REAL) * grad.scale(c), grad.scale(-c)


def zonal_eval(n: int, j: int, k: int, t, total_mass: float = 1.0):
    """Zonal harmonic Phi_{j,k} as a function of t = conj(zeta) . eta.

    ``total_mass`` is the mass of the reference measure the reproducing
    property refers to (1 gives the kernel for the normalized measure).
    """
    t = np.asarray(t, dtype=complex)
    if j > k:
        return np.conj(zonal_eval(n, k, j, t, total_mass))
    const = math.factorial(k + n - 1) * (j + k + n) / (math.factorial(n) * math.factorial(k) * total_mass)
    jac = jacobi_eval(JacobiParams(j, n - 1, k - j), 2 * np.abs(t) ** 2 - 1)
    return const * t ** (k - j) * jac


def zonal_psi(n: int, a: int, b: int, z):
    """Unnormalized zonal function about the north pole, in z = zeta_{n+1}."""
    z = np.asarray(z, dtype=complex)
    if a <= b:
        return np.conj(z) ** (b - a) * jacobi_eval(JacobiParams(a, n - 1, b - a), 2 * np.abs(z) ** 2 - 1)
    return z ** (a - b) * jacobi_eval(JacobiParams(b, n - 1, a - b), 2 * np.abs(z) ** 2 - 1)


# -- analytic orthonormal basis on S^3 --------------------------------------

def hopf_modes(j: int, k: int):
    """Torus charges (m1, m2) and radial degree s of the S^3 basis of H_{j,k}."""
    out = []
    for m1 in range(-k, j + 1):
        m2 = j - k - m1
        s = (j + k - abs(m1) - abs(m2)) // 2
        out.append((m1, m2, s))
    return out


def hopf_norm_sq(m1: int, m2: int, s: int) -> float:
    """Mean over S^3 of the squared unnormalized Hopf harmonic."""
    a, b = abs(m2), abs(m1)
    return math.exp(
        log_gamma(s + a + 1) + log_gamma(s + b + 1) - log_gamma(s + a + b + 1) - log_gamma(s + 1)
    ) / (2 * s + a + b + 1)


def hopf_radial(m1: int, m2: int, s: int, u):
    """Normalized radial profile in u = |z_2|^2: (1-u)^{|m1|/2} u^{|m2|/2} P_s(1 - 2u)."""
    u = np.asarray(u, dtype=float)
    a, b = abs(m2), abs(m1)
    p = jacobi_eval(JacobiParams(s, a, b), 1 - 2 * u)
    return np.sqrt(1 - u) ** b * np.sqrt(u) ** a * p / math.sqrt(hopf_norm_sq(m1, m2, s))


def hopf_evaluate(j: int, k: int, points):
    """Orthonormal (for the normalized measure) basis of H_{j,k} on S^3 at points, shape (N, j+k+1)."""
    pts = np.asarray(points, dtype=complex)
    z1, z2 = pts[:, 0], pts[:, 1]
    u = np.clip(np.abs(z2) ** 2, 0.0, 1.0)
    cols = []
    for m1, m2, s in hopf_modes(j, k):
        a, b = abs(m2), abs(m1)
        phase1 = z1 ** m1 if m1 >= 0 else np.conj(z1) ** (-m1)
        phase2 = z2 ** m2 if m2 >= 0 else np.conj(z2) ** (-m2)
        p = jacobi_eval(JacobiParams(s, a, b), 1 - 2 * u)
        cols.append(phase1 * phase2 * p / math.sqrt(hopf_norm_sq(m1, m2, s)))
    return np.stack(cols, axis=1)


def random_sphere_points(n: int, count: int, rng) -> np.ndarray:
    z = rng.standard_normal((count, n + 1)) + 1j * rng.standard_normal((count, n + 1))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def zonal_addition_residual(n: int, j: int, k: int, pairs: int = 100, seed: int = 0) -> float:
    """max |Phi_{j,k}(zeta, eta) - sum_l Y^l(zeta) conj(Y^l(eta))| over random pairs (normalized measure)."""
    rng = np.random.default_rng(seed)
    zeta, eta = random_sphere_points(n, pairs, rng), random_sphere_points(n, pairs, rng)
    basis = build_basis(n, j, k)
    direct = np.sum(basis.evaluate(zeta) * np.conj(basis.evaluate(eta)), axis=1)
    t = np.sum(np.conj(zeta) * eta, axis=1)
    return float(np.max(np.abs(zonal_eval(n, j, k, t) - direct)))
