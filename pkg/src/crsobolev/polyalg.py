"""Exact polynomial algebra on C^{n+1} (bigraded) and R^{n+1} (graded).

Complex-mode monomials are keyed by ``alpha + beta`` (holomorphic exponents
followed by antiholomorphic ones); real-mode monomials by a plain exponent
tuple. Coefficients are :class:`fractions.Fraction`. Polynomials are value
objects: every operation returns a new instance.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod

import numpy as np

COMPLEX = "complex"
REAL = "real"


class ModeError(ValueError):
    """Operands live in different polynomial rings."""


class Poly:
    __slots__ = ("nvars", "mode", "terms", "_hash")

    def __init__(self, terms, nvars: int, mode: str = COMPLEX):
        if mode not in (COMPLEX, REAL):
            raise ValueError(f"unknown variable mode {mode!r}")
        width = 2 * nvars if mode == COMPLEX else nvars
        clean = {}
        for key, c in dict(terms).items():
            key = tuple(int(e) for e in key)
            if len(key) != width:
                raise ValueError(f"exponent {key} has wrong length for {mode} mode in {nvars} variables")
            c = Fraction(c)
            if c:
                clean[key] = clean.get(key, 0) + c
        self.terms = {k: v for k, v in clean.items() if v}
        self.nvars = nvars
        self.mode = mode
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, nvars, mode=COMPLEX):
        return cls({}, nvars, mode)

    @classmethod
    def constant(cls, c, nvars, mode=COMPLEX):
        width = 2 * nvars if mode == COMPLEX else nvars
        return cls({(0,) * width: c}, nvars, mode)

    @classmethod
    def monomial(cls, alpha, beta=None, coeff=1, mode=None):
        if beta is None and mode != COMPLEX:
            return cls({tuple(alpha): coeff}, len(alpha), REAL)
        beta = tuple(beta) if beta is not None else (0,) * len(alpha)
        return cls({tuple(alpha) + beta: coeff}, len(alpha), COMPLEX)

    @classmethod
    def z(cls, l, nvars):
        """Holomorphic coordinate z_l (0-based index)."""
        return cls({_unit(l, 2 * nvars): 1}, nvars, COMPLEX)

    @classmethod
    def zbar(cls, l, nvars):
        return cls({_unit(nvars + l, 2 * nvars): 1}, nvars, COMPLEX)

    @classmethod
    def x(cls, l, nvars):
        return cls({_unit(l, nvars): 1}, nvars, REAL)

    @classmethod
    def norm_sq(cls, nvars, mode=COMPLEX):
        return _norm_sq_power(nvars, mode, 1)

    # -- structure --------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, Poly):
            raise TypeError(f"expected Poly, got {type(other).__name__}")
        if other.nvars != self.nvars or other.mode != self.mode:
            raise ModeError(
                f"cannot combine {self.mode}[{self.nvars}] with {other.mode}[{other.nvars}]"
            )

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(other, self.nvars, self.mode)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.mode == other.mode and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.mode, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({self.to_text()!r})"

    def grading(self, key):
        """Bidegree ``(j, k)`` of a complex key or ``(h,)`` of a real key."""
        if self.mode == COMPLEX:
            return (sum(key[: self.nvars]), sum(key[self.nvars:]))
        return (sum(key),)

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def homogeneous_parts(self):
        parts = {}
        for key, c in self.terms.items():
            parts.setdefault(self.grading(key), {})[key] = c
        return {g: Poly(t, self.nvars, self.mode) for g, t in sorted(parts.items())}

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(other, self.nvars, self.mode)
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Poly(out, self.nvars, self.mode)

    __radd__ = __add__

    def __neg__(self):
        return Poly({k: -v for k, v in self.terms.items()}, self.nvars, self.mode)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return Poly.zero(self.nvars, self.mode)
        return Poly({k: v * c for k, v in self.terms.items()}, self.nvars, self.mode)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(k1, k2))
                out[key] = out.get(key, 0) + c1 * c2
        return Poly(out, self.nvars, self.mode)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.scale(1 / Fraction(c))

    def __pow__(self, e: int):
        out = Poly.constant(1, self.nvars, self.mode)
        for _ in range(e):
            out = out * self
        return out

    def conj(self):
        """Complex conjugate (coefficients are real, so this swaps z and zbar)."""
        if self.mode == REAL:
            return self
        n = self.nvars
        return Poly({k[n:] + k[:n]: v for k, v in self.terms.items()}, n, COMPLEX)

    # -- calculus ---------------------------------------------------------
    def diff(self, index: int):
        """Partial derivative along raw exponent slot ``index``."""
        out = {}
        for key, c in self.terms.items():
            e = key[index]
            if e:
                new = key[:index] + (e - 1,) + key[index + 1:]
                out[new] = c * e
        return Poly(out, self.nvars, self.mode)

    def diff_z(self, l):
        self._require_complex()
        return self.diff(l)

    def diff_zbar(self, l):
        self._require_complex()
        return self.diff(self.nvars + l)

    def diff_x(self, l):
        if self.mode != REAL:
            raise ModeError("diff_x needs a real-mode polynomial")
        return self.diff(l)

    def _require_complex(self):
        if self.mode != COMPLEX:
            raise ModeError("operation needs a complex-bigraded polynomial")

    def laplacian(self):
        """Euclidean Laplacian; in complex mode 4 * sum_l d^2 / dz_l dzbar_l."""
        n = self.nvars
        out = {}
        if self.mode == COMPLEX:
            for key, c in self.terms.items():
                for l in range(n):
                    a, b = key[l], key[n + l]
                    if a and b:
                        new = list(key)
                        new[l] -= 1
                        new[n + l] -= 1
                        new = tuple(new)
                        out[new] = out.get(new, 0) + 4 * a * b * c
        else:
            for key, c in self.terms.items():
                for l in range(n):
                    e = key[l]
                    if e >= 2:
                        new = key[:l] + (e - 2,) + key[l + 1:]
                        out[new] = out.get(new, 0) + e * (e - 1) * c
        return Poly(out, n, self.mode)

    # -- evaluation / serialization --------------------------------------
    def evaluate(self, points):
        """Evaluate at an ``(N, nvars)`` array of points (complex or real)."""
        pts = np.atleast_2d(np.asarray(points))
        if pts.shape[1] != self.nvars:
            raise ValueError(f"points need {self.nvars} coordinates, got {pts.shape[1]}")
        return monomial_matrix(list(self.terms), pts, self.mode) @ np.array(
            [float(c) for c in self.terms.values()]
        ) if self.terms else np.zeros(pts.shape[0], dtype=pts.dtype)

    def to_text(self) -> str:
        head = f"{self.mode}[{self.nvars}]"
        if not self.terms:
            return f"{head}: 0"
        body = " + ".join(f"{c}*{_mono_text(k, self.nvars, self.mode)}" for k, c in sorted(self.terms.items()))
        return f"{head}: {body}"

    @classmethod
    def from_text(cls, text: str):
        head, _, body = text.partition(":")
        m = re.fullmatch(r"\s*(complex|real)\[(\d+)\]\s*", head)
        if not m:
            raise ValueError(f"bad polynomial header {head!r}")
        mode, nvars = m.group(1), int(m.group(2))
        width = 2 * nvars if mode == COMPLEX else nvars
        terms = {}
        body = body.strip()
        if body != "0":
            for chunk in body.split(" + "):
                coeff, _, mono = chunk.partition("*")
                key = [0] * width
                if mono != "1":
                    for factor in mono.split("*"):
                        name, _, e = factor.partition("^")
                        fm = re.fullmatch(r"(zb|z|x)(\d+)", name)
                        if not fm:
                            raise ValueError(f"bad variable {name!r}")
                        idx = int(fm.group(2)) - 1 + (nvars if fm.group(1) == "zb" else 0)
                        key[idx] += int(e) if e else 1
                terms[tuple(key)] = terms.get(tuple(key), 0) + Fraction(coeff)
        return cls(terms, nvars, mode)


def _unit(i, width):
    return tuple(int(j == i) for j in range(width))


def _mono_text(key, nvars, mode):
    names = (
        [f"z{i + 1}" for i in range(nvars)] + [f"zb{i + 1}" for i in range(nvars)]
        if mode == COMPLEX
        else [f"x{i + 1}" for i in range(nvars)]
    )
    factors = [name if e == 1 else f"{name}^{e}" for name, e in zip(names, key) if e]
    return "*".join(factors) if factors else "1"


def monomial_matrix(keys, points, mode):
    """Matrix of monomial values, shape ``(len(points), len(keys))``."""
    pts = np.atleast_2d(np.asarray(points))
    nv = pts.shape[1]
    if mode == COMPLEX:
        pts = pts.astype(complex)
        cols = np.concatenate([pts, pts.conj()], axis=1)
        width = 2 * nv
    else:
        cols = pts.astype(float)
        width = nv
    keys = list(keys)
    if not keys:
        return np.zeros((pts.shape[0], 0), dtype=cols.dtype)
    exps = np.asarray(keys, dtype=int).reshape(len(keys), width)
    top = int(exps.max(initial=0))
    powers = np.ones((top + 1,) + cols.shape, dtype=cols.dtype)
    for e in range(1, top + 1):
        powers[e] = powers[e - 1] * cols
    out = np.ones((pts.shape[0], len(keys)), dtype=cols.dtype)
    for slot in range(width):
        out *= powers[exps[:, slot], :, slot].T
    return out


@lru_cache(maxsize=None)
def _norm_sq_power(nvars, mode, power):
    if power == 0:
        return Poly.constant(1, nvars, mode)
    if mode == COMPLEX:
        base = Poly({_unit(l, 2 * nvars)[:nvars] + _unit(l, nvars): 1 for l in range(nvars)}, nvars, COMPLEX)
    else:
        base = Poly({tuple(2 * int(j == l) for j in range(nvars)): 1 for l in range(nvars)}, nvars, REAL)
    return base if power == 1 else _norm_sq_power(nvars, mode, power - 1) * base


def poly_mul(p: Poly, q: Poly) -> Poly:
    return p * q


def euler_fields(p: Poly):
    """Return ``(Z p, Zbar p)`` for the holomorphic and antiholomorphic Euler fields."""
    p._require_complex()
    n = p.nvars
    zp = {k: c * sum(k[:n]) for k, c in p.terms.items()}
    zbp = {k: c * sum(k[n:]) for k, c in p.terms.items()}
    return Poly(zp, n, COMPLEX), Poly(zbp, n, COMPLEX)


def complex_laplacian(p: Poly) -> Poly:
    p._require_complex()
    return p.laplacian()


def _laplace_shift(N, t, d):
    # Laplacian of |x|^{2t} h for harmonic h of degree d is this times |x|^{2t-2} h
    return 2 * t * (N + 2 * t - 2 + 2 * d)


@lru_cache(maxsize=200_000)
def _homogeneous_decomposition(f: Poly, grade):
    """Split homogeneous f into harmonic pieces: f = sum_i |x|^{2i} h_i."""
    N = 2 * f.nvars if f.mode == COMPLEX else f.nvars
    total = sum(grade)
    K = min(grade) if f.mode == COMPLEX else total // 2
    lap = [f]
    for _ in range(K):
        lap.append(lap[-1].laplacian())
    h = {}
    for i in range(K, -1, -1):
        rhs = lap[i]
        for k in range(i + 1, K + 1):
            if h[k]:
                d = total - 2 * k
                c = prod(_laplace_shift(N, t, d) for t in range(k - i + 1, k + 1))
                rhs = rhs - _norm_sq_power(f.nvars, f.mode, k - i) * h[k].scale(c)
        d = total - 2 * i
        c = prod(_laplace_shift(N, t, d) for t in range(1, i + 1))
        h[i] = rhs.scale(Fraction(1, c))
    return tuple(h[i] for i in range(K + 1))


def harmonic_decomposition(p: Poly):
    """Harmonic components of ``p`` restricted to the unit sphere.

    Returns ``{(j, k): H}`` in complex mode or ``{(h,): H}`` in real mode,
    where each ``H`` is a harmonic polynomial of that (bi)degree and
    ``sum(H)`` agrees with ``p`` on the sphere.
    """
    out = {}
    for grade, f in p.homogeneous_parts().items():
        for i, h in enumerate(_homogeneous_decomposition(f, grade)):
            if h:
                g = tuple(x - i for x in grade) if p.mode == COMPLEX else (grade[0] - 2 * i,)
                out[g] = out[g] + h if g in out else h
    return {g: h for g, h in sorted(out.items()) if h}


def reduce_mod_sphere(p: Poly) -> Poly:
    """Canonical on-sphere representative: the full harmonic expansion of ``p``."""
    out = Poly.zero(p.nvars, p.mode)
    for h in harmonic_decomposition(p).values():
        out = out + h
    return out


def _check_dim(p: Poly, n: int):
    if p.nvars != n + 1:
        raise ModeError(f"polynomial has {p.nvars} variables, sphere dimension needs {n + 1}")


def sublaplacian_apply(p: Poly, n: int) -> Poly:
    """Sublaplacian L = -1/2 sum_j (T_j Tbar_j + Tbar_j T_j), reduced to the sphere."""
    p._require_complex()
    _check_dim(p, n)
    m = n + 1

    def T(f, j):
        zf, _ = euler_fields(f)
        return f.diff_z(j) - Poly.zbar(j, m) * zf

    def Tbar(f, j):
        _, zbf = euler_fields(f)
        return f.diff_zbar(j) - Poly.z(j, m) * zbf

    acc = Poly.zero(m)
    for j in range(m):
        acc = acc + T(Tbar(p, j), j) + Tbar(T(p, j), j)
    return reduce_mod_sphere(acc.scale(Fraction(-1, 2)))


def conformal_sublaplacian_apply(p: Poly, n: int) -> Poly:
    """D = L + n^2/4 on the sphere."""
    return sublaplacian_apply(p, n) + reduce_mod_sphere(p).scale(Fraction(n * n, 4))


@lru_cache(maxsize=None)
def _monomial_mean_complex(alpha, n):
    return Fraction(factorial(n) * prod(factorial(a) for a in alpha), factorial(n + sum(alpha)))


@lru_cache(maxsize=None)
def _monomial_mean_real(exps):
    if any(e % 2 for e in exps):
        return Fraction(0)
    half_n = Fraction(len(exps), 2)
    num = Fraction(1)
    for e in exps:
        for t in range(e // 2):
            num *= Fraction(1, 2) + t
    den = Fraction(1)
    for t in range(sum(exps) // 2):
        den *= half_n + t
    return num / den


def monomial_mean(key, nvars, mode=COMPLEX) -> Fraction:
    """Exact mean of one monomial over the unit sphere (total mass one)."""
    if mode == COMPLEX:
        alpha, beta = tuple(key[:nvars]), tuple(key[nvars:])
        if alpha != beta:
            return Fraction(0)
        return _monomial_mean_complex(alpha, nvars - 1)
    return _monomial_mean_real(tuple(key))


def integrate_sphere(p: Poly, n: int | None = None) -> Fraction:
    """Mean value of ``p`` over the unit sphere (results are in units of total mass)."""
    if n is not None:
        _check_dim(p, n)
    return sum((c * monomial_mean(k, p.nvars, p.mode) for k, c in p.terms.items()), Fraction(0))


def inner(p: Poly, q: Poly) -> Fraction:
    """Exact L^2 pairing mean(p * conj(q)) on the sphere."""
    return integrate_sphere(p * q.conj())


def monomials(nvars, grade, mode=COMPLEX):
    """Exponent keys spanning P_{j,k} (complex, grade=(j,k)) or P_h (real, grade=(h,))."""
    if mode == COMPLEX:
        j, k = grade
        return [a + b for a in _compositions(j, nvars) for b in _compositions(k, nvars)]
    return list(_compositions(grade[0], nvars))


@lru_cache(maxsize=None)
def _compositions(total, parts):
    if parts == 1:
        return ((total,),)
    out = []
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)
