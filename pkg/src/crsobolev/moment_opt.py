"""Atomic probability measures with vanishing moments, and the functional Theta.

Theta(j, k; theta, 2n+1) is the infimum of sum_i nu_i^theta over atomic
probability measures on S^{2n+1} annihilating every mean-zero polynomial of
bidegree <= (j, k). The search here gives upper bounds only.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact
from .polyalg import COMPLEX, Poly, inner, monomial_mean, monomials
from .specfun import as_rational
from .sphere_numerics.sobolev import sharp_constant_cr

MERGE_TOL = 1e-6
FEASIBILITY_TOL = 1e-8


@dataclass
class DiscreteMeasure:
    points: np.ndarray  # (m, n+1) complex unit vectors
    weights: np.ndarray

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=complex))
        self.weights = np.asarray(self.weights, dtype=float)
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        if abs(self.weights.sum() - 1) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {self.weights.sum()!r}")
        if len(self.points) != len(self.weights):
            raise ValueError("one weight per point")

    @property
    def size(self) -> int:
        return len(self.weights)

    def min_separation(self) -> float:
        if self.size < 2:
            return math.inf
        d = np.linalg.norm(self.points[:, None, :] - self.points[None, :, :], axis=-1)
        return float(d[np.triu_indices(self.size, 1)].min())

    def to_dict(self):
        return {"atoms": [
            {"point": [[z.real, z.imag] for z in p], "weight": float(w)}
            for p, w in zip(self.points, self.weights)
        ]}


@dataclass
class MomentConstraintSet:
    """Orthonormal (in L^2 of the normalized measure) frame of real parts of P-bar_{j,k}."""
    n: int
    j: int
    k: int
    polys: list  # rational polys; the function is Re P (real block) or Im P (imaginary block)
    imaginary: list
    transform: np.ndarray  # frame = transform @ raw functions
    _grads: list = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return self.transform.shape[0]

    def raw_values(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=complex)
        vals = np.stack([p.evaluate(pts) for p in self.polys])
        return np.where(np.array(self.imaginary)[:, None], vals.imag, vals.real)

    def values(self, points) -> np.ndarray:
        """Frame functions at points, shape (dimension, m)."""
        return self.transform @ self.raw_values(points)

    def gradients(self, points) -> np.ndarray:
        """Euclidean gradients in R^{2n+2} = (Re z, Im z), shape (dimension, m, 2n+2)."""
        if self._grads is None:
            m = self.n + 1
            self._grads = [
                [(P.diff_z(l), P.diff_zbar(l)) for l in range(m)] for P in self.polys
            ]
        pts = np.asarray(points, dtype=complex)
        m = self.n + 1
        raw = np.empty((len(self.polys), len(pts), 2 * m))
        for b, (P, im) in enumerate(zip(self.polys, self.imaginary)):
            for l, (dz, dzb) in enumerate(self._grads[b]):
                a = dz.evaluate(pts) if not dz.is_zero() else 0
                c = dzb.evaluate(pts) if not dzb.is_zero() else 0
                gx = np.asarray(a + c) * np.ones(len(pts))
                gy = np.asarray(1j * (a - c)) * np.ones(len(pts))
                raw[b, :, l] = gx.imag if im else gx.real
                raw[b, :, m + l] = gy.imag if im else gy.real
        return np.einsum("ab,bmd->amd", self.transform, raw)


def _independent(funcs):
    gram = [[inner(a, b) for b in funcs] for a in funcs]
    _, pivots = exact.echelon(gram, len(funcs))
    return [funcs[i] for i in pivots]


def build_constraints(n: int, j: int, k: int) -> MomentConstraintSet:
    """Real and imaginary parts of the mean-zero polynomials of bidegree <= (j, k), as an orthonormal frame."""
    if j < 0 or k < 0 or j + k < 1:
        raise ValueError("need j, k >= 0 and j + k >= 1")
    m = n + 1
    real_part, imag_part = [], []
    for a in range(j + 1):
        for b in range(k + 1):
            if a == b == 0:
                continue
            for key in monomials(m, (a, b), COMPLEX):
                p = Poly({key: 1}, m, COMPLEX)
                re = (p + p.conj()).scale(Fraction(1, 2))
                im = (p - p.conj()).scale(Fraction(1, 2))  # i Im p, rational coefficients
                mean = monomial_mean(key, m, COMPLEX)
                if mean:
                    re = re - Poly.constant(mean, m)
                if not re.is_zero():
                    real_part.append(re)
                if not im.is_zero():
                    imag_part.append(im)
    blocks = [(_independent(real_part), False), (_independent(imag_part), True)]
    polys, flags, mats = [], [], []
    for funcs, im in blocks:
        if not funcs:
            continue
        g = np.array([[float(inner(a, b)) for b in funcs] for a in funcs])
        mats.append(np.linalg.inv(np.linalg.cholesky(g)))
        polys += funcs
        flags += [im] * len(funcs)
    size = sum(x.shape[0] for x in mats)
    T = np.zeros((size, size))
    off = 0
    for x in mats:
        T[off:off + x.shape[0], off:off + x.shape[0]] = x
        off += x.shape[0]
    return MomentConstraintSet(n, j, k, polys, flags, T)


def moment_residual(nu: DiscreteMeasure, C: MomentConstraintSet) -> np.ndarray:
    return C.values(nu.points) @ nu.weights


def theta_objective(nu: DiscreteMeasure, theta) -> float:
    theta = float(theta)
    if not 0 <= theta <= 1:
        raise ValueError("need 0 <= theta <= 1")
    w = nu.weights[nu.weights > 0]
    return float(np.sum(w**theta))


def antipodal_certificate(n: int, theta, constraints: MomentConstraintSet | None = None):
    """(1/2) delta_x + (1/2) delta_{-x} with x = e_1; returns (measure, value, exact residual).

    Every first-moment constraint is odd, so the exact residual is zero.
    """
    C = constraints or build_constraints(n, 1, 0)
    if C.j + C.k != 1:
        raise ValueError("the antipodal certificate is for first moments (j + k = 1)")
    x = np.zeros(n + 1, dtype=complex)
    x[0] = 1
    nu = DiscreteMeasure(np.stack([x, -x]), [0.5, 0.5])
    residual = []
    for P in C.polys:
        # P(e_1) and P(-e_1) exactly: only monomials in the first variable survive
        acc = Fraction(0)
        for key, c in P.terms.items():
            if all(e == 0 for i, e in enumerate(key) if i % (n + 1) != 0):
                deg = sum(key)
                acc += c * (1 + (-1) ** deg) / 2
        residual.append(acc)
    return nu, theta_objective(nu, theta), residual


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1
    ind = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0)


def _to_real(points):
    return np.concatenate([points.real, points.imag], axis=1)


def _to_complex(X):
    m = X.shape[1] // 2
    return X[:, :m] + 1j * X[:, m:]


def _normalize(X):
    return X / np.linalg.norm(X, axis=1, keepdims=True)


@dataclass
class SearchResult:
    measure: DiscreteMeasure | None
    value: float
    feasible: bool
    residual: float
    theta: float
    seed: int
    restarts: int
    m_points: int
    iterations: int
    penalty_schedule: list
    restart_values: list
    elapsed: float = 0.0

    def to_dict(self):
        return {
            "kind": "theta-search", "value_is": "upper bound",
            "value": self.value, "feasible": self.feasible, "residual": self.residual,
            "theta": self.theta, "seed": self.seed, "restarts": self.restarts,
            "m_points": self.m_points, "iterations": self.iterations,
            "penalty_schedule": list(self.penalty_schedule),
            "restart_values": list(self.restart_values),
            "measure": self.measure.to_dict() if self.measure else None,
        }


def _penalized(X, nu, C, theta, rho):
    pts = _to_complex(X)
    G = C.values(pts)
    r = G @ nu
    obj = float(np.sum(np.maximum(nu, 0) ** theta) + rho * r @ r)
    return obj, r, G, pts


def _local_search(X, nu, C, theta, schedule, steps):
    iters = 0
    for rho in schedule:
        obj, r, G, pts = _penalized(X, nu, C, theta, rho)
        t = 0.1
        for _ in range(steps):
            iters += 1
            grads = C.gradients(pts)
            g_nu = theta * np.maximum(nu, 1e-12) ** (theta - 1) + 2 * rho * (r @ G)
            g_X = 2 * rho * np.einsum("a,amd->md", r, grads) * nu[:, None]
            g_X -= np.sum(g_X * X, axis=1, keepdims=True) * X
            while True:
                Xn = _normalize(X - t * g_X)
                nun = project_simplex(nu - t * g_nu)
                objn, rn, Gn, ptsn = _penalized(Xn, nun, C, theta, rho)
                if objn <= obj - 1e-4 * (np.sum((Xn - X) ** 2) + np.sum((nun - nu) ** 2)) / t or t < 1e-12:
                    break
                t *= 0.5
            if obj - objn < 1e-15:
                X, nu = Xn, nun
                break
            X, nu, obj, r, G, pts = Xn, nun, objn, rn, Gn, ptsn
            t = min(t * 2, 1.0)
    return X, nu, iters


def _prune_merge(X, nu, tol=MERGE_TOL):
    keep = nu > 1e-10
    X, nu = X[keep], nu[keep]
    out_X, out_nu = [], []
    used = np.zeros(len(nu), bool)
    for i in range(len(nu)):
        if used[i]:
            continue
        close = (~used) & (np.linalg.norm(X - X[i], axis=1) < tol)
        used |= close
        w = nu[close].sum()
        out_X.append(_normalize((nu[close, None] * X[close]).sum(0, keepdims=True) / w)[0])
        out_nu.append(w)
    nu = np.array(out_nu)
    return np.array(out_X), nu / nu.sum()


def _polish(X, nu, C, max_iter=50):
    """Gauss-Newton on the moment residual, moving points tangentially and weights on the simplex."""
    m, d = X.shape
    for _ in range(max_iter):
        pts = _to_complex(X)
        G = C.values(pts)
        r = G @ nu
        if np.linalg.norm(r) < 1e-13:
            break
        grads = C.gradients(pts)
        # tangent bases per point
        cols = []
        for i in range(m):
            P = np.eye(d) - np.outer(X[i], X[i])
            cols.append(np.einsum("ad,de->ae", grads[:, i, :], P) * nu[i])
        JX = np.concatenate(cols, axis=1)
        J = np.concatenate([JX, G], axis=1)
        J = np.vstack([J, np.concatenate([np.zeros(m * d), np.ones(m)])])
        rhs = -np.concatenate([r, [0.0]])
        step = np.linalg.lstsq(J, rhs, rcond=None)[0]
        X = _normalize(X + step[: m * d].reshape(m, d))
        nu = np.maximum(nu + step[m * d:], 0)
        nu = nu / nu.sum()
    return X, nu


def search_theta(C: MomentConstraintSet, theta, m_points: int = 4, restarts: int = 50, seed: int = 0,
                 schedule=(1.0, 10.0, 100.0, 1e3, 1e4, 1e5), steps: int = 200) -> SearchResult:
    """Multistart penalty search; the returned value is an upper bound on Theta."""
    start = time.perf_counter()
    theta = float(theta)
    if m_points < 1 or not 0 < theta < 1:
        raise ValueError("need m_points >= 1 and 0 < theta < 1")
    rng = np.random.default_rng(seed)
    d = 2 * (C.n + 1)
    best, best_val, best_res = None, math.inf, math.inf
    values, iters = [], 0
    for _ in range(restarts):
        X = _normalize(rng.standard_normal((m_points, d)))
        nu = rng.dirichlet(np.ones(m_points))
        X, nu, it = _local_search(X, nu, C, theta, schedule, steps)
        iters += it
        X, nu = _prune_merge(X, nu)
        X, nu = _polish(X, nu, C)
        X, nu = _prune_merge(X, nu)
        res = float(np.linalg.norm(C.values(_to_complex(X)) @ nu))
        val = float(np.sum(nu**theta))
        values.append(val if res < FEASIBILITY_TOL else None)
        if res < FEASIBILITY_TOL and val < best_val:
            best, best_val, best_res = (X, nu), val, res
        elif best is None and res < best_res:
            best_res = res
    measure = DiscreteMeasure(_to_complex(best[0]), best[1]) if best is not None else None
    return SearchResult(measure, best_val if best is not None else math.inf, best is not None, best_res,
                        theta, seed, restarts, m_points, iters, list(schedule), values,
                        time.perf_counter() - start)


def theta_exponent(n: int, gamma) -> Fraction:
    """theta = (Q - 2 gamma) / Q."""
    Q = 2 * n + 2
    return (Q - 2 * as_rational(gamma)) / Q


def improved_leading_constant(n: int, gamma, j: int, k: int, theta_value: float) -> float:
    """C_{n,2 gamma} / Theta(j, k; (Q - 2 gamma)/Q, 2n+1), the epsilon-free leading factor."""
    if theta_value <= 0:
        raise ValueError("Theta must be positive")
    return sharp_constant_cr(n, float(as_rational(gamma))) / theta_value
