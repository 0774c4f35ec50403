"""Product quadrature rules on S^3 (CR, n = 1) and on S^1, S^2, S^3 (real).

S^3 uses the Hopf coordinates z1 = sqrt(1-u) e^{i phi1}, z2 = sqrt(u) e^{i phi2},
in which the normalized measure is du dphi1 dphi2 / (4 pi^2): Gauss-Legendre
in u times trapezoid rules in both angles. A monomial of total degree d has
angular charges |m| <= d and a radial part of degree <= d/2 in u, so K >= d+1
angles and M >= (d+1)/4 radial nodes integrate it exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..config import cr_total_mass, euclidean_sphere_area
from ..specfun import log_gamma

CR = "cr"
REAL = "real"


class UnsupportedGridError(ValueError):
    pass


@dataclass
class QuadratureGrid:
    sphere: str
    n: int
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int
    total_mass: float
    orders: tuple
    # Hopf product layout (u nodes, u weights, K), when the grid has one
    structure: dict | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.weights)

    def integrate(self, values) -> complex:
        return np.dot(self.weights, values)

    def mean(self, values):
        return np.dot(self.weights, values) / self.total_mass

    def complex_nodes(self) -> np.ndarray:
        """Nodes as points of C^2 (only for S^3 grids)."""
        if self.sphere == CR:
            return self.nodes
        if self.n != 3:
            raise UnsupportedGridError("complex view exists only for S^3")
        x = self.nodes
        return np.stack([x[:, 0] + 1j * x[:, 1], x[:, 2] + 1j * x[:, 3]], axis=1)


def hopf_orders(degree: int) -> tuple:
    """Smallest (M, K) integrating every monomial of total degree <= ``degree`` on S^3."""
    return (max(1, -(-(degree + 1) // 4)), degree + 1)


def _gauss_unit(m: int):
    x, w = np.polynomial.legendre.leggauss(m)
    return (x + 1) / 2, w / 2


def _hopf_nodes(M: int, K: int):
    u, wu = _gauss_unit(M)
    phi = 2 * np.pi * np.arange(K) / K
    e = np.exp(1j * phi)
    z1 = np.sqrt(1 - u)[:, None, None] * e[None, :, None] * np.ones((1, 1, K))
    z2 = np.sqrt(u)[:, None, None] * np.ones((1, K, 1)) * e[None, None, :]
    nodes = np.stack([z1.ravel(), z2.ravel()], axis=1)
    weights = np.repeat(wu / K**2, K * K)
    return nodes, weights, {"kind": "hopf", "u": u, "wu": wu, "K": K}


def build_grid(sphere: str, n: int, orders=None, degree: int | None = None, total_mass: float | None = None):
    """Product grid on the CR sphere S^3 (``sphere='cr'``, n = 1) or on S^n, n <= 3.

    Give either ``orders`` or the wanted exactness ``degree``.
    """
    if sphere == CR:
        if n != 1:
            raise UnsupportedGridError("CR quadrature is implemented for n = 1 only")
        mass = cr_total_mass(1) if total_mass is None else total_mass
    elif sphere == REAL:
        if not 1 <= n <= 3:
            raise UnsupportedGridError("real quadrature is implemented for 1 <= n <= 3")
        mass = euclidean_sphere_area(n) if total_mass is None else total_mass
    else:
        raise UnsupportedGridError(f"unknown sphere kind {sphere!r}")

    if sphere == REAL and n == 1:
        (K,) = orders if orders is not None else (degree + 1,)
        phi = 2 * np.pi * np.arange(K) / K
        nodes = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        return QuadratureGrid(sphere, n, nodes, np.full(K, mass / K), K - 1, mass, (K,))
    if sphere == REAL and n == 2:
        M, K = orders if orders is not None else (max(1, -(-(degree + 1) // 2)), degree + 1)
        t, wt = np.polynomial.legendre.leggauss(M)
        phi = 2 * np.pi * np.arange(K) / K
        s = np.sqrt(1 - t**2)
        nodes = np.stack([
            np.outer(s, np.cos(phi)).ravel(), np.outer(s, np.sin(phi)).ravel(), np.repeat(t, K)
        ], axis=1)
        weights = np.repeat(wt / 2 / K, K) * mass
        return QuadratureGrid(sphere, n, nodes, weights, min(2 * M - 1, K - 1), mass, (M, K))

    M, K = orders if orders is not None else hopf_orders(degree)
    nodes, weights, structure = _hopf_nodes(M, K)
    if sphere == REAL:
        nodes = np.stack([nodes[:, 0].real, nodes[:, 0].imag, nodes[:, 1].real, nodes[:, 1].imag], axis=1)
    return QuadratureGrid(sphere, n, nodes, weights * mass, min(K - 1, 4 * M - 1), mass, (M, K), structure)


# -- certification -----------------------------------------------------------

def _power_rows(cols, degree):
    """Rows prod_v cols[v]**e_v over exponents with sum <= degree, and those exponents."""
    nv, npts = len(cols), cols[0].shape[0]
    pw = [np.empty((degree + 1, npts), dtype=cols[0].dtype) for _ in cols]
    for v in range(nv):
        pw[v][0] = 1
        for e in range(1, degree + 1):
            pw[v][e] = pw[v][e - 1] * cols[v]
    exps = [e for e in _exponents(nv, degree)]
    rows = np.empty((len(exps), npts), dtype=cols[0].dtype)
    for r, e in enumerate(exps):
        acc = np.ones(npts, dtype=cols[0].dtype)
        for v, ev in enumerate(e):
            if ev:
                acc = acc * pw[v][ev]
        rows[r] = acc
    return rows, exps


def _exponents(nv, degree):
    if nv == 0:
        yield ()
        return
    for e in range(degree + 1):
        for rest in _exponents(nv - 1, degree - e):
            yield (e,) + rest


def _cr_mean(a1, b1, a2, b2):
    if a1 != b1 or a2 != b2:
        return 0.0
    return math.exp(log_gamma(a1 + 1) + log_gamma(a2 + 1) - log_gamma(a1 + a2 + 2))


def _real_mean(exps, n):
    if any(e % 2 for e in exps):
        return 0.0
    s = sum(exps)
    return math.exp(
        log_gamma((n + 1) / 2) + sum(log_gamma((e + 1) / 2) for e in exps)
        - (n + 1) / 2 * math.log(math.pi) - log_gamma((s + n + 1) / 2)
    )


@dataclass
class Certification:
    degree: int
    monomials: int
    max_error: float

    @property
    def passed(self) -> bool:
        return self.max_error <= 1e-12


def certify_grid(grid: QuadratureGrid, degree: int | None = None, chunk: int = 4096) -> Certification:
    """Compare quadrature means of every monomial of degree <= ``degree`` with exact means.

    Monomials are split into two variable groups, so all products are covered
    by one matrix product ``A diag(w) B^T``.
    """
    d = grid.exactness_degree if degree is None else degree
    w = grid.weights / grid.total_mass
    if grid.sphere == CR:
        z = grid.nodes
        g1, g2 = [z[:, 0], np.conj(z[:, 0])], [z[:, 1], np.conj(z[:, 1])]
    else:
        x = grid.nodes
        half = (x.shape[1] + 1) // 2
        g1 = [x[:, v] for v in range(half)]
        g2 = [x[:, v] for v in range(half, x.shape[1])]
    sums = None
    for start in range(0, grid.size, chunk):
        sl = slice(start, start + chunk)
        A, e1 = _power_rows([c[sl] for c in g1], d)
        B, e2 = _power_rows([c[sl] for c in g2], d)
        part = (A * w[sl]) @ B.T
        sums = part if sums is None else sums + part
    worst, count = 0.0, 0
    for r, ea in enumerate(e1):
        da = sum(ea)
        for c, eb in enumerate(e2):
            if da + sum(eb) > d:
                continue
            exact = _cr_mean(ea[0], ea[1], eb[0], eb[1]) if grid.sphere == CR else _real_mean(ea + eb, grid.n)
            worst = max(worst, abs(sums[r, c] - exact))
            count += 1
    return Certification(d, count, float(worst))


# -- files -------------------------------------------------------------------

def save_grid(grid: QuadratureGrid, path) -> None:
    header = {
        "sphere": grid.sphere, "n": grid.n, "orders": list(grid.orders),
        "exactness_degree": grid.exactness_degree, "total_mass": grid.total_mass,
    }
    arrays = {"nodes": grid.nodes, "weights": grid.weights, "header": np.array(json.dumps(header))}
    if grid.structure:
        arrays.update(u=grid.structure["u"], wu=grid.structure["wu"])
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_grid(path) -> QuadratureGrid:
    with np.load(Path(path)) as data:
        header = json.loads(str(data["header"]))
        structure = None
        if "u" in data:
            structure = {"kind": "hopf", "u": data["u"], "wu": data["wu"], "K": header["orders"][1]}
        return QuadratureGrid(
            header["sphere"], header["n"], data["nodes"], data["weights"],
            header["exactness_degree"], header["total_mass"], tuple(header["orders"]), structure,
        )
