"""Numerical harmonic expansion c_{j,k}^l(F) = mean(F conj Y_{j,k}^l) and its inverse.

On Hopf product grids the angular sums are done by FFT and the radial sum by
Gauss-Legendre against the analytic orthonormal basis. Other grids use the
exact bases of :mod:`crsobolev.harmonics`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..harmonics import build_basis, build_basis_real, hopf_modes, hopf_radial


@dataclass
class NumericExpansion:
    kind: str
    maxdeg: int
    coeffs: dict
    total_energy: float

    def energies(self) -> dict:
        return {g: float(np.sum(np.abs(c) ** 2)) for g, c in self.coeffs.items()}

    @property
    def captured_energy(self) -> float:
        return float(sum(self.energies().values()))

    @property
    def tail(self) -> float:
        """Parseval defect mean|F|^2 - sum |c|^2 (relative to mean|F|^2)."""
        if self.total_energy == 0:
            return 0.0
        return (self.total_energy - self.captured_energy) / self.total_energy


def _hopf_layout(grid):
    st = grid.structure
    M, K = len(st["u"]), st["K"]
    return st["u"], st["wu"], M, K


def _grades(kind, maxdeg):
    if kind == "cr":
        return [(j, d - j) for d in range(maxdeg + 1) for j in range(d, -1, -1)]
    return [(h,) for h in range(maxdeg + 1)]


def _modes_for(kind, grade):
    if kind == "cr":
        return hopf_modes(*grade)
    (h,) = grade
    return [m for j in range(h, -1, -1) for m in hopf_modes(j, h - j)]


def _point_values(f, grid):
    if callable(f):
        return np.asarray(f(grid.nodes))
    return np.asarray(f)


def numeric_expand(f, grid, maxdeg: int) -> NumericExpansion:
    """Expansion coefficients of ``f`` (a function of node arrays, or node values) up to ``maxdeg``."""
    values = _point_values(f, grid)
    kind = grid.sphere
    total = float(grid.mean(np.abs(values) ** 2).real)
    coeffs = {}
    if grid.structure is not None:
        u, wu, M, K = _hopf_layout(grid)
        if K < 2 * maxdeg + 1:
            raise ValueError(f"grid has K = {K} angles; maxdeg {maxdeg} needs K >= {2 * maxdeg + 1}")
        spec = np.fft.fft2(values.reshape(M, K, K), axes=(1, 2)) / K**2
        for g in _grades(kind, maxdeg):
            modes = _modes_for(kind, g)
            m1 = np.array([m[0] for m in modes]) % K
            m2 = np.array([m[1] for m in modes]) % K
            R = np.stack([hopf_radial(a, b, s, u) for a, b, s in modes], axis=1)
            coeffs[g] = np.sum(wu[:, None] * R * spec[:, m1, m2], axis=0)
        return NumericExpansion(kind, maxdeg, coeffs, total)
    w = grid.weights / grid.total_mass
    for g in _grades(kind, maxdeg):
        basis = build_basis(grid.n, *g) if kind == "cr" else build_basis_real(grid.n, g[0])
        Y = basis.evaluate(grid.nodes)
        coeffs[g] = (w * values) @ np.conj(Y)
    return NumericExpansion(kind, maxdeg, coeffs, total)


def synthesize(coeffs: dict, grid, kind: str | None = None) -> np.ndarray:
    """Values at the grid nodes of sum c Y over the given coefficient blocks."""
    kind = kind or grid.sphere
    if grid.structure is not None:
        u, wu, M, K = _hopf_layout(grid)
        spec = np.zeros((M, K, K), dtype=complex)
        for g, c in coeffs.items():
            modes = _modes_for(kind, g)
            for coef, (a, b, s) in zip(c, modes):
                if coef != 0:
                    spec[:, a % K, b % K] += coef * hopf_radial(a, b, s, u)
        return (np.fft.ifft2(spec, axes=(1, 2)) * K**2).ravel()
    out = np.zeros(grid.size, dtype=complex)
    for g, c in coeffs.items():
        basis = build_basis(grid.n, *g) if kind == "cr" else build_basis_real(grid.n, g[0])
        out += basis.evaluate(grid.nodes) @ c
    return out


def parseval_energy(expansion: NumericExpansion) -> float:
    return expansion.captured_energy
