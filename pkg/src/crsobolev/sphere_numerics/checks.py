"""Numerical checks of the intertwining relation and of the dilation-derivative coefficients on S^3."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..harmonics import zonal_psi
from ..operators import SpectralOperator, apply
from ..specfun import as_rational
from .expansion import numeric_expand, synthesize
from .maps import dilation


class StepSizeError(RuntimeError):
    """Richardson extrapolation did not settle."""


def _cpow(J, a):
    """Principal-branch J**a; Re(J) > 0 on the sphere for dilations, so the cut is never crossed."""
    return np.exp(a * np.log(J))


def _factor(J, a, b):
    return _cpow(J, a) * _cpow(np.conj(J), b)


@dataclass
class IntertwiningResult:
    delta: float
    residual: float
    relative_residual: float
    maxdeg: int
    tail: float

    def to_dict(self):
        return dict(self.__dict__)


def verify_intertwining(op: SpectralOperator, delta: float, f, grid, maxdeg: int = 30) -> IntertwiningResult:
    """max |J^{g-w} conj(J)^{g-w'} (A F) o tau - A(J^{-w} conj(J)^{-w'} F o tau)| on the grid.

    ``f`` is an exact polynomial; A F is computed exactly, the right side by
    numerical expansion up to ``maxdeg``.
    """
    if grid.sphere != "cr" or grid.n != op.n:
        raise ValueError("intertwining check needs a CR grid of matching dimension")
    g, w, wp = float(op.gamma), float(op.w), float(op.wprime)
    image, J = dilation(delta, grid.nodes)
    lhs = _factor(J, g - w, g - wp) * apply(op, f).evaluate(image)
    inner = _factor(J, -w, -wp) * f.evaluate(image)
    exp = numeric_expand(inner, grid, maxdeg)
    scaled = {jk: op.eigenvalue_float(*jk) * c for jk, c in exp.coeffs.items()}
    rhs = synthesize(scaled, grid)
    res = float(np.max(np.abs(lhs - rhs)))
    return IntertwiningResult(delta, res, res / float(np.max(np.abs(lhs))), maxdeg, exp.tail)


@dataclass
class DerivativeReport:
    n: int
    j: int
    k: int
    w: str
    wprime: str
    measured_A: complex
    measured_B: complex
    expected_A: float
    expected_B: float
    other_components: float
    details: dict = field(default_factory=dict)

    @property
    def error(self) -> float:
        return max(abs(self.measured_A - self.expected_A), abs(self.measured_B - self.expected_B))

    def passed(self, tol: float = 1e-6, other_tol: float = 1e-8) -> bool:
        return self.error < tol and self.other_components < other_tol

    def to_dict(self):
        return {
            "n": self.n, "j": self.j, "k": self.k, "w": self.w, "wprime": self.wprime,
            "measured_A": [self.measured_A.real, self.measured_A.imag],
            "measured_B": [self.measured_B.real, self.measured_B.imag],
            "expected_A": self.expected_A, "expected_B": self.expected_B,
            "error": self.error, "other_components": self.other_components,
        }


def appendix_coefficients(n: int, j: int, k: int, w, wprime):
    """A = (j - w)(j + 1)/(k + j + n), B = (k - w')(k + n)/(k + j + n)."""
    w, wprime = as_rational(w), as_rational(wprime)
    return (j - w) * (j + 1) / (k + j + n), (k - wprime) * (k + n) / (k + j + n)


def verify_dilation_derivative(n: int, j: int, k: int, w, wprime, grid, step: float = 1e-4,
                               richardson_tol: float = 1e-7) -> DerivativeReport:
    """Measure the H_{j+1,k} and H_{j,k+1} coefficients of d/d delta J^{-w} conj(J)^{-w'} Psi_{j,k} o tau_delta."""
    if j > k:
        raise ValueError("need j <= k")
    if n != 1 or grid.sphere != "cr":
        raise ValueError("the derivative check runs on the S^3 grid (n = 1)")
    wf, wpf = float(as_rational(w)), float(as_rational(wprime))
    pts = grid.nodes

    def G(delta):
        image, J = dilation(delta, pts)
        return _factor(J, -wf, -wpf) * zonal_psi(n, j, k, image[:, -1])

    def central(h):
        return (G(1 + h) - G(1 - h)) / (2 * h)

    d1, d2, d3 = central(step), central(step / 2), central(step / 4)
    r1, r2 = (4 * d2 - d1) / 3, (4 * d3 - d2) / 3
    drift = float(np.max(np.abs(r1 - r2)))
    if drift > richardson_tol:
        raise StepSizeError(f"Richardson estimates disagree by {drift:.2e}")
    deriv = r1

    z = pts[:, -1]
    psiA, psiB = zonal_psi(n, j + 1, k, z), zonal_psi(n, j, k + 1, z)
    cA = grid.mean(deriv * np.conj(psiA)) / grid.mean(np.abs(psiA) ** 2)
    cB = grid.mean(deriv * np.conj(psiB)) / grid.mean(np.abs(psiB) ** 2)

    exp = numeric_expand(deriv, grid, j + k + 1)
    energies = exp.energies()
    others = [energies[(a, j + k + 1 - a)] for a in range(j + k + 2) if a not in (j, j + 1)]
    other = float(np.sqrt(max(sum(others), 0.0)))
    # inside the two target spaces, the part orthogonal to the zonal direction
    off_zonal = max(
        energies[(j + 1, k)] - abs(cA) ** 2 * grid.mean(np.abs(psiA) ** 2).real,
        energies[(j, k + 1)] - abs(cB) ** 2 * grid.mean(np.abs(psiB) ** 2).real,
    )
    A, B = appendix_coefficients(n, j, k, w, wprime)
    return DerivativeReport(n, j, k, str(w), str(wprime), complex(cA), complex(cB), float(A), float(B),
                            other, {"richardson_drift": drift, "step": step, "off_zonal_energy": float(off_zonal)})
