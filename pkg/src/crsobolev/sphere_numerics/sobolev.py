"""Sharp Sobolev constants, extremal functions and Sobolev quotients on S^3 / S^n."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..config import cr_total_mass, euclidean_sphere_area
from ..specfun import gamma_ratio
from .expansion import numeric_expand

TRUNCATION_TOL = 1e-12


def sharp_constant_cr(n: int, gamma: float) -> float:
    """C_{n,2 gamma} = (4 pi)^{-gamma} Gamma^2((n+1-gamma)/2) / Gamma^2((n+1+gamma)/2)."""
    if not 0 < gamma < n + 1:
        raise ValueError("need 0 < gamma < n + 1")
    return (4 * math.pi) ** (-gamma) * gamma_ratio((n + 1 - gamma) / 2, (n + 1 + gamma) / 2) ** 2


def sharp_constant_classical(n: int, gamma: float) -> float:
    """Gamma((n + 2 gamma)/2) / Gamma((n - 2 gamma)/2) * omega_n^{2 gamma / n} (lower bound of the quotient)."""
    if not 0 < gamma < n / 2:
        raise ValueError("need 0 < gamma < n/2")
    return gamma_ratio((n + 2 * gamma) / 2, (n - 2 * gamma) / 2) * euclidean_sphere_area(n) ** (2 * gamma / n)


def cr_exponent(n: int, gamma: float) -> float:
    Q = 2 * n + 2
    return 2 * Q / (Q - 2 * gamma)


def classical_exponent(n: int, gamma: float) -> float:
    return 2 * n / (n - 2 * gamma)


def cr_lambda_float(j: int, n: int, gamma: float) -> float:
    w = (gamma - n - 1) / 2
    return gamma_ratio(j + gamma - w, j - w)


def classical_mu_float(h: int, n: int, gamma: float) -> float:
    return gamma_ratio(h + n / 2 + gamma, h + n / 2 - gamma)


def calibrate_cr_total_mass(n: int, gamma: float) -> float:
    """Total mass omega making the F = 1 quotient equal 1 / C_{n,2 gamma}.

    lambda_0^2 omega^{1 - 2/p} = 1/C with 1 - 2/p = gamma/(n+1).
    """
    lam0 = cr_lambda_float(0, n, gamma)
    return math.exp(-(n + 1) / gamma * math.log(lam0**2 * sharp_constant_cr(n, gamma)))


@dataclass
class ExtremalFunction:
    """C |1 - xi . conj(eta)|^{-(Q - 2 gamma)/2} (CR) or C |1 - <eta, xi>|^{(2 gamma - n)/2} (classical).

    C normalizes the integral of |F|^p over the sphere to 1.
    """
    xi: np.ndarray
    gamma: float
    n: int
    kind: str = "cr"
    total_mass: float | None = None

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=complex if self.kind == "cr" else float)
        r2 = float(np.sum(np.abs(self.xi) ** 2))
        if r2 >= 1:
            raise ValueError("|xi| must be < 1")
        if self.kind == "cr":
            mass = cr_total_mass(self.n) if self.total_mass is None else self.total_mass
            p = cr_exponent(self.n, self.gamma)
            # mean of |1 - xi . conj(eta)|^{-Q} is (1 - |xi|^2)^{-(n+1)}
            self.constant = (mass * (1 - r2) ** (-(self.n + 1))) ** (-1 / p)
        else:
            mass = euclidean_sphere_area(self.n) if self.total_mass is None else self.total_mass
            p = classical_exponent(self.n, self.gamma)
            # mean of |1 - <eta, xi>|^{-n} is (1 - |xi|^2)^{-n/2}
            self.constant = (mass * (1 - r2) ** (-self.n / 2)) ** (-1 / p)

    def __call__(self, points):
        return extremal_eval(self, points)


def extremal_eval(f: ExtremalFunction, points):
    pts = np.asarray(points)
    if f.kind == "cr":
        t = pts @ np.conj(f.xi)
        return f.constant * np.abs(1 - t) ** (-(2 * f.n + 2 - 2 * f.gamma) / 2)
    t = pts @ f.xi
    return f.constant * np.abs(1 - t) ** ((2 * f.gamma - f.n) / 2)


@dataclass
class QuotientResult:
    value: float
    target: float
    maxdeg: int
    tail: float

    @property
    def relative_error(self) -> float:
        return abs(self.value - self.target) / self.target

    @property
    def truncated(self) -> bool:
        """True when the Parseval tail is too large for the numerator to be trusted."""
        return self.tail > TRUNCATION_TOL

    def to_dict(self):
        return {"value": self.value, "target": self.target, "maxdeg": self.maxdeg,
                "relative_error": self.relative_error, "parseval_tail": self.tail,
                "truncated": self.truncated}


def sobolev_quotient_cr(f, gamma: float, grid, maxdeg: int) -> QuotientResult:
    """(int conj(F) A_{2 gamma} F) / (int |F|^p)^{2/p} on S^3, against 1/C_{1,2 gamma}."""
    n = grid.n
    values = f(grid.nodes) if callable(f) else np.asarray(f)
    exp = numeric_expand(values, grid, maxdeg)
    lam = [cr_lambda_float(d, n, gamma) for d in range(maxdeg + 1)]
    num = grid.total_mass * sum(lam[j] * lam[k] * e for (j, k), e in exp.energies().items())
    p = cr_exponent(n, gamma)
    den = float(grid.integrate(np.abs(values) ** p).real) ** (2 / p)
    return QuotientResult(num / den, 1 / sharp_constant_cr(n, gamma), maxdeg, exp.tail)


def sobolev_quotient_classical(f, gamma: float, grid, maxdeg: int) -> QuotientResult:
    """(int F P_{2 gamma} F) / (int |F|^p)^{2/p} on S^n, against the Beckner constant."""
    n = grid.n
    values = f(grid.nodes) if callable(f) else np.asarray(f)
    exp = numeric_expand(values, grid, maxdeg)
    mu = [classical_mu_float(h, n, gamma) for h in range(maxdeg + 1)]
    num = grid.total_mass * sum(mu[g[0]] * e for g, e in exp.energies().items())
    p = classical_exponent(n, gamma)
    den = float(grid.integrate(np.abs(values) ** p).real) ** (2 / p)
    return QuotientResult(num / den, sharp_constant_classical(n, gamma), maxdeg, exp.tail)


def quotient_grid_orders(maxdeg: int, margin: int = 12) -> tuple:
    """Hopf grid orders (M, K) suited to smooth, non-polynomial integrands up to ``maxdeg``."""
    return (maxdeg + margin + 8, 2 * maxdeg + 2 * margin)

