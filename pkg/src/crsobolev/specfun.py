"""Special functions behind the sphere spectra.

Floating evaluators (log-gamma, gamma ratios, Jacobi polynomials) plus the
exact rational eigenvalue ratios used by the symbolic layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class PoleError(ZeroDivisionError):
    """A gamma-function pole was hit in an exact or floating evaluation."""


# zeta(k) - 1 for k = 2..41; coefficients of the Taylor series of
# log Gamma(2 + t) = (1 - euler_gamma) t + sum_k (-1)^k (zeta(k) - 1) t^k / k
_ZETA_MINUS_ONE = (
    0.6449340668482264, 0.2020569031595943, 0.08232323371113819,
    0.03692775514336993, 0.01734306198444914, 0.008349277381922827,
    0.00407735619794434, 0.0020083928260822143, 0.0009945751278180853,
    0.0004941886041194645, 0.0002460865533080483, 0.00012271334757848915,
    6.124813505870483e-05, 3.058823630702049e-05, 1.528225940865187e-05,
    7.637197637899763e-06, 3.81729326499984e-06, 1.908212716553939e-06,
    9.539620338727962e-07, 4.769329867878064e-07, 2.38450502727733e-07,
    1.1921992596531106e-07, 5.960818905125948e-08, 2.980350351465228e-08,
    1.4901554828365043e-08, 7.45071178983543e-09, 3.725334024788457e-09,
    1.862659723513049e-09, 9.313274324196682e-10, 4.656629065033784e-10,
    2.3283118336765053e-10, 1.164155017270052e-10, 5.820772087902701e-11,
    2.9103850444971e-11, 1.4551921891041985e-11, 7.275959835057482e-12,
    3.637979547378651e-12, 1.818989650307066e-12, 9.094947840263888e-13,
    4.547473783042154e-13,
)
_EULER_GAMMA = 0.5772156649015329
_HALF_LOG_2PI = 0.9189385332046728
# B_{2m} / (2m (2m - 1)), m = 1..8
_STIRLING = (
    1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0,
    -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0,
)
_STIRLING_CUTOFF = 10.0


def _lgamma_two_plus(t: float) -> float:
    # valid for |t| <= 0.5; no constant term, so relative accuracy survives t -> 0
    acc = 0.0
    power = -t
    for k, c in enumerate(_ZETA_MINUS_ONE, start=2):
        power *= -t
        term = c * power / k
        acc += term
        if abs(term) < 1e-18 * abs(acc):
            break
    return (1.0 - _EULER_GAMMA) * t + acc


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for real x > 0.

    Relative error is below 1e-13 on [1e-3, 1e3]: a Taylor series about 2
    handles [0, 2.5] (shifted by the recurrence, with the shift kept exact so
    the zeros at 1 and 2 are resolved), and the Stirling series takes over
    from 10 upwards.
    """
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"log_gamma requires finite x > 0, got {x!r}")
    if x >= _STIRLING_CUTOFF:
        inv = 1.0 / x
        inv2 = inv * inv
        series = 0.0
        power = inv
        for c in _STIRLING:
            series += c * power
            power *= inv2
        return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + series
    if x < 0.5:
        return _lgamma_two_plus(x) - math.log(x) - math.log1p(x)
    if x < 1.5:
        return _lgamma_two_plus(x - 1.0) - math.log(x)
    acc = 0.0
    while x > 2.5:
        x -= 1.0
        acc += math.log(x)
    return acc + _lgamma_two_plus(x - 2.0)


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a) / Gamma(b) for positive a, b."""
    if not (a > 0 and b > 0):
        raise DomainError(f"gamma_ratio needs positive arguments, got ({a}, {b})")
    return math.exp(log_gamma(a) - log_gamma(b))


@dataclass(frozen=True)
class JacobiParams:
    degree: int
    alpha: float
    beta: float

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("Jacobi degree must be nonnegative")


def jacobi_eval(params: JacobiParams, x):
    """Evaluate P_j^(alpha, beta) at ``x`` (scalar or array) by forward recurrence."""
    j, a, b = params.degree, params.alpha, params.beta
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if j == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0
    for m in range(2, j + 1):
        s = 2 * m + a + b
        c1 = 2 * m * (m + a + b) * (s - 2)
        c2 = (s - 1) * (s * (s - 2) * x + a * a - b * b)
        c3 = 2 * (m + a - 1) * (m + b - 1) * s
        p_prev, p = p, (c2 * p - c3 * p_prev) / c1
    return p if p.ndim else float(p)


def jacobi_leading_coefficient(params: JacobiParams) -> float:
    """Coefficient of x^j in P_j^(alpha, beta)."""
    j, a, b = params.degree, params.alpha, params.beta
    return math.exp(
        log_gamma(2 * j + a + b + 1) - log_gamma(j + a + b + 1) - j * math.log(2.0) - log_gamma(j + 1)
    )


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions, and "p/q" strings to an exact Fraction; floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"exact layer needs a rational, got {type(value).__name__} {value!r}")


def normalized_lambda(j: int, gamma, w) -> Fraction:
    """lambda_j(w) / lambda_0(w) = prod_{i<j} (i + gamma - w) / (i - w), exactly."""
    gamma, w = as_rational(gamma), as_rational(w)
    out = Fraction(1)
    for i in range(j):
        den = i - w
        if den == 0:
            raise PoleError(f"lambda_j(w) / lambda_0(w) has a pole: factor {i} - w vanishes (w = {w})")
        out *= (i + gamma - w) / den
    return out
