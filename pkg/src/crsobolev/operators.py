"""Diagonal intertwining operators on harmonic expansions and the exact identities they satisfy.

CR operators A_{w,w'} act on H_{j,k} by lambda_j(w) lambda_k(w'), with
lambda_j(w) = Gamma(j + gamma - w) / Gamma(j - w); classical operators
P_{2 gamma} act on H_h by mu_h(2 gamma) = Gamma(h + n/2 + gamma) / Gamma(h + n/2 - gamma).
Eigenvalues are carried as :class:`ScaledValue`, so commutator identities are
checked in exact arithmetic.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .harmonics import ar95_decompose_cr, build_basis, build_basis_real, decompose_real
from .polyalg import COMPLEX, REAL, Poly, harmonic_decomposition, inner
from .scaled import ScaledExpansion, ScaledValue
from .specfun import PoleError, as_rational, gamma_ratio, normalized_lambda

CR = "cr"
CLASSICAL = "classical"


class ParameterError(ValueError):
    """Operator parameters violate the admissible range or constraint."""


def cr_lambda(j: int, gamma, w) -> ScaledValue:
    """lambda_j(w) = Gamma(j + gamma - w) / Gamma(j - w), exactly."""
    gamma, w = as_rational(gamma), as_rational(w)
    return ScaledValue.gamma_ratio(j + gamma - w, j - w)


def classical_mu(h: int, n: int, gamma) -> ScaledValue:
    """mu_h(2 gamma) = Gamma(h + n/2 + gamma) / Gamma(h + n/2 - gamma); mu_h(0) = 1."""
    gamma = as_rational(gamma)
    if gamma == 0:
        return ScaledValue(1)
    half = Fraction(n, 2)
    return ScaledValue.gamma_ratio(h + half + gamma, h + half - gamma)


@dataclass
class SpectralOperator:
    mode: str
    n: int
    gamma: Fraction
    w: Fraction | None = None
    wprime: Fraction | None = None
    # multiplicative perturbations of single eigenvalues, for negative controls
    mutation: dict = field(default_factory=dict)

    def eigenvalue_scaled(self, *index) -> ScaledValue:
        index = tuple(index)
        if self.mode == CR:
            j, k = index
            val = cr_lambda(j, self.gamma, self.w) * cr_lambda(k, self.gamma, self.wprime)
        else:
            (h,) = index
            val = classical_mu(h, self.n, self.gamma)
        if index in self.mutation:
            val = val * as_rational(self.mutation[index])
        return val

    def base_scale(self) -> ScaledValue:
        return self.eigenvalue_scaled(0, 0) if self.mode == CR else classical_mu(0, self.n, self.gamma)

    def eigenvalue_exact(self, *index) -> Fraction:
        """Eigenvalue divided by the (0, 0) or h = 0 eigenvalue."""
        if self.mode == CR:
            j, k = index
            val = normalized_lambda(j, self.gamma, self.w) * normalized_lambda(k, self.gamma, self.wprime)
        else:
            (h,) = index
            half = Fraction(self.n, 2)
            val = Fraction(1)
            for i in range(h):
                den = i + half - self.gamma
                if den == 0:
                    raise PoleError(f"mu_h ratio has a pole at i = {i}")
                val *= (i + half + self.gamma) / den
        if tuple(index) in self.mutation:
            val *= as_rational(self.mutation[tuple(index)])
        return val

    def eigenvalue_float(self, *index) -> float:
        index = tuple(index)
        try:
            if self.mode == CR:
                j, k = index
                g, w, wp = float(self.gamma), float(self.w), float(self.wprime)
                val = gamma_ratio(j + g - w, j - w) * gamma_ratio(k + g - wp, k - wp)
            else:
                (h,) = index
                half, g = self.n / 2, float(self.gamma)
                val = 1.0 if g == 0 else gamma_ratio(h + half + g, h + half - g)
        except ValueError:
            # nonpositive gamma arguments: fall back to the exact reduction
            return float(self.eigenvalue_scaled(*index))
        if index in self.mutation:
            val *= float(as_rational(self.mutation[index]))
        return val

    def mutated(self, index, factor) -> "SpectralOperator":
        mutation = dict(self.mutation)
        mutation[tuple(index)] = as_rational(factor)
        return SpectralOperator(self.mode, self.n, self.gamma, self.w, self.wprime, mutation)

    def describe(self) -> dict:
        d = {"mode": self.mode, "n": self.n, "gamma": str(self.gamma)}
        if self.mode == CR:
            d.update(w=str(self.w), wprime=str(self.wprime))
        return d


def make_cr_operator(n: int, gamma, w=None, wprime=None, check_range: bool = True) -> SpectralOperator:
    """A_{w,w'} on S^{2n+1}; w = w' = (gamma - n - 1)/2 when omitted."""
    gamma = as_rational(gamma)
    if w is None and wprime is None:
        w = wprime = (gamma - n - 1) / 2
    elif w is None or wprime is None:
        w = gamma - n - 1 - as_rational(wprime if w is None else w) if w is None else as_rational(w)
        wprime = gamma - n - 1 - w if wprime is None else as_rational(wprime)
    w, wprime = as_rational(w), as_rational(wprime)
    if w + wprime + n + 1 != gamma:
        raise ParameterError(f"need w + w' + n + 1 = gamma, got {w} + {wprime} + {n + 1} != {gamma}")
    if check_range and not 0 < gamma < n + 1:
        raise ParameterError(f"need 0 < gamma < n + 1, got gamma = {gamma}")
    return SpectralOperator(CR, n, gamma, w, wprime)


def make_classical_operator(n: int, gamma) -> SpectralOperator:
    """P_{2 gamma} on S^n. Negative orders give the inverse of P_{-2 gamma}."""
    return SpectralOperator(CLASSICAL, n, as_rational(gamma))


def apply(op: SpectralOperator, p) -> ScaledExpansion:
    """Diagonal action on the harmonic expansion of ``p`` (a Poly or ScaledExpansion)."""
    if isinstance(p, ScaledExpansion):
        out = ScaledExpansion()
        for m, part in p.parts.items():
            out = out + apply(op, part).times_value(ScaledValue(1, m))
        return out
    out = ScaledExpansion()
    for grade, comp in harmonic_decomposition(p).items():
        out = out + ScaledExpansion.from_poly(comp, op.eigenvalue_scaled(*grade))
    return out


def lowered_cr_operator(op: SpectralOperator) -> SpectralOperator:
    """A_{w-1,w'}: order gamma - 1, same w'."""
    return SpectralOperator(CR, op.n, op.gamma - 1, op.w - 1, op.wprime)


def cr_commutator_lhs(op: SpectralOperator, Y: Poly) -> ScaledExpansion:
    """sum_l conj(z_l) [A, z_l] Y, reduced to the sphere."""
    j, k = next(iter(Y.homogeneous_parts()))
    m = op.n + 1
    AY = op.eigenvalue_scaled(j, k)
    total = ScaledExpansion()
    for l in range(m):
        h_plus, h_minus = ar95_decompose_cr(l, Y, op.n)
        A_zY = ScaledExpansion.from_poly(h_plus, op.eigenvalue_scaled(j + 1, k))
        if not h_minus.is_zero():
            A_zY = A_zY + ScaledExpansion.from_poly(h_minus, op.eigenvalue_scaled(j, k - 1))
        z_AY = ScaledExpansion.from_poly(Poly.z(l, m) * Y, AY)
        total = total + (A_zY - z_AY).times_poly(Poly.zbar(l, m))
    return total.reduced()


def cr_commutator_rhs(op: SpectralOperator, Y: Poly) -> ScaledExpansion:
    """gamma (gamma - 1 - w') A_{w-1,w'} Y."""
    coeff = op.gamma * (op.gamma - 1 - op.wprime)
    return apply(lowered_cr_operator(op), Y).times_value(ScaledValue(coeff))


@dataclass
class CaseResult:
    index: tuple
    element: int
    passed: bool
    lhs: str
    rhs: str

    def to_dict(self):
        return {"index": list(self.index), "element": self.element, "passed": self.passed,
                "lhs": self.lhs, "rhs": self.rhs}


@dataclass
class VerificationReport:
    kind: str
    parameters: dict
    cases: list
    notes: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def failures(self):
        return [c for c in self.cases if not c.passed]

    def to_dict(self):
        return {"kind": self.kind, "parameters": self.parameters, "passed": self.passed,
                "n_cases": len(self.cases), "cases": [c.to_dict() for c in self.cases],
                "notes": list(self.notes)}


def _check_integral_difference(w, wprime):
    if (w - wprime).denominator != 1:
        raise ParameterError(f"w - w' must be an integer, got {w - wprime}")


def verify_cr_commutator(n: int, gamma, w=None, wprime=None, jmax: int = 3, kmax: int = 3,
                         total_max: int | None = None, op: SpectralOperator | None = None,
                         keep_passing_text: bool = False) -> VerificationReport:
    """Check sum_l conj(z_l)[A_{w,w'}, z_l] = gamma (gamma - 1 - w') A_{w-1,w'} on every basis element."""
    start = time.perf_counter()
    if op is None:
        op = make_cr_operator(n, gamma, w, wprime)
    _check_integral_difference(op.w, op.wprime)
    cases = []
    for j in range(jmax + 1):
        for k in range(kmax + 1):
            if total_max is not None and j + k > total_max:
                continue
            for idx, Y in enumerate(build_basis(n, j, k).elements):
                lhs = cr_commutator_lhs(op, Y)
                rhs = cr_commutator_rhs(op, Y)
                ok = lhs == rhs
                show = keep_passing_text or not ok
                cases.append(CaseResult((j, k), idx, ok, lhs.to_text() if show else "",
                                        rhs.to_text() if show else ""))
    return VerificationReport("cr-commutator", op.describe(), cases, elapsed=time.perf_counter() - start)


def classical_commutator_lhs(op: SpectralOperator, Y: Poly) -> ScaledExpansion:
    """sum_j x_j [P_{2 gamma}, x_j] Y, reduced to the sphere."""
    (h,) = next(iter(Y.homogeneous_parts()))
    m = op.n + 1
    PY = op.eigenvalue_scaled(h)
    total = ScaledExpansion()
    for jc in range(m):
        plus, minus = decompose_real(jc, Y, op.n)
        P_xY = ScaledExpansion.from_poly(plus, op.eigenvalue_scaled(h + 1))
        if not minus.is_zero():
            P_xY = P_xY + ScaledExpansion.from_poly(minus, op.eigenvalue_scaled(h - 1))
        x = Poly.x(jc, m)
        total = total + (P_xY - ScaledExpansion.from_poly(x * Y, PY)).times_poly(x)
    return total.reduced()


def classical_commutator_rhs(op: SpectralOperator, Y: Poly) -> ScaledExpansion:
    """gamma (n + 2 gamma - 2) P_{2(gamma - 1)} Y."""
    lowered = make_classical_operator(op.n, op.gamma - 1)
    return apply(lowered, Y).times_value(ScaledValue(op.gamma * (op.n + 2 * op.gamma - 2)))


def verify_classical_commutator(n: int, gamma, hmax: int = 4, op: SpectralOperator | None = None,
                                coefficient=None) -> VerificationReport:
    """Exact check of sum_j x_j [P_{2 gamma}, x_j] = gamma (n + 2 gamma - 2) P_{2(gamma-1)}.

    ``coefficient`` overrides gamma (n + 2 gamma - 2) (negative controls).
    """
    start = time.perf_counter()
    if n < 2:
        raise ParameterError("classical commutator check needs n >= 2")
    op = make_classical_operator(n, gamma) if op is None else op
    cases = []
    for h in range(hmax + 1):
        for idx, Y in enumerate(build_basis_real(n, h).elements):
            lhs = classical_commutator_lhs(op, Y)
            if coefficient is None:
                rhs = classical_commutator_rhs(op, Y)
            else:
                lowered = make_classical_operator(n, op.gamma - 1)
                rhs = apply(lowered, Y).times_value(ScaledValue(as_rational(coefficient)))
            ok = lhs == rhs
            cases.append(CaseResult((h,), idx, ok, "" if ok else lhs.to_text(), "" if ok else rhs.to_text()))
    notes = []
    if op.gamma == 1:
        notes.append("P_0 taken as the identity (mu_h(0) = 1)")
    elif op.gamma < 1:
        notes.append("P_{2(gamma-1)} is the inverse of P_{2(1-gamma)}")
    return VerificationReport("classical-commutator", op.describe(), cases, notes,
                              elapsed=time.perf_counter() - start)


# -- positivity ------------------------------------------------------------------

def cr_positivity_eigenvalue(n: int, gamma, j: int, k: int) -> Fraction:
    """Eigenvalue of (p - 2) A_{2 gamma} - gamma (gamma - 1 - w) A_{w-1,w} in units of lambda_j(w) lambda_k(w)."""
    g = as_rational(gamma)
    return 2 * g / (n + 1 - g) - g * (n + g - 1) / 2 / ((j + (n + 1 - g) / 2) * (k + (n + g - 1) / 2))


def positivity_scan_cr(n: int, gamma, jmax: int = 50, kmax: int = 50, cross_check: bool = True):
    """List of (j, k, eigenvalue); optionally cross-checked against the operator spectra."""
    g = as_rational(gamma)
    if not 0 < g < n + 1:
        raise ParameterError("need 0 < gamma < n + 1")
    op = make_cr_operator(n, g)
    lowered = lowered_cr_operator(op)
    Q = 2 * n + 2
    p_minus_2 = 2 * Q / (Q - 2 * g) - 2
    coeff = g * (g - 1 - op.w)
    out = []
    for j in range(jmax + 1):
        for k in range(kmax + 1):
            e = cr_positivity_eigenvalue(n, g, j, k)
            if cross_check and j + k <= 12:
                base = op.eigenvalue_scaled(j, k)
                full = base * p_minus_2 - lowered.eigenvalue_scaled(j, k) * coeff
                if full != base * e:
                    raise AssertionError(f"positivity eigenvalue formula disagrees with the spectra at {(j, k)}")
            out.append((j, k, e))
    return out


def positivity_scan_classical(n: int, gamma, hmax: int = 50):
    """List of (h, value); checks (p-2) mu_h(2g) - g(n+2g-2) mu_h(2g-2) = 4g/(n-2g) h(h+n-1) mu_h(2g-2).

    ``value`` is the right side in units of mu_h(2(gamma - 1)).
    """
    g = as_rational(gamma)
    if not 0 < g < Fraction(n, 2):
        raise ParameterError("need 0 < gamma < n/2")
    p_minus_2 = 2 * Fraction(n) / (n - 2 * g) - 2
    out = []
    for h in range(hmax + 1):
        mu = classical_mu(h, n, g)
        mu_low = classical_mu(h, n, g - 1)
        factor = 4 * g / (n - 2 * g) * h * (h + n - 1)
        left = mu * p_minus_2 - mu_low * (g * (n + 2 * g - 2))
        right = mu_low * factor
        if left != right:
            raise AssertionError(f"classical identity fails at h = {h}: {left} != {right}")
        out.append((h, factor))
    return out


def sobolev_norm_sq(p: Poly, gamma, n: int | None = None, total_mass: float = 1.0):
    """sum over components of ((j + n/2)(k + n/2))^gamma times the squared component norm.

    Exact (Fraction) for integer gamma and unit total mass, float otherwise.
    """
    n = p.nvars - 1 if n is None else n
    g = as_rational(gamma)
    exact = g.denominator == 1 and total_mass == 1
    total = Fraction(0) if exact else 0.0
    for (j, k), comp in harmonic_decomposition(p).items():
        ev = (j + Fraction(n, 2)) * (k + Fraction(n, 2))
        norm = inner(comp, comp)
        if exact:
            total += ev ** int(g) * norm
        else:
            total += math.exp(float(g) * math.log(ev)) * float(norm) * total_mass
    return total
