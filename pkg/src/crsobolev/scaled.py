"""Exact values of the form (rational) x prod Gamma(f)^e, f in (0, 1).

Every Gamma value at a rational argument is reduced to this canonical shape by
Gamma(x + 1) = x Gamma(x): integer shifts become Pochhammer factors,
Gamma at positive integers becomes a factorial, and 1/Gamma at a
nonpositive integer is 0. Spectra of the intertwining operators share one
monomial per operator, so identities between them reduce to rational algebra.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .polyalg import Poly, harmonic_decomposition
from .specfun import PoleError, as_rational, log_gamma

_EMPTY = ()


def _merge(a, b, sign=1):
    acc = dict(a)
    for f, e in b:
        acc[f] = acc.get(f, 0) + sign * e
    return tuple(sorted((f, e) for f, e in acc.items() if e))


class ScaledValue:
    """``coeff * prod Gamma(f)**e`` with the product kept symbolic."""

    __slots__ = ("coeff", "mono")

    def __init__(self, coeff=0, mono=_EMPTY):
        self.coeff = Fraction(coeff)
        self.mono = tuple(mono) if self.coeff else _EMPTY

    @classmethod
    def gamma(cls, x, power: int = 1) -> "ScaledValue":
        """Gamma(x)**power for rational x; negative powers give 1/Gamma (zero at poles)."""
        x = as_rational(x)
        if power == 0:
            return cls(1)
        fl = math.floor(x)
        f = x - fl
        if f == 0:
            if x <= 0:
                if power > 0:
                    raise PoleError(f"Gamma has a pole at {x}")
                return cls(0)
            return cls(Fraction(math.factorial(int(x) - 1)) ** power)
        # Gamma(f + m) = Gamma(f) * prod_{i<m} (f + i), or divided for m < 0
        m = int(fl)
        shift = Fraction(1)
        if m >= 0:
            for i in range(m):
                shift *= f + i
        else:
            for i in range(m, 0):
                shift /= f + i
        return cls(shift ** power, ((f, power),))

    @classmethod
    def gamma_ratio(cls, a, b) -> "ScaledValue":
        """Gamma(a) / Gamma(b)."""
        inv = cls.gamma(b, -1)
        if not inv.coeff:
            return inv
        return cls.gamma(a) * inv

    def is_zero(self) -> bool:
        return self.coeff == 0

    def __mul__(self, other):
        if not isinstance(other, ScaledValue):
            return ScaledValue(self.coeff * as_rational(other), self.mono)
        if not (self.coeff and other.coeff):
            return ScaledValue(0)
        return ScaledValue(self.coeff * other.coeff, _merge(self.mono, other.mono))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ScaledValue):
            return ScaledValue(self.coeff / as_rational(other), self.mono)
        if not other.coeff:
            raise ZeroDivisionError("division by a zero scaled value")
        return ScaledValue(self.coeff / other.coeff, _merge(self.mono, other.mono, -1))

    def __add__(self, other):
        if not isinstance(other, ScaledValue):
            other = ScaledValue(as_rational(other))
        if not other.coeff:
            return self
        if not self.coeff:
            return other
        if self.mono != other.mono:
            raise ValueError("cannot add values with different gamma monomials")
        return ScaledValue(self.coeff + other.coeff, self.mono)

    def __neg__(self):
        return ScaledValue(-self.coeff, self.mono)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, ScaledValue):
            try:
                other = ScaledValue(as_rational(other))
            except TypeError:
                return NotImplemented
        return self.coeff == other.coeff and self.mono == other.mono

    def __hash__(self):
        return hash((self.coeff, self.mono))

    def __float__(self):
        if not self.coeff:
            return 0.0
        log_mono = sum(e * log_gamma(float(f)) for f, e in self.mono)
        return float(self.coeff) * math.exp(log_mono)

    def __repr__(self):
        return f"ScaledValue({self.to_text()})"

    def to_text(self) -> str:
        parts = [str(self.coeff)]
        parts += [f"Gamma({f})^{e}" for f, e in self.mono]
        return "*".join(parts)


class ScaledExpansion:
    """Sum over gamma monomials of rational polynomials: sum_m Gamma_m * P_m."""

    __slots__ = ("parts",)

    def __init__(self, parts=None):
        self.parts = {m: p for m, p in (parts or {}).items() if not p.is_zero()}

    @classmethod
    def from_poly(cls, p: Poly, value: ScaledValue | None = None):
        value = ScaledValue(1) if value is None else value
        if value.is_zero():
            return cls()
        return cls({value.mono: p.scale(value.coeff)})

    def __add__(self, other: "ScaledExpansion"):
        parts = dict(self.parts)
        for m, p in other.parts.items():
            parts[m] = parts[m] + p if m in parts else p
        return ScaledExpansion(parts)

    def __neg__(self):
        return ScaledExpansion({m: -p for m, p in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def times_poly(self, q: Poly):
        return ScaledExpansion({m: p * q for m, p in self.parts.items()})

    def times_value(self, v: ScaledValue):
        if v.is_zero():
            return ScaledExpansion()
        return ScaledExpansion({_merge(m, v.mono): p.scale(v.coeff) for m, p in self.parts.items()})

    def reduced(self):
        """Canonical on-sphere form: each part replaced by its summed harmonic expansion."""
        out = {}
        for m, p in self.parts.items():
            comps = harmonic_decomposition(p)
            total = None
            for c in comps.values():
                total = c if total is None else total + c
            if total is not None:
                out[m] = total
        return ScaledExpansion(out)

    def components(self):
        """{grade: ScaledExpansion} of harmonic components."""
        out = {}
        for m, p in self.parts.items():
            for g, c in harmonic_decomposition(p).items():
                out.setdefault(g, {})[m] = c
        return {g: ScaledExpansion(v) for g, v in out.items()}

    def is_zero(self) -> bool:
        return not self.parts

    def __eq__(self, other):
        if not isinstance(other, ScaledExpansion):
            return NotImplemented
        return self.parts == other.parts

    def evaluate(self, points):
        total = 0
        for m, p in self.parts.items():
            total = total + float(ScaledValue(1, m)) * p.evaluate(points)
        return total

    def to_text(self) -> str:
        if not self.parts:
            return "0"
        chunks = []
        for m in sorted(self.parts):
            tag = "*".join(f"Gamma({f})^{e}" for f, e in m) or "1"
            chunks.append(f"[{tag}] ({self.parts[m].to_text()})")
        return " + ".join(chunks)

    def __repr__(self):
        return f"ScaledExpansion({self.to_text()})"
