"""Exact sums of power terms c * x**a with rational coefficients and exponents.

These carry all warped-metric data (warping factors, adjoint rescaling
functions, Sturm-Liouville weights and potentials, deformation terms) with
no floating-point drift; floats appear only when a solver evaluates them.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

import numpy as np

Rational = Union[int, Fraction]


def _frac(value) -> Fraction:
    """Coerce ints/Fractions/floats to Fraction (floats converted exactly)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


class PowerFunction:
    """Finite sum  sum_i c_i * x**a_i  on (0, x_max], c_i and a_i rational.

    Terms are normalized: exponents strictly decreasing, zero coefficients
    dropped.  Instances are immutable and hashable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[tuple] = ()):
        merged: dict[Fraction, Fraction] = {}
        for coeff, expo in terms:
            c, a = _frac(coeff), _frac(expo)
            if c == 0:
                continue
            merged[a] = merged.get(a, Fraction(0)) + c
        cleaned = [(c, a) for a, c in merged.items() if c != 0]
        cleaned.sort(key=lambda t: t[1], reverse=True)
        object.__setattr__(self, "terms", tuple(cleaned))

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("PowerFunction is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def monomial(cls, coeff: Rational, exponent: Rational) -> "PowerFunction":
        return cls([(coeff, exponent)])

    @classmethod
    def constant(cls, coeff: Rational) -> "PowerFunction":
        return cls([(coeff, 0)])

    @classmethod
    def zero(cls) -> "PowerFunction":
        return cls()

    @classmethod
    def one(cls) -> "PowerFunction":
        return cls([(1, 0)])

    # -- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_single_term(self) -> bool:
        return len(self.terms) == 1

    @property
    def coefficient(self) -> Fraction:
        """Coefficient of a single-term function."""
        if not self.is_single_term():
            raise ValueError(f"{self} is not a single term")
        return self.terms[0][0]

    @property
    def exponent(self) -> Fraction:
        """Exponent of a single-term function."""
        if not self.is_single_term():
            raise ValueError(f"{self} is not a single term")
        return self.terms[0][1]

    def coefficient_of(self, exponent: Rational) -> Fraction:
        a = _frac(exponent)
        for c, e in self.terms:
            if e == a:
                return c
        return Fraction(0)

    def min_exponent(self) -> Fraction:
        """Most singular exponent (the last term); 0 for the zero function."""
        if not self.terms:
            return Fraction(0)
        return self.terms[-1][1]

    # -- algebra --------------------------------------------------------

    def __add__(self, other: "PowerFunction") -> "PowerFunction":
        if not isinstance(other, PowerFunction):
            return NotImplemented
        return PowerFunction(self.terms + other.terms)

    def __sub__(self, other: "PowerFunction") -> "PowerFunction":
        return self + (-other)

    def __neg__(self) -> "PowerFunction":
        return PowerFunction([(-c, a) for c, a in self.terms])

    def __mul__(self, other) -> "PowerFunction":
        if isinstance(other, PowerFunction):
            return PowerFunction(
                [(c1 * c2, a1 + a2) for c1, a1 in self.terms for c2, a2 in other.terms]
            )
        return PowerFunction([(c * _frac(other), a) for c, a in self.terms])

    __rmul__ = __mul__

    def __pow__(self, n: Rational) -> "PowerFunction":
        k = _frac(n)
        if k.denominator == 1 and k >= 0 and not self.is_single_term():
            result = PowerFunction.one()
            for _ in range(int(k)):
                result = result * self
            return result
        c, a = self.terms[0] if self.is_single_term() else (None, None)
        if c is None:
            raise ValueError("fractional/negative powers need a single term")
        if k.denominator != 1 and c != 1:
            # rational root of the coefficient only when it is exact
            root = _rational_root(c, k.denominator)
            return PowerFunction.monomial(root ** k.numerator, a * k)
        return PowerFunction.monomial(c ** k if k.denominator == 1 else c, a * k)

    def reciprocal(self) -> "PowerFunction":
        """1/f, defined for single-term functions."""
        c, a = self.terms[0] if self.is_single_term() else (None, None)
        if c is None:
            raise ValueError("reciprocal requires a single-term PowerFunction")
        return PowerFunction.monomial(Fraction(1) / c, -a)

    def derivative(self) -> "PowerFunction":
        return PowerFunction([(c * a, a - 1) for c, a in self.terms])

    # -- evaluation -----------------------------------------------------

    def __call__(self, x):
        """Evaluate at a float or numpy array of positive abscissae."""
        if isinstance(x, np.ndarray):
            out = np.zeros_like(x, dtype=float)
            for c, a in self.terms:
                out += float(c) * x ** float(a)
            return out
        return sum(float(c) * float(x) ** float(a) for c, a in self.terms)

    def eval_exact(self, x: Rational) -> Fraction:
        """Exact evaluation at a rational point; exponents must be integers."""
        xq = _frac(x)
        total = Fraction(0)
        for c, a in self.terms:
            if a.denominator != 1:
                raise ValueError("exact evaluation needs integer exponents")
            total += c * xq ** a.numerator
        return total

    # -- comparisons / dunder -------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, PowerFunction) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"

        def one_term(c, a):
            if a == 0:
                return f"{c}"
            xs = "x" if a == 1 else f"x^{a}"
            if c == 1:
                return xs
            if c == -1:
                return f"-{xs}"
            return f"{c}*{xs}"

        return " + ".join(one_term(c, a) for c, a in self.terms).replace("+ -", "- ")


def _rational_root(value: Fraction, n: int) -> Fraction:
    """Exact n-th root of a positive rational, or raise if inexact."""
    if value <= 0:
        raise ValueError("root of non-positive coefficient")

    def iroot(k: int) -> int:
        r = round(k ** (1.0 / n))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** n == k:
                return cand
        raise ValueError(f"{k} has no exact integer {n}-th root")

    return Fraction(iroot(value.numerator), iroot(value.denominator))
