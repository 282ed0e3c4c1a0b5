"""Exact rational characters in w = lambda^(1/m), and renormalized traces.

A Character is w^shift * N(w)/D(w) with rational coefficients, D(0) = 1 and
gcd(N, D) = 1; m is kept minimal for the exponents present.  Geometric
tails of harmonic bases sum to these closed forms, and the worked fixed
point identities (chi_y combinations, two-point sphere sums, eta pairs)
hold exactly in this ring.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from scipy.integrate import quad

from .cohomology import AdmissibleKind, CohomologyBasis
from .power import _frac


class PoleError(ArithmeticError):
    """Evaluation hit a zero of the denominator."""


class SusyPairingError(ValueError):
    """Co-exact/exact eigenvalue multisets failed to pair."""


# -- dense polynomial helpers (coefficient lists, index = power of w) -------


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _padd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    n = max(len(a), len(b))
    return _trim(
        [
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
            for i in range(n)
        ]
    )


def _pmul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _trim(out)


def _pdivmod(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv = Fraction(1) / b[-1]
    for i in range(len(a) - len(b), -1, -1):
        coeff = a[i + len(b) - 1] * inv
        q[i] = coeff
        if coeff:
            for j, bj in enumerate(b):
                a[i + j] -= coeff * bj
    return _trim(q), _trim(a)


def _pgcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    a, b = list(a), list(b)
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _pstretch(p: Sequence[Fraction], k: int) -> list:
    """p(w) -> p(w^k)."""
    if k == 1:
        return list(p)
    out = [Fraction(0)] * ((len(p) - 1) * k + 1) if p else []
    for i, c in enumerate(p):
        out[i * k] = c
    return out


def _peval(p: Sequence[Fraction], z: complex) -> complex:
    out = 0j
    for c in reversed(p):
        out = out * z + complex(c)
    return out


@dataclass(frozen=True)
class Character:
    """w^shift * num(w) / den(w) with w = lambda^(1/root_order)."""

    root_order: int
    numerator: tuple
    denominator: tuple
    shift: int

    @classmethod
    def _make(cls, m: int, num: list, den: list, shift: int) -> "Character":
        num, den = _trim(list(num)), _trim(list(den))
        if not den:
            raise ZeroDivisionError("character denominator is zero")
        if not num:
            return cls(1, (Fraction(0),), (Fraction(1),), 0)
        # factor pure powers of w into the shift
        t_num = next(i for i, c in enumerate(num) if c != 0)
        t_den = next(i for i, c in enumerate(den) if c != 0)
        num, den = num[t_num:], den[t_den:]
        shift += t_num - t_den
        g = _pgcd(num, den)
        if len(g) > 1:
            num, _ = _pdivmod(num, g)
            den, _ = _pdivmod(den, g)
        scale = den[0]
        num = [c / scale for c in num]
        den = [c / scale for c in den]
        # minimal root order: exponents used are shift + i (num), j (den)
        support = {i for i, c in enumerate(num) if c != 0}
        support |= {j for j, c in enumerate(den) if c != 0}
        support |= {abs(shift)} if shift else set()
        g_all = 0
        for v in support:
            g_all = math.gcd(g_all, v)
        g_all = math.gcd(g_all, m) if g_all else m
        if g_all > 1 and m % g_all == 0 and shift % g_all == 0:
            ok = all(
                c == 0 or i % g_all == 0
                for i, c in enumerate(num)
            ) and all(c == 0 or j % g_all == 0 for j, c in enumerate(den))
            if ok:
                num = [num[i] for i in range(0, len(num), g_all)]
                den = [den[j] for j in range(0, len(den), g_all)]
                shift //= g_all
                m //= g_all
        return cls(m, tuple(num), tuple(den), shift)

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls) -> "Character":
        return cls(1, (Fraction(0),), (Fraction(1),), 0)

    @classmethod
    def constant(cls, value) -> "Character":
        return cls._make(1, [_frac(value)], [Fraction(1)], 0)

    @classmethod
    def monomial(cls, exponent, coeff=1) -> "Character":
        """coeff * lambda^exponent with rational exponent."""
        e = _frac(exponent)
        return cls._make(e.denominator, [_frac(coeff)], [Fraction(1)], e.numerator)

    @classmethod
    def geometric(cls, first, step, coeff=1) -> "Character":
        """coeff * sum_{k>=0} lambda^(first + k*step), step > 0, closed form."""
        a, s = _frac(first), _frac(step)
        if s <= 0:
            raise ValueError("geometric tail needs positive step")
        m = math.lcm(a.denominator, s.denominator)
        num = [_frac(coeff)]
        den = [Fraction(1)] + [Fraction(0)] * (int(s * m) - 1) + [Fraction(-1)]
        return cls._make(m, num, den, int(a * m))

    def is_zero(self) -> bool:
        return self.numerator == (Fraction(0),)

    # -- ring operations --------------------------------------------------

    def _lift(self, m: int) -> tuple:
        k = m // self.root_order
        return (
            _pstretch(self.numerator, k),
            _pstretch(self.denominator, k),
            self.shift * k,
        )

    def __add__(self, other: "Character") -> "Character":
        if not isinstance(other, Character):
            return NotImplemented
        m = math.lcm(self.root_order, other.root_order)
        n1, d1, s1 = self._lift(m)
        n2, d2, s2 = other._lift(m)
        s = min(s1, s2)
        n1 = [Fraction(0)] * (s1 - s) + n1
        n2 = [Fraction(0)] * (s2 - s) + n2
        num = _padd(_pmul(n1, d2), _pmul(n2, d1))
        return Character._make(m, num, _pmul(d1, d2), s)

    def __sub__(self, other: "Character") -> "Character":
        return self + (other * -1)

    def __mul__(self, other) -> "Character":
        if isinstance(other, Character):
            m = math.lcm(self.root_order, other.root_order)
            n1, d1, s1 = self._lift(m)
            n2, d2, s2 = other._lift(m)
            return Character._make(m, _pmul(n1, n2), _pmul(d1, d2), s1 + s2)
        c = _frac(other)
        return Character._make(
            self.root_order,
            [c * v for v in self.numerator],
            list(self.denominator),
            self.shift,
        )

    __rmul__ = __mul__

    def substitute_inverse(self) -> "Character":
        """lambda -> lambda^(-1)."""
        num = list(reversed(self.numerator))
        den = list(reversed(self.denominator))
        shift = -self.shift - (len(self.numerator) - 1) + (len(self.denominator) - 1)
        return Character._make(self.root_order, num, den, shift)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Character):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.root_order, self.numerator, self.denominator, self.shift))

    # -- presentation ------------------------------------------------------

    def render(self) -> str:
        """Text form in the lambda variable, e.g. 'lambda^1/2 / (1 - lambda)'."""
        if self.is_zero():
            return "0"
        m = self.root_order

        def mono(i, c, with_sign=False):
            e = Fraction(i, m)
            if e == 0:
                body = f"{c}"
            else:
                es = "lambda" if e == 1 else f"lambda^{e}"
                if c == 1:
                    body = es
                elif c == -1:
                    body = f"-{es}"
                else:
                    body = f"{c}*{es}"
            return body

        def poly(coeffs, base_shift=0):
            parts = [
                mono(i + base_shift, c) for i, c in enumerate(coeffs) if c != 0
            ]
            return " + ".join(parts).replace("+ -", "- ")

        num = poly(self.numerator, self.shift)
        if len(self.numerator) > 1 and self.shift:
            num = f"lambda^{Fraction(self.shift, m)} * ({poly(self.numerator)})"
        if self.denominator == (Fraction(1),):
            return num
        den = poly(self.denominator)
        num_s = num if len([c for c in self.numerator if c != 0]) == 1 else f"({num})"
        return f"{num_s} / ({den})"

    def series_coefficients(self, order: int) -> list:
        """Coefficients of the expansion in w up to w^order (shift included).

        Only valid when the denominator has nonzero constant term (it does,
        by normalization) and the shift is nonnegative.
        """
        if self.shift < 0:
            raise ValueError("series expansion needs nonnegative shift")
        inv = [Fraction(1)]
        for n in range(1, order + 1):
            acc = Fraction(0)
            for j in range(1, min(n, len(self.denominator) - 1) + 1):
                acc -= self.denominator[j] * inv[n - j]
            inv.append(acc)
        series = _pmul(inv, list(self.numerator))
        out = [Fraction(0)] * (order + 1)
        for i, c in enumerate(series):
            e = i + self.shift
            if e <= order:
                out[e] = c
        return out

    def to_dict(self) -> dict:
        return {
            "m": self.root_order,
            "numerator": [[c.numerator, c.denominator] for c in self.numerator],
            "denominator": [[c.numerator, c.denominator] for c in self.denominator],
            "shift": self.shift,
        }


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def local_character(basis: CohomologyBasis, degree_signs: bool = True) -> Character:
    """Supertrace over a harmonic basis as a closed rational form.

    Finite bases sum termwise; arithmetic tails (AllGE/AllLE) close up into
    geometric series lambda^a / (1 - lambda^(+-step)).
    """
    sign = (-1) ** basis.degree if degree_signs else 1
    kind = basis.admissible_nu.kind
    if kind is AdmissibleKind.FINITE:
        total = Character.zero()
        for s in basis.sections:
            total = total + Character.monomial(
                s.lambda_weight, sign * s.multiplicity
            )
        return total
    bound = basis.admissible_nu.bound
    step = basis.admissible_nu.step
    lam_step = basis.lambda_step
    # first lambda-weight on the lattice endpoint
    shift = _find_twist_shift(basis)
    first = bound / step + shift
    if kind is AdmissibleKind.ALL_GE:
        return Character.geometric(first, lam_step, sign)
    # AllLE: weights first, first - lam_step, ...  equal to the inverse tail
    return Character.geometric(-first, lam_step, sign).substitute_inverse()


def _find_twist_shift(basis: CohomologyBasis) -> Fraction:
    if basis.sections:
        s0 = min(
            basis.sections,
            key=lambda s: abs(s.lambda_weight),
        )
        # recover shift from any section: lambda_weight = nu/step + shift
        if s0.profile.kind.name == "POWER":
            nu = (
                s0.profile.exponent
                if s0.weight_exponent >= 0
                else -s0.profile.exponent
            )
            return s0.lambda_weight - nu / basis.admissible_nu.step
    return Fraction(0)


def chi_y(todd: Character, canonical: Character, y) -> Character:
    """Hirzebruch combination todd + y * canonical."""
    return todd + canonical * _frac(y)


def sum_and_simplify(chars: Sequence[Character]) -> Character:
    total = Character.zero()
    for c in chars:
        total = total + c
    return total


def evaluate(ch: Character, s: float, theta: float) -> complex:
    """Value at lambda = exp(-s + i theta), principal root for w."""
    w = cmath.exp(complex(-s, theta) / ch.root_order)
    den = _peval(ch.denominator, w)
    if abs(den) < 1e-12:
        raise PoleError(f"denominator vanishes at s={s}, theta={theta}")
    return (w ** ch.shift) * _peval(ch.numerator, w) / den


def eta_renormalized(alpha: float, s: float) -> complex:
    """Two-tail renormalized eta sum (plus the null-space trace h = 1).

    -e^(-s-ia)/(1-e^(-s-ia)) + 1/(1-e^(-s+ia)); identically 1 at alpha = 0,
    and converging to twice the local Todd-type Lefschetz number as s -> 0.
    """
    if s <= 0:
        raise ValueError("eta renormalization needs s > 0")
    zbar = cmath.exp(complex(-s, -alpha))
    z = cmath.exp(complex(-s, alpha))
    return -zbar / (1 - zbar) + 1 / (1 - z)


def duistermaat_heckman_sphere(t: float) -> tuple:
    """Closed form 2 sin(t)/t against adaptive quadrature of the circle
    average of e^(i t cos phi); returns (closed, quadrature, discrepancy).

    The two-fixed-point character sum fixes the closed form consistent with
    the integral (the alternative sign combination (e^it + e^-it)/(it) does
    not reproduce it).
    """
    if t == 0:
        raise ValueError("t must be nonzero")

    def integrand_re(phi):
        return math.cos(t * math.cos(phi)) * math.sin(phi)

    def integrand_im(phi):
        return math.sin(t * math.cos(phi)) * math.sin(phi)

    re, _ = quad(integrand_re, 0.0, math.pi, epsabs=1e-12, epsrel=1e-12)
    im, _ = quad(integrand_im, 0.0, math.pi, epsabs=1e-12, epsrel=1e-12)
    quadrature = complex(re, im)
    closed = complex(2.0 * math.sin(t) / t, 0.0)
    return closed, quadrature, abs(closed - quadrature)


# ---------------------------------------------------------------------------
# truncated heat supertraces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeSpectra:
    """Eigendata of one form degree, split along the Hodge decomposition.

    Entries are (lambda_sq, mu, weight): radial eigenvalue, link sqrt-
    Laplacian eigenvalue (the renormalizer), and the endomorphism diagonal
    <T psi, psi>.  Harmonic entries carry lambda_sq = 0.
    """

    coexact: tuple = ()
    exact: tuple = ()
    harmonic: tuple = ()


@dataclass(frozen=True)
class HeatSupertrace:
    harmonic_coeffs: tuple      # polynomial in b from the harmonic part
    s_terms: tuple              # S_k(t, s) per degree k
    t: float
    s: float

    def value(self, b: complex) -> complex:
        harm = sum(c * b**q for q, c in enumerate(self.harmonic_coeffs))
        tail = sum(sk * b**k for k, sk in enumerate(self.s_terms))
        return harm + (1 + b) * tail

    def harmonic_value(self, b: complex) -> complex:
        return sum(c * b**q for q, c in enumerate(self.harmonic_coeffs))


def truncated_heat_supertrace(
    spectra: dict,
    t: float,
    s: float,
    pairing_rtol: float = 1e-5,
) -> HeatSupertrace:
    """Assemble sum_q b^q Tr(T e^(-t Delta) e^(-s(Delta + sqrt(Delta_Z)))).

    spectra maps degree -> DegreeSpectra.  The co-exact entries of degree q
    must pair with the exact entries of degree q+1 (same lambda^2 within
    pairing_rtol); the assembled polynomial uses the co-exact values for
    both partners, which realizes the (1+b) factorization exactly and makes
    the b = -1 value manifestly t-independent.
    """
    degrees = sorted(spectra)
    max_degree = degrees[-1] if degrees else 0
    harm = [0j] * (max_degree + 1)
    s_terms = [0j] * (max_degree + 1)
    for q in degrees:
        data = spectra[q]
        for lam2, mu, wgt in data.harmonic:
            harm[q] += complex(wgt) * math.exp(-s * mu)
        partner = spectra.get(q + 1, DegreeSpectra()).exact
        co = sorted(data.coexact, key=lambda e: e[0])
        ex = sorted(partner, key=lambda e: e[0])
        if len(co) != len(ex):
            raise SusyPairingError(
                f"degree {q}: {len(co)} co-exact vs {len(ex)} exact partners"
            )
        for (l2a, mua, wa), (l2b, _, _) in zip(co, ex):
            if abs(l2a - l2b) > pairing_rtol * (1.0 + abs(l2a)):
                raise SusyPairingError(
                    f"degree {q}: eigenvalue {l2a} unpaired (partner {l2b})"
                )
        for lam2, mu, wgt in co:
            s_terms[q] += complex(wgt) * math.exp(-(t + s) * lam2 - s * mu)
        if q == 0:
            continue
        lone_exact = spectra[q].exact and (q - 1) not in spectra
        if lone_exact:
            raise SusyPairingError(f"degree {q}: exact entries with no source")
    return HeatSupertrace(
        harmonic_coeffs=tuple(harm), s_terms=tuple(s_terms[:-1]), t=t, s=s
    )
