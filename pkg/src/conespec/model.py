"""Symbolic data model for warped-product cone metrics dx^2 + sum_j x^(2c_j) g_j.

Circle/torus circumferences are stored in units of 2*pi (a circle of length
4*pi has stored length 2), which keeps the Fourier eigenvalue lattice and the
equivariant weights exactly rational.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Optional, Sequence

from .power import Fraction as _Fr  # re-exported Fraction, same object
from .power import PowerFunction, _frac


class ReebBounding(Enum):
    BOUNDING_BELOW = "bounding_below"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Factor:
    """One link factor: closed manifold of dimension link_dim warped by x^c."""

    link_dim: int
    exponent: Fraction
    torus_lengths: Optional[tuple] = None  # circumferences / (2*pi), rational

    def __post_init__(self):
        object.__setattr__(self, "exponent", _frac(self.exponent))
        if self.link_dim < 1:
            raise ValueError("link factor dimension must be positive")
        if self.exponent <= 0:
            raise ValueError("warping exponent c_j must be positive")
        if self.torus_lengths is not None:
            lengths = tuple(_frac(l) for l in self.torus_lengths)
            if len(lengths) != self.link_dim:
                raise ValueError("torus_lengths must match link_dim")
            if any(l <= 0 for l in lengths):
                raise ValueError("torus lengths must be positive")
            object.__setattr__(self, "torus_lengths", lengths)


@dataclass(frozen=True)
class ModelSpace:
    """Truncated cone (0, x_max] x Z1 x ... x Zm with power-law warping."""

    factors: tuple
    reeb_alpha: Optional[Fraction] = None
    x_max: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("need at least one link factor")
        if self.reeb_alpha is not None:
            alpha = _frac(self.reeb_alpha)
            if alpha <= 0:
                raise ValueError("Reeb exponent alpha must be positive")
            object.__setattr__(self, "reeb_alpha", alpha)
        if self.x_max <= 0:
            raise ValueError("x_max must be positive")

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    def exponents(self) -> tuple:
        return tuple(f.exponent for f in self.factors)


@dataclass(frozen=True)
class MultiDegree:
    """Form degree per link factor."""

    degrees: tuple

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(k) for k in self.degrees))

    def validate(self, space: ModelSpace) -> None:
        if len(self.degrees) != space.n_factors:
            raise ValueError(
                f"multi-degree has {len(self.degrees)} entries, "
                f"space has {space.n_factors} factors"
            )
        for k, f in zip(self.degrees, space.factors):
            if not 0 <= k <= f.link_dim:
                raise ValueError(f"degree {k} out of range for factor dim {f.link_dim}")

    @property
    def total(self) -> int:
        return sum(self.degrees)

    def complement(self, space: ModelSpace) -> "MultiDegree":
        """Multi-degree of the link Hodge dual."""
        self.validate(space)
        return MultiDegree(
            tuple(f.link_dim - k for k, f in zip(self.degrees, space.factors))
        )


@dataclass(frozen=True)
class LinkMode:
    """One separated link eigenmode feeding a radial eigenvalue problem.

    mu are the per-factor eigenvalues of the link Dirac (sqrt of Laplacian
    eigenvalues); nu is the optional equivariant weight (eigenvalue of
    sqrt(-1) nabla_V on the first circle).  mu/nu may be exact Fractions.
    """

    mu: tuple
    multidegree: MultiDegree
    nu: Optional[Fraction] = None
    multiplicity: int = 1
    lattice: Optional[tuple] = None  # Fourier indices, bookkeeping only

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(self.mu))
        if any(float(m) < 0 for m in self.mu):
            raise ValueError("mu entries must be nonnegative")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")
        if len(self.mu) != len(self.multidegree.degrees):
            raise ValueError("mu length must match multi-degree length")

    def mu_total_sq(self) -> float:
        return float(sum(_frac(m) ** 2 for m in self.mu))

    def key(self) -> tuple:
        """Deterministic sort key."""
        return (
            self.mu_total_sq(),
            self.multidegree.degrees,
            self.lattice if self.lattice is not None else (),
            float(self.nu) if self.nu is not None else 0.0,
        )


class MorseKind(Enum):
    POWER_LAW = "power_law"
    GENERAL = "general"


@dataclass(frozen=True)
class MorseFunction:
    """Radial Morse data: either h = x^(c+1)/(c+1) or sampled h', h''."""

    kind: MorseKind
    c: Optional[Fraction] = None
    grid: Optional[tuple] = None        # abscissae for GENERAL
    h_prime: Optional[tuple] = None
    h_second: Optional[tuple] = None

    def __post_init__(self):
        if self.kind is MorseKind.POWER_LAW:
            if self.c is None:
                raise ValueError("power-law Morse function needs c")
            c = _frac(self.c)
            if c <= 0:
                raise ValueError("power-law Morse exponent c must be positive")
            object.__setattr__(self, "c", c)
        else:
            if self.grid is None or self.h_prime is None or self.h_second is None:
                raise ValueError("general Morse function needs grid, h', h''")
            if not (len(self.grid) == len(self.h_prime) == len(self.h_second)):
                raise ValueError("grid/h'/h'' length mismatch")

    @classmethod
    def power_law(cls, c) -> "MorseFunction":
        return cls(kind=MorseKind.POWER_LAW, c=c)

    @classmethod
    def from_callables(cls, h_prime, h_second, x_lo, x_hi, n=10_000) -> "MorseFunction":
        xs = tuple(x_lo * (x_hi / x_lo) ** (i / (n - 1)) for i in range(n))
        return cls(
            kind=MorseKind.GENERAL,
            grid=xs,
            h_prime=tuple(h_prime(x) for x in xs),
            h_second=tuple(h_second(x) for x in xs),
        )

    def h_prime_power(self) -> PowerFunction:
        if self.kind is not MorseKind.POWER_LAW:
            raise ValueError("symbolic h' only for power-law Morse functions")
        return PowerFunction.monomial(1, self.c)

    def h_second_power(self) -> PowerFunction:
        if self.kind is not MorseKind.POWER_LAW:
            raise ValueError("symbolic h'' only for power-law Morse functions")
        return PowerFunction.monomial(self.c, self.c - 1)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def rescaling_factor(space: ModelSpace, k: MultiDegree) -> PowerFunction:
    """x^(sum_j c_j k_j): the factor a multi-degree-k form picks up."""
    k.validate(space)
    exponent = sum(
        (f.exponent * kj for f, kj in zip(space.factors, k.degrees)),
        start=Fraction(0),
    )
    return PowerFunction.monomial(1, exponent)


def volume_rescaling(space: ModelSpace) -> PowerFunction:
    """Rescaling factor of the link volume form, x^(sum_j c_j dim Z_j)."""
    top = MultiDegree(tuple(f.link_dim for f in space.factors))
    return rescaling_factor(space, top)


def adjoint_rescaling(space: ModelSpace, k: MultiDegree) -> PowerFunction:
    """F = R(dvol_Z) / R(form)^2, the radial L^2 weight for multi-degree k.

    F == 1 signals an adapted-Witt violation (flagged by witt_violated).
    """
    r = rescaling_factor(space, k)
    return volume_rescaling(space) * (r * r).reciprocal()


def witt_violated(space: ModelSpace, k: MultiDegree) -> bool:
    """True when the adjoint rescaling function is identically 1."""
    return adjoint_rescaling(space, k) == PowerFunction.one()


@dataclass(frozen=True)
class MorseCheck:
    ok: bool
    witness: Optional[float] = None  # first violating abscissa on failure
    reason: str = ""


def check_radial_morse(
    h: MorseFunction, c_check: float, x_probe_max: float
) -> MorseCheck:
    """Check (h')^2 > h'' beyond c_check and (h')^2 -> infinity on the tail.

    Exact for power-law h (symbolic inequality); probe-based (10^4 geometric
    probes, explicitly heuristic) for sampled data.
    """
    if x_probe_max <= c_check or c_check < 0:
        raise ValueError("need 0 <= c_check < x_probe_max")

    if h.kind is MorseKind.POWER_LAW:
        # (h')^2 > h''  <=>  x^(2c) > c x^(c-1)  <=>  x^(c+1) > c
        c = float(h.c)
        threshold = c ** (1.0 / (c + 1.0))
        if c_check >= threshold or c_check ** (c + 1.0) >= c:
            return MorseCheck(ok=True)
        return MorseCheck(
            ok=False,
            witness=min(1.5 * c_check + 1e-12, threshold * 0.999),
            reason=f"(h')^2 <= h'' on ({c_check}, {threshold})",
        )

    n = 10_000
    lo = max(c_check, 1e-12)
    probes = [lo * (x_probe_max / lo) ** (i / (n - 1)) for i in range(1, n)]
    gridx = list(h.grid)

    def interp(values, x):
        j = min(
            range(len(gridx)), key=lambda i: abs(math.log(gridx[i]) - math.log(x))
        )
        return values[j]

    hp2 = []
    for x in probes:
        hp = interp(h.h_prime, x)
        hs = interp(h.h_second, x)
        if hp * hp <= hs:
            return MorseCheck(ok=False, witness=x, reason="(h')^2 <= h'' at probe")
        hp2.append(hp * hp)
    tail = hp2[3 * len(hp2) // 4 :]
    increasing = all(b >= a for a, b in zip(tail, tail[1:]))
    grows = tail[-1] > tail[0] * (1 + 1e-9) or tail[-1] > 1e6
    if not (increasing and grows):
        return MorseCheck(
            ok=False,
            witness=probes[3 * len(probes) // 4],
            reason="(h')^2 not increasing without bound on tail probes",
        )
    return MorseCheck(ok=True)


def classify_reeb_bounding(alpha) -> ReebBounding:
    """Bounding-below classification of the Reeb rescaling f0 = x^alpha.

    For alpha >= 1 only weights nu >= 0 give L^2 null profiles near 0, so the
    admissible weight set is bounded below.  For alpha < 1 the profile
    exp(nu x^(1-alpha)/(1-alpha)) stays bounded near 0 for every nu, so no
    bound arises.
    """
    a = _frac(alpha)
    if a <= 0:
        raise ValueError("alpha must be positive")
    return ReebBounding.BOUNDING_BELOW if a >= 1 else ReebBounding.UNBOUNDED


def torus_link_modes(
    space: ModelSpace,
    degree_range: Sequence[int],
    mu_cutoff,
    include_nu: bool = False,
) -> list:
    """Enumerate flat-torus link eigenmodes up to a per-factor Dirac cutoff.

    Returns LinkModes with exact rational mu^2 = sum_i (n_i / l_i)^2 per
    factor (lengths l in units of 2*pi), form multiplicity binom(dim, k),
    and nu = n_1 / l_1 on the first circle of the first factor when asked.
    Ordering is deterministic: total mu^2, then lexicographic Fourier index.
    """
    cutoff = _frac(mu_cutoff) if not isinstance(mu_cutoff, float) else mu_cutoff
    if float(cutoff) <= 0:
        raise ValueError("mu cutoff must be positive")
    cutoff_sq = _frac(cutoff) ** 2 if not isinstance(cutoff, float) else cutoff**2

    for f in space.factors:
        if f.torus_lengths is None:
            raise ValueError("all factors need torus_lengths for mode generation")

    per_factor = []
    for f in space.factors:
        lengths = f.torus_lengths
        ranges = [range(-int(float(l * cutoff)) - 1, int(float(l * cutoff)) + 2)
                  for l in lengths]
        entries = []
        for n in itertools.product(*ranges):
            mu_sq = sum((Fraction(ni) / li) ** 2 for ni, li in zip(n, lengths))
            if float(mu_sq) <= float(cutoff_sq) + 1e-12:
                entries.append((mu_sq, n))
        entries.sort(key=lambda t: (float(t[0]), t[1]))
        per_factor.append(entries)

    degrees_wanted = set(int(d) for d in degree_range)
    multidegrees = [
        MultiDegree(ks)
        for ks in itertools.product(
            *[range(0, f.link_dim + 1) for f in space.factors]
        )
        if sum(ks) in degrees_wanted
    ]

    modes = []
    for combo in itertools.product(*per_factor):
        mu = tuple(_sqrt_fraction(entry[0]) for entry in combo)
        lattice = tuple(itertools.chain.from_iterable(entry[1] for entry in combo))
        nu = None
        if include_nu:
            first_len = space.factors[0].torus_lengths[0]
            nu = Fraction(combo[0][1][0]) / first_len
        for k in multidegrees:
            mult = 1
            for f, kj in zip(space.factors, k.degrees):
                mult *= comb(f.link_dim, kj)
            if mult == 0:
                continue
            modes.append(
                LinkMode(mu=mu, multidegree=k, nu=nu, multiplicity=mult,
                         lattice=lattice)
            )
    modes.sort(key=lambda m: m.key())
    return modes


def _sqrt_fraction(q: Fraction):
    """sqrt of a rational: exact Fraction when possible, else float."""
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return math.sqrt(num / den)
