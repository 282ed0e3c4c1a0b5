"""Closed-form harmonic bases: finite de Rham, countable Dolbeault.

Radial profiles are x^nu for a linear Reeb rescaling (f0 = x) and
exp(nu x^(1-alpha)/(1-alpha)) for faster vanishing (alpha > 1).  A profile
enters a basis iff its square is integrable against the radial weight and it
meets the growth restriction of the ideal condition at x = 0.

Weight bookkeeping for normal (dx-carrying) sections: the caller passes the
adjoint rescaling function of the section's own link datum (the complement
of the tangential one), and admissibility is tested on the rescaled profile
x^(-nu) against the inverse of that weight; this reproduces the dual bases
of the worked disc and cusp examples and makes the star pairing an exact
set negation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .model import LinkMode, ModelSpace, MultiDegree, adjoint_rescaling
from .power import PowerFunction, _frac
from .sl import BoundaryFlavor, ComplexKind, ComplexSpec, IdealCondition


class ProfileKind(Enum):
    POWER = "power"
    EXP_POWER = "exp_power"


@dataclass(frozen=True)
class RadialProfile:
    """x^exponent, or exp(kappa * x^exponent) with exponent = 1 - alpha < 0."""

    kind: ProfileKind
    exponent: Fraction
    kappa: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "exponent", _frac(self.exponent))
        object.__setattr__(self, "kappa", _frac(self.kappa))

    @classmethod
    def power(cls, a) -> "RadialProfile":
        return cls(ProfileKind.POWER, a)

    @classmethod
    def exp_power(cls, kappa, exponent) -> "RadialProfile":
        if _frac(exponent) >= 0:
            raise ValueError("exp profile needs exponent 1 - alpha < 0")
        return cls(ProfileKind.EXP_POWER, exponent, kappa)

    def bounded_at_zero(self) -> bool:
        if self.kind is ProfileKind.POWER:
            return self.exponent >= 0
        return self.kappa <= 0  # exp(kappa x^(negative)) with kappa < 0 decays


def l2_admissible(profile: RadialProfile, weight: PowerFunction, x_max=1) -> bool:
    """Is the profile square-integrable against the weight x^B near 0?

    Power profile x^a: finite iff 2a + B > -1 (the borderline logarithmic
    case is excluded).  Exp profile: admissible iff kappa <= 0.
    """
    b = weight.exponent
    if profile.kind is ProfileKind.POWER:
        return 2 * profile.exponent + b > -1
    return profile.kappa <= 0


class AdmissibleKind(Enum):
    ALL_GE = "all_ge"
    ALL_LE = "all_le"
    FINITE = "finite"


@dataclass(frozen=True)
class AdmissibleSet:
    """Arithmetic description of the admissible weight lattice."""

    kind: AdmissibleKind
    bound: Optional[Fraction] = None      # inclusive endpoint for GE/LE
    step: Fraction = Fraction(1)
    values: Optional[tuple] = None        # FINITE only

    def contains(self, nu) -> bool:
        q = _frac(nu)
        if self.kind is AdmissibleKind.FINITE:
            return q in self.values
        offset = (q - self.bound) / self.step
        if offset.denominator != 1:
            return False
        return offset >= 0 if self.kind is AdmissibleKind.ALL_GE else offset <= 0


@dataclass(frozen=True)
class HarmonicSection:
    profile: RadialProfile
    mode: Optional[LinkMode]
    weight_exponent: Fraction      # exponent of the radial weight it pairs with
    lambda_weight: Fraction        # power of lambda contributed to characters
    degree: int = 0
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "weight_exponent", _frac(self.weight_exponent))
        object.__setattr__(self, "lambda_weight", _frac(self.lambda_weight))


@dataclass(frozen=True)
class CohomologyBasis:
    sections: tuple
    degree: int
    admissible_nu: AdmissibleSet
    lambda_step: Fraction = Fraction(1)   # lambda-weight gap between sections

    def __post_init__(self):
        object.__setattr__(self, "lambda_step", _frac(self.lambda_step))

    @property
    def rank(self) -> int:
        return sum(s.multiplicity for s in self.sections)


# ---------------------------------------------------------------------------
# de Rham
# ---------------------------------------------------------------------------


def derham_harmonic_basis(
    space: ModelSpace,
    link_harmonic_modes: Sequence[LinkMode],
    spec: ComplexSpec,
) -> dict:
    """Per-degree bases of L^2 link-harmonic extensions (absolute complex).

    A link-harmonic form of multi-degree k extends to a harmonic section
    with constant radial profile iff x^B(k) is integrable, i.e. B(k) > -1.
    The relative complex is obtained through complementary_basis, not here.
    """
    if spec.kind is not ComplexKind.DE_RHAM:
        raise ValueError("derham_harmonic_basis needs a de Rham complex spec")
    if spec.b is not BoundaryFlavor.N:
        raise ValueError(
            "relative (B=D) bases come from complementary_basis via the star map"
        )
    by_degree: dict = {}
    for mode in link_harmonic_modes:
        if any(float(m) != 0 for m in mode.mu):
            raise ValueError("de Rham harmonic bases need all mu = 0")
        f = adjoint_rescaling(space, mode.multidegree)
        profile = RadialProfile.power(0)
        if not l2_admissible(profile, f):
            continue
        degree = mode.multidegree.total
        section = HarmonicSection(
            profile=profile,
            mode=mode,
            weight_exponent=f.exponent,
            lambda_weight=_frac(mode.nu) if mode.nu is not None else Fraction(0),
            degree=degree,
            multiplicity=mode.multiplicity,
        )
        by_degree.setdefault(degree, []).append(section)
    out = {}
    for degree, sections in sorted(by_degree.items()):
        values = tuple(sorted(s.lambda_weight for s in sections))
        out[degree] = CohomologyBasis(
            sections=tuple(sections),
            degree=degree,
            admissible_nu=AdmissibleSet(AdmissibleKind.FINITE, values=values),
        )
    return out


def complementary_basis(space: ModelSpace, basis: CohomologyBasis) -> CohomologyBasis:
    """Star-dual basis: complementary multi-degrees, negated weights."""
    dim_z = sum(f.link_dim for f in space.factors)
    sections = []
    for s in basis.sections:
        if s.mode is None:
            raise ValueError("complementary map needs link mode data")
        comp = s.mode.multidegree.complement(space)
        f = adjoint_rescaling(space, comp)
        sections.append(
            HarmonicSection(
                profile=s.profile,
                mode=LinkMode(
                    mu=s.mode.mu,
                    multidegree=comp,
                    nu=-_frac(s.mode.nu) if s.mode.nu is not None else None,
                    multiplicity=s.mode.multiplicity,
                ),
                weight_exponent=f.exponent,
                lambda_weight=-s.lambda_weight,
                degree=comp.total + 1,  # normal sections carry the dx factor
                multiplicity=s.multiplicity,
            )
        )
    values = tuple(sorted(s.lambda_weight for s in sections))
    return CohomologyBasis(
        sections=tuple(sections),
        degree=dim_z + 1 - basis.degree,
        admissible_nu=AdmissibleSet(AdmissibleKind.FINITE, values=values),
    )


# ---------------------------------------------------------------------------
# Dolbeault
# ---------------------------------------------------------------------------


def dolbeault_harmonic_basis(
    alpha,
    nu_lattice: tuple,
    spec: ComplexSpec,
    f_weight: PowerFunction,
    nu_window: Optional[tuple] = None,
    degree: int = 0,
) -> CohomologyBasis:
    """Countable basis of null sections for the Reeb rescaling f0 = x^alpha.

    nu_lattice = (shift j, step): the section weights run over the lattice
    step * Z of eigenvalues of sqrt(-1) nabla_V on the untwisted part, and
    each section contributes lambda^(nu/step + j) to characters (j is the
    action weight of the twisting section, e.g. 1 for a canonical twist).

    B=N keeps tangential profiles x^nu (alpha = 1) or
    exp(nu x^(1-alpha)/(1-alpha)); B=D keeps normal ones with the rescaled
    profile x^(-nu), tested against the inverse of the passed weight.
    nu_window = (lo, hi) bounds the enumeration; the closed-form bound is
    exact for the arithmetic lattice regardless of the window.
    """
    if spec.kind is not ComplexKind.DOLBEAULT:
        raise ValueError("dolbeault_harmonic_basis needs a Dolbeault spec")
    a = _frac(alpha)
    if a <= 0:
        raise ValueError("alpha must be positive")
    shift, step = _frac(nu_lattice[0]), _frac(nu_lattice[1])
    if step <= 0:
        raise ValueError("lattice step must be positive")
    b = f_weight.exponent

    if spec.b is BoundaryFlavor.N:
        if a == 1:
            # x^nu against x^B: need 2 nu + B > -1; min excludes nu < 0
            lower = -(b + 1) / 2
            nu_min = _smallest_lattice_above(lower, step)
            if spec.w is IdealCondition.MIN and nu_min < 0:
                nu_min = Fraction(0)
        else:
            nu_min = Fraction(0)  # exp profile: kappa = nu/(1-alpha) <= 0
        admissible = AdmissibleSet(AdmissibleKind.ALL_GE, bound=nu_min, step=step)
    else:
        if a == 1:
            # rescaled profile x^(-nu) against x^(-B): need -2 nu - B > -1
            upper = (1 - b) / 2
            nu_max = _largest_lattice_below(upper, step)
            if spec.w is IdealCondition.MIN and nu_max > 0:
                nu_max = Fraction(0)
        else:
            nu_max = Fraction(0)
        admissible = AdmissibleSet(AdmissibleKind.ALL_LE, bound=nu_max, step=step)

    sections = []
    if nu_window is not None:
        lo, hi = _frac(nu_window[0]), _frac(nu_window[1])
        n_lo = (lo / step).__floor__()
        count = int((hi - lo) / step) + 2
        for i in range(count):
            nu = step * (n_lo + i)
            if nu < lo or nu > hi or not admissible.contains(nu):
                continue
            sections.append(_dolbeault_section(nu, a, b, shift, step, spec))
    return CohomologyBasis(
        sections=tuple(sections),
        degree=degree,
        admissible_nu=admissible,
        lambda_step=Fraction(1),
    )


def _dolbeault_section(
    nu: Fraction, a: Fraction, b: Fraction, shift: Fraction, step: Fraction,
    spec: ComplexSpec,
) -> HarmonicSection:
    if spec.b is BoundaryFlavor.N:
        profile = (
            RadialProfile.power(nu)
            if a == 1
            else RadialProfile.exp_power(nu / (1 - a), 1 - a)
        )
        weight_exp = b
    else:
        profile = (
            RadialProfile.power(-nu)
            if a == 1
            else RadialProfile.exp_power(-nu / (1 - a), 1 - a)
        )
        weight_exp = -b
    return HarmonicSection(
        profile=profile,
        mode=None,
        weight_exponent=weight_exp,
        lambda_weight=nu / step + shift,
        degree=0 if spec.b is BoundaryFlavor.N else 1,
    )


def _smallest_lattice_above(bound: Fraction, step: Fraction) -> Fraction:
    """Least step*n with step*n > bound (strict)."""
    n = (bound / step).__floor__()
    candidate = step * n
    while candidate <= bound:
        n += 1
        candidate = step * n
    return candidate


def _largest_lattice_below(bound: Fraction, step: Fraction) -> Fraction:
    """Greatest step*n with step*n < bound (strict)."""
    return -_smallest_lattice_above(-bound, step)
