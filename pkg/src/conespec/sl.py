"""Reduction of Laplace-type operators on cone model spaces to singular
Sturm-Liouville problems.

A mode of multi-degree k with adjoint rescaling F = x^B yields the radial
operator  -(1/F)(F u')' + sum_j mu_j^2 x^(-2 c_j)  on (0, x_max].  Types
1/2/E/O are posed with weight F; types 3/4 in the rescaled normal variable
with weight F^(-1).  The Liouville conjugation v = F^(1/2) u turns the
weighted operator into -v'' + (G + V) v with G = B(B-2)/(4 x^2).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Optional

from .model import LinkMode, ModelSpace, adjoint_rescaling
from .power import PowerFunction, _frac


class FormType(Enum):
    T1 = "1"   # co-exact tangential
    T2 = "2"   # image of T1 under the complex differential
    T3 = "3"   # co-differential image of T4
    T4 = "4"   # exact normal (dx wedge ...)
    E = "E"    # link-harmonic tangential
    O = "O"    # link-harmonic normal


TANGENTIAL_TYPES = (FormType.T1, FormType.T2, FormType.E, FormType.O)
NORMAL_TYPES = (FormType.T3, FormType.T4)


class ComplexKind(Enum):
    DE_RHAM = "de_rham"
    DOLBEAULT = "dolbeault"


class IdealCondition(Enum):
    MIN = "min"
    MAX = "max"


class BoundaryFlavor(Enum):
    N = "N"  # absolute / generalized Neumann (del-bar Neumann for Dolbeault)
    D = "D"  # relative / generalized Dirichlet


@dataclass(frozen=True)
class ComplexSpec:
    kind: ComplexKind
    w: IdealCondition = IdealCondition.MIN
    b: BoundaryFlavor = BoundaryFlavor.N
    twist_shift: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "twist_shift", _frac(self.twist_shift))


class EndBehavior(Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    ROBIN = "robin"


@dataclass(frozen=True)
class OneEndCondition:
    """gamma1 u(x_max) + gamma2 u'(x_max) = 0."""

    kind: EndBehavior
    gamma1: float = 1.0
    gamma2: float = 0.0

    def __post_init__(self):
        if self.kind is EndBehavior.DIRICHLET:
            object.__setattr__(self, "gamma1", 1.0)
            object.__setattr__(self, "gamma2", 0.0)
        elif self.kind is EndBehavior.NEUMANN:
            object.__setattr__(self, "gamma1", 0.0)
            object.__setattr__(self, "gamma2", 1.0)
        elif (self.gamma1, self.gamma2) == (0.0, 0.0):
            raise ValueError("Robin condition needs (gamma1, gamma2) != (0, 0)")

    @classmethod
    def dirichlet(cls):
        return cls(EndBehavior.DIRICHLET)

    @classmethod
    def neumann(cls):
        return cls(EndBehavior.NEUMANN)

    @classmethod
    def robin(cls, gamma1, gamma2=1.0):
        if gamma1 == 0.0:
            return cls.neumann()
        return cls(EndBehavior.ROBIN, float(gamma1), float(gamma2))


class ZeroEndKind(Enum):
    LIMIT_POINT = "limit_point"
    LIMIT_CIRCLE = "limit_circle"


@dataclass(frozen=True)
class ZeroEndCondition:
    """Ideal condition at x = 0.

    forced_sigma pins the branch exponent outright (used for E/O types); it
    is stated in the frame of the problem that owns this condition, and the
    Liouville transform converts it alongside the operator.
    """

    kind: ZeroEndKind
    extension: Optional[IdealCondition] = None  # meaningful for limit circle
    forced_sigma: Optional[Fraction] = None

    def __post_init__(self):
        if self.forced_sigma is not None:
            object.__setattr__(self, "forced_sigma", _frac(self.forced_sigma))


@dataclass(frozen=True)
class BoundaryCondition:
    at_one: OneEndCondition
    at_zero: ZeroEndCondition


@dataclass(frozen=True)
class SLProblem:
    """Weighted problem -(1/w)(w u')' + V u = lambda^2 u on (0, x_max]."""

    weight: PowerFunction
    potential: PowerFunction
    x_max: float
    bc: BoundaryCondition

    def __post_init__(self):
        if not self.weight.is_single_term() or self.weight.coefficient <= 0:
            raise ValueError("weight must be a positive single power term")

    @property
    def weight_exponent(self) -> Fraction:
        return self.weight.exponent


@dataclass(frozen=True)
class SchrodingerProblem:
    """-v'' + V v = lambda^2 v with indicial data sigma(sigma-1) = c2 at 0."""

    potential: PowerFunction
    x_max: float
    bc: BoundaryCondition
    sigma_plus: float
    sigma_minus: float
    x2_coefficient: Fraction = Fraction(0)

    @property
    def origin_indicial(self) -> tuple:
        return (self.sigma_plus, self.sigma_minus)


# ---------------------------------------------------------------------------
# potential helpers
# ---------------------------------------------------------------------------


def mode_potential(space: ModelSpace, mode: LinkMode) -> PowerFunction:
    """sum_j mu_j^2 x^(-2 c_j)."""
    terms = []
    for mu_j, f in zip(mode.mu, space.factors):
        mu_sq = _frac(mu_j) ** 2
        if mu_sq != 0:
            terms.append((mu_sq, -2 * f.exponent))
    return PowerFunction(terms)


def liouville_term(b: Fraction) -> PowerFunction:
    """G = B(B-2)/(4 x^2), the potential gained by conjugating weight x^B.

    This is the display form (1/2)(F^(-1/2) d/dx)^2 F evaluated for F = x^B;
    it vanishes exactly for B = 0 and B = 2 and satisfies G(B) = G(2-B).
    """
    b = _frac(b)
    return PowerFunction.monomial(b * (b - 2) / 4, -2)


def indicial_roots(c2: float) -> tuple:
    """Roots of sigma(sigma - 1) = c2, ordered sigma_plus >= sigma_minus."""
    disc = 0.25 + c2
    if disc < 0:
        raise ValueError("oscillatory endpoint (c2 < -1/4) is out of scope")
    root = disc ** 0.5
    return 0.5 + root, 0.5 - root


# ---------------------------------------------------------------------------
# boundary condition tables
# ---------------------------------------------------------------------------


def boundary_condition_for(
    form_type: FormType,
    spec: ComplexSpec,
    f_effective: PowerFunction,
    nu_over_f0_at_one: Optional[float] = None,
    x_max: float = 1.0,
) -> OneEndCondition:
    """Condition at x = x_max for a given form type, posed in the variable
    the problem is solved in (the rescaled one for types 3/4).

    f_effective is the weight of the posed problem: F for types 1/2/E/O and
    F^(-1) for types 3/4.  Dolbeault tables need nu / f0 evaluated at x_max.
    """
    tangential = form_type in TANGENTIAL_TYPES

    if spec.kind is ComplexKind.DE_RHAM:
        if spec.b is BoundaryFlavor.N:
            return (
                OneEndCondition.neumann()
                if tangential
                else OneEndCondition.dirichlet()
            )
        if tangential:
            return OneEndCondition.dirichlet()
        # relative types 3/4: (v * F_eff)'(x_max) = 0 in the rescaled variable
        ratio = float(
            f_effective.derivative()(x_max) / f_effective(x_max)
        )
        return OneEndCondition.robin(ratio, 1.0)

    # Dolbeault: E rides with types 1/2, O with types 3/4.
    dolbeault_tangential = form_type in (FormType.T1, FormType.T2, FormType.E)
    if nu_over_f0_at_one is None:
        raise ValueError("Dolbeault boundary conditions need nu / f0(x_max)")
    if spec.b is BoundaryFlavor.N:
        if dolbeault_tangential:
            # del-bar Neumann: u'(x_max) = (nu/f0) u(x_max)
            return OneEndCondition.robin(-float(nu_over_f0_at_one), 1.0)
        return OneEndCondition.dirichlet()
    if dolbeault_tangential:
        return OneEndCondition.dirichlet()
    ratio = float(f_effective.derivative()(x_max) / f_effective(x_max))
    return OneEndCondition.robin(ratio - float(nu_over_f0_at_one), 1.0)


def classify_endpoint_zero(sp: SchrodingerProblem) -> ZeroEndKind:
    """Limit point/limit circle at x = 0 from the potential's leading term.

    Inverse-square threshold 3/4: coefficient >= 3/4 is limit point; faster
    blow-up with positive coefficient is limit point; anything milder
    (bounded below near 0) is limit circle.
    """
    return _classify_potential(sp.potential)


def _classify_potential(potential: PowerFunction) -> ZeroEndKind:
    e_min = potential.min_exponent()
    if e_min < -2:
        lead = potential.coefficient_of(e_min)
        if lead < 0:
            raise ValueError(
                "negative leading coefficient with blow-up faster than x^-2 "
                "is outside the endpoint classification"
            )
        return ZeroEndKind.LIMIT_POINT
    if e_min == -2:
        c2 = potential.coefficient_of(Fraction(-2))
        return (
            ZeroEndKind.LIMIT_POINT
            if c2 >= Fraction(3, 4)
            else ZeroEndKind.LIMIT_CIRCLE
        )
    return ZeroEndKind.LIMIT_CIRCLE


# ---------------------------------------------------------------------------
# problem construction
# ---------------------------------------------------------------------------


def build_sl(
    space: ModelSpace,
    mode: LinkMode,
    form_type: FormType,
    spec: ComplexSpec,
    f0_at_xmax: Optional[float] = None,
) -> SLProblem:
    """Assemble the weighted radial problem for one (mode, form type).

    Types E/O require a link-harmonic mode (all mu_j = 0) and carry fixed
    vanishing behavior at x = 0 (E: constant branch, O: the complementary
    x^(1-B) branch) regardless of the ideal condition.
    """
    mode.multidegree.validate(space)
    f = adjoint_rescaling(space, mode.multidegree)
    b_exp = f.exponent
    potential = mode_potential(space, mode)

    if form_type in (FormType.E, FormType.O):
        if not potential.is_zero():
            raise ValueError("types E/O require a link-harmonic mode (all mu = 0)")

    weight = f if form_type in TANGENTIAL_TYPES else f.reciprocal()

    nu_over_f0 = None
    if spec.kind is ComplexKind.DOLBEAULT:
        if mode.nu is None or f0_at_xmax is None:
            raise ValueError("Dolbeault problems need mode.nu and f0(x_max)")
        nu_over_f0 = float(mode.nu) / float(f0_at_xmax)

    at_one = boundary_condition_for(
        form_type, spec, weight, nu_over_f0, x_max=space.x_max
    )

    # Classify x = 0 on the conjugated form and record the branch choice.
    schro_potential = potential + liouville_term(b_exp)
    zero_kind = _classify_potential(schro_potential)
    forced = None
    if form_type is FormType.E:
        forced = Fraction(0)
    elif form_type is FormType.O:
        forced = 1 - b_exp
    if zero_kind is ZeroEndKind.LIMIT_POINT:
        at_zero = ZeroEndCondition(ZeroEndKind.LIMIT_POINT)
    else:
        at_zero = ZeroEndCondition(
            ZeroEndKind.LIMIT_CIRCLE, extension=spec.w, forced_sigma=forced
        )

    return SLProblem(
        weight=weight,
        potential=potential,
        x_max=space.x_max,
        bc=BoundaryCondition(at_one=at_one, at_zero=at_zero),
    )


def liouville_transform(p: SLProblem) -> SchrodingerProblem:
    """Conjugate the weighted problem by F^(1/2): v = F^(1/2) u.

    Adds G = B(B-2)/(4x^2) to the potential, shifts any first-order condition
    at x_max by B/(2 x_max), and computes the indicial roots at 0 from the
    total x^-2 coefficient.
    """
    if not p.weight.is_single_term():
        raise ValueError("Liouville transform needs a single-term weight")
    b = p.weight_exponent
    potential = p.potential + liouville_term(b)

    at_one = p.bc.at_one
    if at_one.kind is not EndBehavior.DIRICHLET:
        # gamma1 u + gamma2 u' = 0 with u = x^(-B/2) v becomes
        # (gamma1 - gamma2 B/(2 x_max)) v + gamma2 v' = 0.
        shift = float(b) / (2.0 * p.x_max)
        at_one = OneEndCondition.robin(
            at_one.gamma1 - at_one.gamma2 * shift, at_one.gamma2
        )

    at_zero = p.bc.at_zero
    if at_zero.forced_sigma is not None:
        at_zero = replace(at_zero, forced_sigma=at_zero.forced_sigma + b / 2)

    c2 = potential.coefficient_of(Fraction(-2))
    sigma_plus, sigma_minus = indicial_roots(float(c2))
    return SchrodingerProblem(
        potential=potential,
        x_max=p.x_max,
        bc=BoundaryCondition(at_one=at_one, at_zero=at_zero),
        sigma_plus=sigma_plus,
        sigma_minus=sigma_minus,
        x2_coefficient=c2,
    )


def selected_sigma(sp: SchrodingerProblem) -> float:
    """Indicial exponent of the branch selected at x = 0.

    Limit point forces sigma_plus.  In the limit circle case the min
    extension takes the principal branch sigma_plus, max takes sigma_minus
    (the x^(1/2) log x branch at the degenerate point is always excluded);
    a forced exponent (E/O types) wins outright.
    """
    z = sp.bc.at_zero
    if z.forced_sigma is not None:
        return float(z.forced_sigma)
    if z.kind is ZeroEndKind.LIMIT_POINT:
        return sp.sigma_plus
    if z.extension is None:
        raise ValueError("limit-circle problem with unset extension")
    return sp.sigma_plus if z.extension is IdealCondition.MIN else sp.sigma_minus


def selected_sigma_weighted(p: SLProblem) -> float:
    """Branch exponent at x = 0 in the weighted frame (sigma - B/2)."""
    z = p.bc.at_zero
    if z.forced_sigma is not None:
        return float(z.forced_sigma)
    sp = liouville_transform(p)
    return selected_sigma(sp) - float(p.weight_exponent) / 2.0
