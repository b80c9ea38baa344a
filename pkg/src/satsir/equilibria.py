"""Equilibria, thresholds and the (beta2, alpha2) region classification.

Endemic equilibria have I solving ``A I^2 + B I + C = 0`` and S given by
:func:`s_of_i`.  Whether zero, one or two of them are positive is decided
by the signs of C (equivalently r0 - 1), of B (r0 - P1) and of the
discriminant (r0 - R0+), which is what :func:`equilibrium_report` walks
through.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import ModelParams, StateSI, r0, r0_star
from .numerics import band_sign, is_zero, quadratic_roots


class Region(str, enum.Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    NOT_APPLICABLE = "NotApplicable"


class ExistenceCase(str, enum.Enum):
    UNIQUE_ABOVE_THRESHOLD = "R0>1-unique"
    UNIQUE_AT_THRESHOLD = "R0=1-unique"
    TWO_ENDEMIC = "two-endemic"
    TANGENT = "tangent"
    NONE = "none"


class BifurcationType(str, enum.Enum):
    FORWARD = "Forward"
    BACKWARD = "Backward"
    NOT_APPLICABLE = "NotApplicable"


class InvalidRegion(ValueError):
    pass


@dataclass(frozen=True)
class QuadraticCoeffs:
    A: float
    B: float
    C: float
    B_scale: float
    C_scale: float

    @property
    def discriminant(self) -> float:
        return self.B * self.B - 4.0 * self.A * self.C

    def discriminant_sign(self) -> int:
        return band_sign(self.discriminant, self.B * self.B, 4.0 * self.A * self.C)

    def B_sign(self) -> int:
        return band_sign(self.B, self.B_scale)

    def C_sign(self) -> int:
        return band_sign(self.C, self.C_scale)

    def __call__(self, I: float) -> float:
        return (self.A * I + self.B) * I + self.C


class EndemicRoots(tuple):
    """``(I1, I2)`` with ``I1 <= I2``; ``real`` is False when the pair is complex.

    For a complex pair both entries hold the common real part ``-B / (2A)``.
    """

    real: bool

    def __new__(cls, I1: float, I2: float, real: bool):
        obj = super().__new__(cls, (I1, I2))
        obj.real = real
        return obj

    @property
    def I1(self) -> float:
        return self[0]

    @property
    def I2(self) -> float:
        return self[1]


def quadratic_coeffs(params: ModelParams) -> QuadraticCoeffs:
    b, beta, alpha, beta2, alpha2 = params.b, params.beta, params.alpha, params.beta2, params.alpha2
    m, gamma = params.m, params.gamma
    pd = params.p * params.delta
    A = alpha2 * (beta * (gamma + b * m) + alpha * b * (pd + gamma))
    B_terms = (beta * gamma, beta * beta2, beta * b * m, -beta * b * m * alpha2,
               b * alpha * (pd + gamma + beta2), b * alpha2 * (pd + gamma))
    B = beta * (gamma + beta2 + b * m * (1.0 - alpha2)) + b * alpha * (pd + gamma + beta2) \
        + b * alpha2 * (pd + gamma)
    K = pd + gamma + beta2
    C = b * (K - beta * m)
    return QuadraticCoeffs(A, B, C, max(abs(t) for t in B_terms), b * max(K, beta * m))


def endemic_roots(coeffs: QuadraticCoeffs) -> EndemicRoots:
    A, B, C = coeffs.A, coeffs.B, coeffs.C
    if coeffs.discriminant_sign() == 0:
        tangent = -B / (2.0 * A)
        return EndemicRoots(tangent, tangent, True)
    roots = quadratic_roots(A, B, C)
    if roots is None:
        return EndemicRoots(-B / (2.0 * A), -B / (2.0 * A), False)
    return EndemicRoots(roots[0], roots[1], True)


def s_of_i(params: ModelParams, I: float) -> float:
    """Susceptible coordinate of the endemic equilibrium with infected level ``I``."""
    pd = params.p * params.delta
    return (1.0 + params.alpha * I) / params.beta * (
        pd + params.gamma + params.beta2 / (1.0 + params.alpha2 * I))


@dataclass(frozen=True)
class Thresholds:
    r0: float
    r0_star: float
    P1: float
    R0_plus: float | None
    R0_minus: float | None
    radicand_negative: bool
    alpha2_0: float | None
    g_alpha2: float | None
    region: Region
    above_R0_plus: bool | None = None
    above_P1: bool | None = None

    def to_dict(self) -> dict:
        return {
            "r0": self.r0,
            "r0_star": self.r0_star,
            "P1": self.P1,
            "R0_plus": self.R0_plus,
            "R0_minus": self.R0_minus,
            "alpha2_0": self.alpha2_0,
            "g_alpha2": self.g_alpha2,
            "region": self.region.value,
        }


def r0_at_threshold(params: ModelParams) -> bool:
    """r0 == 1 within the zero band."""
    K = params.p * params.delta + params.gamma + params.beta2
    return is_zero(params.beta * params.m - K, K, params.beta * params.m)


def _r0_star_sign(params: ModelParams) -> int:
    K0 = params.p * params.delta + params.gamma
    return band_sign(params.beta * params.m - K0, K0, params.beta * params.m)


def alpha2_zero(params: ModelParams) -> float | None:
    """Treatment saturation above which backward bifurcation becomes possible."""
    b, beta, m, alpha = params.b, params.beta, params.m, params.alpha
    den = b * (params.p * params.delta + params.gamma - beta * m)
    if den == 0.0:
        return None
    return -beta * (m * b * alpha + params.gamma + b * m) / den


def g_curve(params: ModelParams, alpha2: float | None = None) -> float:
    """The boundary curve beta2 = g(alpha2) separating A2 from A3."""
    b, beta, m = params.b, params.beta, params.m
    a2 = params.alpha2 if alpha2 is None else alpha2
    return -(b * a2 * (params.p * params.delta + params.gamma - beta * m)
             + beta * (params.gamma + b * m + m * b * params.alpha)) / beta


def _g_terms(params: ModelParams) -> tuple:
    b, beta, m = params.b, params.beta, params.m
    return (params.beta2, b * params.alpha2 * (params.p * params.delta + params.gamma) / beta,
            b * params.alpha2 * m, params.gamma, b * m, m * b * params.alpha)


def classify_region(params: ModelParams) -> Region:
    if _r0_star_sign(params) <= 0:
        return Region.NOT_APPLICABLE
    a20 = alpha2_zero(params)
    if params.alpha2 <= a20 or is_zero(params.alpha2 - a20, a20):
        return Region.A1
    g = g_curve(params)
    if params.beta2 >= g or is_zero(params.beta2 - g, *_g_terms(params)):
        return Region.A2
    return Region.A3


def thresholds(params: ModelParams) -> Thresholds:
    b, beta, m, alpha, alpha2, beta2, gamma = (params.b, params.beta, params.m, params.alpha,
                                               params.alpha2, params.beta2, params.gamma)
    pd = params.p * params.delta
    K = pd + gamma + beta2
    P1 = 1.0 + (beta * (gamma + beta2 + b * m - b * m * alpha2) + beta * m * b * alpha
                + b * alpha2 * (pd + gamma)) / (b * alpha * K)
    rad1 = -beta * (alpha * (b * m * alpha + beta2 + gamma + b * m - b * m * alpha2)
                    - alpha2 * (gamma + b * m))
    rad2 = alpha2 * (beta * (gamma + b * m) + alpha * b * (pd + gamma))
    if rad1 >= 0.0:
        denom = b * alpha * alpha * K
        R0_plus = 1.0 - (math.sqrt(rad1) - math.sqrt(rad2)) ** 2 / denom
        R0_minus = 1.0 - (math.sqrt(rad1) + math.sqrt(rad2)) ** 2 / denom
    else:
        R0_plus = R0_minus = None
    region = classify_region(params)
    r0_value = r0(params)
    above_plus = above_p1 = None
    if region is Region.A3:
        above_plus, above_p1 = _a3_flags(params, r0_value, R0_plus, R0_minus)
    return Thresholds(
        r0=r0_value,
        r0_star=r0_star(params),
        P1=P1,
        R0_plus=R0_plus,
        R0_minus=R0_minus,
        radicand_negative=rad1 < 0.0,
        alpha2_0=alpha2_zero(params),
        g_alpha2=g_curve(params),
        region=region,
        above_R0_plus=above_plus,
        above_P1=above_p1,
    )


def _a3_flags(params, r0_value, R0_plus, R0_minus):
    # Side of r0 = P1 is the sign of -B.  Side of r0 = R0+ follows from the sign of the
    # discriminant (a quadratic in r0 with roots R0- < R0+), which keeps these flags
    # consistent with the equilibrium count.
    coeffs = quadratic_coeffs(params)
    b_sign = coeffs.B_sign()
    above_p1 = None if b_sign == 0 else b_sign < 0
    d_sign = coeffs.discriminant_sign()
    if R0_plus is None:
        # no real root in r0: the discriminant is positive everywhere
        above_plus = True
    else:
        upper_half = r0_value > 0.5 * (R0_plus + R0_minus)
        if d_sign < 0:
            above_plus = False
        elif d_sign == 0:
            above_plus = None if upper_half else False
        else:
            above_plus = upper_half
    return above_plus, above_p1


@dataclass(frozen=True)
class A3Subregion:
    """Membership flags for the four subsets of A3 cut out by r0 = R0+ and r0 = P1."""

    below_R0_plus: bool
    above_R0_plus: bool
    below_P1: bool
    above_P1: bool

    @property
    def names(self) -> tuple[str, ...]:
        flags = (self.below_R0_plus, self.above_R0_plus, self.below_P1, self.above_P1)
        return tuple(f"A3^{i}" for i, flag in enumerate(flags, 1) if flag)

    @property
    def label(self) -> str:
        return "&".join(self.names)


def a3_subregion(params: ModelParams) -> A3Subregion:
    """Classify an A3 point; a point on r0 = P1 or r0 = R0+ belongs to neither side."""
    th = thresholds(params)
    if th.region is not Region.A3:
        raise InvalidRegion(f"parameters lie in {th.region.value}, not A3")
    above_plus, above_p1 = th.above_R0_plus, th.above_P1
    return A3Subregion(
        below_R0_plus=above_plus is False,
        above_R0_plus=above_plus is True,
        below_P1=above_p1 is False,
        above_P1=above_p1 is True,
    )


@dataclass(frozen=True)
class EquilibriumReport:
    dfe: StateSI
    e1: StateSI | None
    e2: StateSI | None
    case: ExistenceCase
    rule: str
    coeffs: QuadraticCoeffs
    thresholds: Thresholds

    @property
    def endemic(self) -> list[StateSI]:
        if self.e1 is not None and self.e1 == self.e2:
            return [self.e2]
        return [e for e in (self.e1, self.e2) if e is not None]

    def to_dict(self) -> dict:
        out = self.thresholds.to_dict()
        out["case"] = self.case.value
        out["dfe"] = list(self.dfe)
        out["e1"] = None if self.e1 is None else list(self.e1)
        out["e2"] = None if self.e2 is None else list(self.e2)
        return out


def _endemic_state(params, I):
    return StateSI(s_of_i(params, I), I)


def equilibrium_report(params: ModelParams) -> EquilibriumReport:
    coeffs = quadratic_coeffs(params)
    th = thresholds(params)
    dfe = StateSI(params.m, 0.0)

    def report(case, rule, e1=None, e2=None):
        return EquilibriumReport(dfe, e1, e2, case, rule, coeffs, th)

    c_sign = coeffs.C_sign()
    if c_sign < 0:
        roots = endemic_roots(coeffs)
        return report(ExistenceCase.UNIQUE_ABOVE_THRESHOLD, "r0>1",
                      e2=_endemic_state(params, roots.I2))
    if th.region is Region.NOT_APPLICABLE:
        return report(ExistenceCase.NONE, "r0*<=1")
    b_sign = coeffs.B_sign()
    if c_sign == 0:
        if b_sign < 0:
            return report(ExistenceCase.UNIQUE_AT_THRESHOLD, "r0=1,B<0",
                          e2=_endemic_state(params, -coeffs.B / coeffs.A))
        return report(ExistenceCase.NONE, "r0=1,B>=0")
    if b_sign == 0:
        return report(ExistenceCase.NONE, "r0=P1")
    if b_sign > 0:
        return report(ExistenceCase.NONE, "r0<P1" if th.region is Region.A3 else "A1|A2,r0<1")
    d_sign = coeffs.discriminant_sign()
    if d_sign < 0:
        return report(ExistenceCase.NONE, "R0-<r0<R0+")
    roots = endemic_roots(coeffs)
    if d_sign == 0:
        tangent = _endemic_state(params, roots.I2)
        return report(ExistenceCase.TANGENT, "r0=R0+>P1", e1=tangent, e2=tangent)
    return report(ExistenceCase.TWO_ENDEMIC, "max(P1,R0+)<r0<1",
                  e1=_endemic_state(params, roots.I1), e2=_endemic_state(params, roots.I2))


def bifurcation_type(params: ModelParams) -> BifurcationType:
    """Direction of the bifurcation at r0 = 1 with beta2 as the bifurcation parameter."""
    if _r0_star_sign(params) <= 0:
        return BifurcationType.NOT_APPLICABLE
    critical = params.beta * params.m - params.p * params.delta - params.gamma
    region = classify_region(params.replace(beta2=critical))
    return BifurcationType.BACKWARD if region is Region.A3 else BifurcationType.FORWARD


def critical_beta2(params: ModelParams) -> float:
    """The beta2 at which r0 = 1 (positive only when r0* > 1)."""
    return params.beta * params.m - params.p * params.delta - params.gamma
