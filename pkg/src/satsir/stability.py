"""Local and global stability of the disease-free and endemic equilibria.

Every analytic indicator (W, U, F, s, H) has a numerical twin: eigenvalues
come from :func:`satsir.numerics.char_roots` applied to the Jacobian, so the
long closed-form expressions can be audited against it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .equilibria import (
    EquilibriumReport,
    ExistenceCase,
    QuadraticCoeffs,
    Region,
    equilibrium_report,
    g_curve,
    quadratic_coeffs,
    r0_at_threshold,
)
from .model import ModelParams, jacobian, vector_field
from .numerics import band_sign, char_roots, eig2, is_zero, quadratic_roots


class DFEClass(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    SADDLE_AT_THRESHOLD = "SaddleAtR0eq1"
    DEGENERATE = "Degenerate"


class EndemicClass(str, enum.Enum):
    SADDLE = "Saddle"
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    HOPF_CANDIDATE = "HopfCandidate"
    DEGENERATE = "Degenerate"


class NoE2(ValueError):
    pass


class NoSuchEquilibrium(ValueError):
    pass


class NotAtThreshold(ValueError):
    pass


@dataclass(frozen=True)
class CharPolyQuantities:
    C_I: float
    C_S: float
    D_I: float
    W: float
    U: float
    W_scale: float
    U_scale: float

    def eigenvalues(self) -> tuple[complex, complex]:
        return char_roots(self.W, self.U)

    def W_sign(self) -> int:
        return band_sign(self.W, self.W_scale)

    def U_sign(self) -> int:
        return band_sign(self.U, self.U_scale)


def char_poly(params: ModelParams, state) -> CharPolyQuantities:
    """Coefficients of ``lam^2 + W lam + U`` at ``state``."""
    S, I = state
    b, gamma = params.b, params.gamma
    pd = params.p * params.delta
    den = 1.0 + params.alpha * I
    C_I = params.beta * I / den
    C_S = params.beta * S / (den * den)
    D_I = params.beta2 / (1.0 + params.alpha2 * I) ** 2
    W_terms = (C_I, b, C_S, pd, gamma, D_I)
    U_terms = (C_I * gamma, C_I * D_I, b * C_S, b * pd, b * gamma, b * D_I, C_I * b * params.m)
    W = C_I + b - C_S + pd + gamma + D_I
    U = C_I * gamma + C_I * D_I - b * C_S + b * pd + b * gamma + b * D_I + C_I * b * params.m
    return CharPolyQuantities(C_I, C_S, D_I, W, U,
                              max(abs(t) for t in W_terms), max(abs(t) for t in U_terms))


def eigenvalues(params: ModelParams, state) -> tuple[complex, complex]:
    return eig2(jacobian(params, state))


def routh_hurwitz(W: float, U: float, W_scale: float = 0.0, U_scale: float = 0.0) -> str:
    """Planar Routh-Hurwitz verdict: 'stable', 'unstable', 'saddle' or 'degenerate'."""
    u = band_sign(U, U_scale)
    w = band_sign(W, W_scale)
    if u < 0:
        return "saddle"
    if u == 0 or w == 0:
        return "degenerate"
    return "stable" if w > 0 else "unstable"


@dataclass(frozen=True)
class DFEVerdict:
    local: DFEClass
    global_certificate: bool
    W: float
    U: float
    eigenvalues: tuple[complex, complex]


def classify_dfe(params: ModelParams, report: EquilibriumReport | None = None) -> DFEVerdict:
    report = report or equilibrium_report(params)
    th = report.thresholds
    cp = char_poly(params, report.dfe)
    eigs = (complex(-params.b), complex(params.beta * params.m - params.p * params.delta
                                        - params.gamma - params.beta2))
    c_sign = report.coeffs.C_sign()
    if c_sign == 0:
        on_g = is_zero(params.beta2 - g_curve(params), params.beta2, g_curve(params))
        local = DFEClass.DEGENERATE if on_g else DFEClass.SADDLE_AT_THRESHOLD
    else:
        local = DFEClass.STABLE if c_sign > 0 else DFEClass.UNSTABLE
    certificate = False
    if local is DFEClass.STABLE:
        if th.region in (Region.NOT_APPLICABLE, Region.A1, Region.A2):
            certificate = True
        elif report.rule == "r0=P1":
            certificate = True
        else:
            # A3 with r0 < max(R0+, P1): exactly the A3 cases without endemic equilibria
            certificate = report.case is ExistenceCase.NONE
    return DFEVerdict(local, certificate, cp.W, cp.U, eigs)


@dataclass(frozen=True)
class SaddleIndicator:
    """``F(I) = a1_F I^2 + b1_F I + c1_F`` whose sign equals the sign of U at an endemic state."""

    a1_F: float
    b1_F: float
    c1_F: float
    I_star: float | None
    I_star_star: float | None

    def F(self, I: float) -> float:
        return (self.a1_F * I + self.b1_F) * I + self.c1_F


def saddle_indicator(params: ModelParams, coeffs: QuadraticCoeffs | None = None) -> SaddleIndicator:
    coeffs = coeffs or quadratic_coeffs(params)
    a1 = params.alpha2 * coeffs.A
    b1 = 2.0 * coeffs.A
    c1 = coeffs.B - params.alpha2 * coeffs.C
    roots = quadratic_roots(a1, b1, c1)
    if roots is None:
        return SaddleIndicator(a1, b1, c1, None, None)
    return SaddleIndicator(a1, b1, c1, roots[1], roots[0])


@dataclass(frozen=True)
class SIndicator:
    r: float
    m1: float
    m2: float
    s: float
    scale: float

    def sign(self) -> int:
        return band_sign(self.s, self.scale)


def _s_parts(params: ModelParams, coeffs: QuadraticCoeffs):
    A, B, C = coeffs.A, coeffs.B, coeffs.C
    a2, alpha, beta2, b = params.alpha2, params.alpha, params.beta2, params.b
    r = alpha * (params.p * params.delta + b + params.gamma) + params.beta
    m1_terms = ((r + beta2 * alpha - beta2 * a2 + 2.0 * b * a2) * A * A,
                -a2 * a2 * r * A * C,
                -A * B * a2 * (b * a2 + 2.0 * r),
                B * B * a2 * a2 * r)
    m2_terms = (b * A * A, -A * C * a2 * (b * a2 + 2.0 * r), a2 * a2 * r * B * C)
    return r, m1_terms, m2_terms


def s_indicator(params: ModelParams, coeffs: QuadraticCoeffs | None = None) -> SIndicator:
    """Sign surrogate for W at E2: ``sign(s) == sign(W(E2))``.

    ``m1 I + m2`` (over A^2) is the remainder of the numerator of W, a cubic in I,
    after division by ``A I^2 + B I + C``.
    """
    coeffs = coeffs or quadratic_coeffs(params)
    disc = coeffs.discriminant
    d_sign = coeffs.discriminant_sign()
    if d_sign < 0:
        raise NoE2("discriminant is negative: E2 does not exist")
    root = math.sqrt(disc) if d_sign > 0 else 0.0
    r, m1_terms, m2_terms = _s_parts(params, coeffs)
    m1 = sum(m1_terms)
    m2 = sum(m2_terms)
    A, B = coeffs.A, coeffs.B
    s = m1 * (-B + root) + 2.0 * A * m2
    scale = max(max(abs(t) for t in m1_terms) * (abs(B) + root),
                2.0 * A * max(abs(t) for t in m2_terms))
    return SIndicator(r, m1, m2, s, scale)


def s_indicator_printed(params: ModelParams, coeffs: QuadraticCoeffs | None = None) -> float:
    """``s`` with m1 transcribed literally from the published display (audit only).

    That display carries ``2 B alpha2`` for ``2 b alpha2`` and folds ``B^2 alpha2^2 r``
    into the ``A B alpha2`` product; :func:`s_indicator` uses the exact remainder.
    """
    coeffs = coeffs or quadratic_coeffs(params)
    A, B, C = coeffs.A, coeffs.B, coeffs.C
    a2, alpha, beta2, b = params.alpha2, params.alpha, params.beta2, params.b
    r = alpha * (params.p * params.delta + b + params.gamma) + params.beta
    m1 = ((r + beta2 * alpha - beta2 * a2 + 2.0 * B * a2) * A * A - a2 * a2 * r * A * C
          - A * B * a2 * (b * a2 + 2.0 * r + B * B * a2 * a2 * r))
    m2 = b * A * A - A * C * a2 * (b * a2 + 2.0 * r) + a2 * a2 * r * B * C
    return m1 * (-B + math.sqrt(max(coeffs.discriminant, 0.0))) + 2.0 * A * m2


@dataclass(frozen=True)
class EndemicVerdict:
    which: str
    state: tuple
    cls: EndemicClass
    W: float
    U: float
    eigenvalues: tuple[complex, complex]
    I_star: float | None
    s: float | None = None

    def to_dict(self) -> dict:
        return {
            "equilibrium": self.which,
            "class": self.cls.value,
            "W": self.W,
            "U": self.U,
            "s": self.s,
            "H": None,
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
        }


def classify_endemic(params: ModelParams, which: str = "E2",
                     report: EquilibriumReport | None = None) -> EndemicVerdict:
    report = report or equilibrium_report(params)
    state = {"E1": report.e1, "E2": report.e2}.get(which)
    if which not in ("E1", "E2"):
        raise ValueError(f"which must be 'E1' or 'E2', got {which!r}")
    if state is None:
        raise NoSuchEquilibrium(f"{which} does not exist for these parameters ({report.case.value})")
    coeffs = report.coeffs
    cp = char_poly(params, state)
    eigs = cp.eigenvalues()
    ind = saddle_indicator(params, coeffs)
    if report.case is ExistenceCase.TANGENT:
        return EndemicVerdict(which, state, EndemicClass.DEGENERATE, cp.W, cp.U, eigs, ind.I_star)
    if which == "E1":
        return EndemicVerdict(which, state, EndemicClass.SADDLE, cp.W, cp.U, eigs, ind.I_star)
    I2 = state.I
    i_star = ind.I_star
    # F > 0 on I > 0 when it has no real root, so U(E2) > 0 automatically
    if i_star is not None and is_zero(I2 - i_star, I2, i_star):
        return EndemicVerdict(which, state, EndemicClass.DEGENERATE, cp.W, cp.U, eigs, i_star)
    if i_star is not None and I2 < i_star:
        return EndemicVerdict(which, state, EndemicClass.UNSTABLE, cp.W, cp.U, eigs, i_star)
    si = s_indicator(params, coeffs)
    cls = {1: EndemicClass.STABLE, -1: EndemicClass.UNSTABLE, 0: EndemicClass.HOPF_CANDIDATE}[si.sign()]
    return EndemicVerdict(which, state, cls, cp.W, cp.U, eigs, i_star, si.s)


@dataclass(frozen=True)
class CenterManifoldData:
    """Flow ``v' = H v^2 + O(v^3)`` on the centre manifold ``u = a0 v^2 + a1 v^3 + O(v^4)``."""

    H: float
    a0: float
    a1: float
    a1_printed: float
    shear: float = field(repr=False)

    def phi(self, v: float) -> float:
        return (self.a0 + self.a1 * v) * v * v

    def dphi(self, v: float) -> float:
        return (2.0 * self.a0 + 3.0 * self.a1 * v) * v


def center_manifold(params: ModelParams) -> CenterManifoldData:
    """Centre-manifold coefficients of the DFE at r0 = 1.

    Coordinates: ``I = v`` and ``S = m + u - k v`` with ``k = (gamma + beta2 + b m) / b``,
    so that u is the stable direction (eigenvalue -b) and v the centre direction.
    """
    if not r0_at_threshold(params):
        raise NotAtThreshold("center manifold analysis requires r0 = 1")
    b, beta, m, gamma, a2, alpha = (params.b, params.beta, params.m, params.gamma,
                                    params.alpha2, params.alpha)
    pd = params.p * params.delta
    H = -(b**3 * beta * m + b**2 * beta**2 * m + b**3 * gamma * a2 - b**2 * beta * pd
          + b**3 * alpha * beta * m + b**3 * pd * a2 - b**3 * beta * m * a2) / b**3
    a0 = -(b**2 * m**2 * beta + beta * b * pd - b**2 * alpha * beta * m + b**2 * m * pd * a2
           - gamma * b * pd * a2 + gamma * beta * b * m * a2 - 2 * beta * b * m * pd
           - beta * b**2 * m + 2 * beta**2 * b * m**2 - beta**2 * b * m + beta * pd**2
           + 2 * beta * b * m * a2 * pd - b * pd * alpha * beta * m + beta**3 * m**2
           - b * pd**2 * a2 - b**2 * m**2 * beta * a2 - 2 * beta**2 * m * pd
           + b**2 * m * gamma * a2 + b * alpha * beta**2 * m**2 + b**2 * m**2 * alpha * beta
           - beta**2 * b * m**2 * a2) / b**3
    # every term of the cubic coefficient except the one in a1 itself
    common = (alpha * beta**3 * m**2 - a0 * beta * b**2 - 2 * b * pd * alpha * beta * m
              - b * pd**2 * a2**2 + m * b**2 * gamma * a2**2 - b**2 * m**2 * beta * a2**2
              - b**2 * alpha * beta * m - b**2 * alpha**2 * beta * m - alpha * beta**2 * b * m
              + b * alpha**2 * beta**2 * m**2 + b**2 * m**2 * alpha**2 * beta
              + alpha * beta * pd**2 + 3 * a0 * beta * b**2 * m + 3 * a0 * b * beta**2 * m
              + 2 * a0 * b**2 * gamma * a2 + 2 * a0 * b**2 * pd * a2
              - 2 * a0 * beta * b**2 * m * a2 - 3 * a0 * b * beta * pd
              + 2 * a0 * b**2 * alpha * beta * m - 2 * alpha * beta**2 * m * pd
              + alpha * beta * b * pd + b**2 * m * pd * a2**2 + b * gamma * a2**2 * beta * m
              - b * gamma * pd * a2**2 + 2 * beta * b * m * a2**2 * pd
              - b * pd * alpha**2 * beta * m + b**2 * m**2 * alpha * beta
              + 2 * b * alpha * beta**2 * m**2)
    a1 = (common - beta**2 * b * m**2 * a2**2) / b**3
    a1_printed = (common - beta**2 * b * m**2 * a2) / b**3
    shear = (gamma + params.beta2 + b * m) / b
    return CenterManifoldData(H, a0, a1, a1_printed, shear)


def annihilator(params: ModelParams, cm: CenterManifoldData, v: float, a1: float | None = None) -> float:
    """Residual ``phi'(v) f(v, phi) + b phi - g(v, phi)`` of the invariance equation.

    f and g are the nonlinear parts of the flow in centre/stable coordinates,
    evaluated directly from the vector field.  Pass ``a1`` to test another
    cubic coefficient (e.g. ``cm.a1_printed``).
    """
    a1 = cm.a1 if a1 is None else a1
    u = (cm.a0 + a1 * v) * v * v
    du_dv = (2.0 * cm.a0 + 3.0 * a1 * v) * v
    dS, dI = vector_field(params, (params.m + u - cm.shear * v, v))
    u_dot = dS + cm.shear * dI
    return du_dv * dI - u_dot


@dataclass(frozen=True)
class StabilityVerdict:
    equilibrium: str
    cls: str
    W: float
    U: float
    eigenvalues: tuple[complex, complex]
    s: float | None = None
    H: float | None = None
    a2_bar: float | None = None

    def to_dict(self) -> dict:
        return {
            "equilibrium": self.equilibrium,
            "class": self.cls,
            "W": self.W,
            "U": self.U,
            "s": self.s,
            "H": self.H,
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
        }


def stability_verdicts(params: ModelParams, report: EquilibriumReport | None = None) -> list[StabilityVerdict]:
    """One verdict per existing equilibrium, DFE first."""
    report = report or equilibrium_report(params)
    dfe = classify_dfe(params, report)
    H = center_manifold(params).H if report.coeffs.C_sign() == 0 else None
    out = [StabilityVerdict("DFE", dfe.local.value, dfe.W, dfe.U, dfe.eigenvalues, H=H)]
    names = ["E1", "E2"]
    if report.case is ExistenceCase.TANGENT:
        names = ["E2"]
    for name in names:
        if getattr(report, name.lower()) is None:
            continue
        v = classify_endemic(params, name, report)
        out.append(StabilityVerdict(name, v.cls.value, v.W, v.U, v.eigenvalues, s=v.s))
    return out
