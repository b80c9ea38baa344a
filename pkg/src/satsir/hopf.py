"""Hopf bifurcation of the upper endemic equilibrium E2.

The first Lyapunov quantity is obtained by shifting E2 to the origin,
rotating the linear part to ``[[0, L], [-L, 0]]`` and differentiating the
remaining nonlinear terms H1, H2 numerically.  The long printed expressions
for H1 and H2 are kept as :func:`printed_rotation_terms` for auditing.
"""

from __future__ import annotations

import enum
import math
from sys import float_info
from dataclasses import dataclass

from scipy.optimize import brentq

from .equilibria import ExistenceCase, equilibrium_report, quadratic_coeffs
from .model import ModelParams, PARAM_KEYS, vector_field
from .numerics import is_zero
from .stability import char_poly, s_indicator, saddle_indicator

FD_STEPS = (1e-3, 5e-4, 2.5e-4)


class EquilibriumResidualTooLarge(ValueError):
    pass


class NotAtHopfPoint(ValueError):
    pass


class DerivativeIllConditioned(ArithmeticError):
    pass


class TransversalityFailed(ArithmeticError):
    pass


class NotFound(LookupError):
    pass


class LostEquilibrium(LookupError):
    pass


class CyclePrediction(str, enum.Enum):
    STABLE = "StableOrbit"
    UNSTABLE = "UnstableOrbit"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ShiftedSystem:
    """Polynomial numerators of the flow in ``x = S - S2``, ``y = I - I2``.

    ``x' = (a11 x + a12 y + c1 xy + c2 y^2 + c7) / (1 + alpha (I2 + y))``
    ``y' = (a21 x + a22 y + c3 xy + c4 xy^2 + c5 y^2 + c6 y^3 + c8)
           / ((1 + alpha (I2 + y)) (1 + alpha2 (I2 + y)))``
    """

    S2: float
    I2: float
    alpha: float
    alpha2: float
    a11: float
    a12: float
    a21: float
    a22: float
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    c7: float
    c8: float

    @property
    def u1(self) -> float:
        return 1.0 + self.alpha * self.I2

    @property
    def u2(self) -> float:
        return 1.0 + self.alpha2 * self.I2

    def linear_part(self):
        u1, u2 = self.u1, self.u2
        return ((self.a11 / u1, self.a12 / u1),
                (self.a21 / (u1 * u2), self.a22 / (u1 * u2)))

    def field(self, x: float, y: float) -> tuple[float, float]:
        d1 = 1.0 + self.alpha * (self.I2 + y)
        d2 = 1.0 + self.alpha2 * (self.I2 + y)
        n1 = self.a11 * x + self.a12 * y + self.c1 * x * y + self.c2 * y * y + self.c7
        n2 = (self.a21 * x + self.a22 * y + self.c3 * x * y + self.c4 * x * y * y
              + self.c5 * y * y + self.c6 * y ** 3 + self.c8)
        return n1 / d1, n2 / (d1 * d2)


def shifted_system(params: ModelParams, e2, check: bool = True) -> ShiftedSystem:
    S2, I2 = e2
    b, beta, alpha, a2, beta2 = params.b, params.beta, params.alpha, params.alpha2, params.beta2
    m, pd = params.m, params.p * params.delta
    K = pd + params.gamma
    u1, u2 = 1.0 + alpha * I2, 1.0 + a2 * I2
    lin_s = -b * S2 + b * m * (1.0 - I2) + pd * I2
    a11 = -beta * I2 - b * u1
    a12 = -beta * S2 + (pd - b * m) * u1 + alpha * lin_s
    c1 = -beta - b * alpha
    c2 = alpha * (pd - b * m)
    c7 = -beta * S2 * I2 + lin_s * u1
    mix = alpha * u2 + a2 * u1
    a21 = beta * I2 * u2
    a22 = beta * S2 * (u2 + a2 * I2) - K * (u1 * u2 + I2 * mix) - beta2 * (u1 + alpha * I2)
    c3 = beta * (u2 + a2 * I2)
    c4 = beta * a2
    c5 = beta * S2 * a2 - K * (mix + I2 * alpha * a2) - beta2 * alpha
    c6 = -K * alpha * a2
    c8 = I2 * (beta * S2 * u2 - K * u1 * u2 - beta2 * u1)
    sys = ShiftedSystem(S2, I2, alpha, a2, a11, a12, a21, a22, c1, c2, c3, c4, c5, c6, c7, c8)
    if check:
        scale7 = max(abs(beta * S2 * I2), abs(lin_s * u1), b * m * u1)
        scale8 = I2 * max(abs(beta * S2 * u2), K * u1 * u2, beta2 * u1)
        if abs(c7) > 1e-9 * scale7 or abs(c8) > 1e-9 * scale8:
            raise EquilibriumResidualTooLarge(
                f"E2 residuals c7={c7:.3e}, c8={c8:.3e} exceed the tolerance")
    return sys


def rotation_frequency(sys: ShiftedSystem) -> float:
    (j11, j12), (j21, j22) = sys.linear_part()
    det = j11 * j22 - j12 * j21
    if det <= 0.0:
        raise NotAtHopfPoint(f"det of the linear part is {det:.3e}; no rotation frequency")
    return math.sqrt(det)


def to_rotation_coords(sys: ShiftedSystem, lam: float, x: float, y: float) -> tuple[float, float]:
    return x, (sys.a11 * x + sys.a12 * y) / (lam * sys.u1)


def from_rotation_coords(sys: ShiftedSystem, lam: float, u: float, v: float) -> tuple[float, float]:
    return u, (lam * sys.u1 * v - sys.a11 * u) / sys.a12


def rotation_terms(sys: ShiftedSystem, lam: float):
    """Return ``(H1, H2)`` as callables of ``(u, v)``, built by composing the maps."""

    def H1(u, v):
        x, y = from_rotation_coords(sys, lam, u, v)
        dx, _ = sys.field(x, y)
        return dx - lam * v

    def H2(u, v):
        x, y = from_rotation_coords(sys, lam, u, v)
        dx, dy = sys.field(x, y)
        return (sys.a11 * dx + sys.a12 * dy) / (lam * sys.u1) + lam * u

    return H1, H2


def printed_rotation_terms(sys: ShiftedSystem, lam: float, restore_a3: bool = False):
    """H1 and H2 transcribed from the closed forms with A1..A5 and h (audit path).

    The published A3 bracket lacks ``-a12 c5`` and ``-a11 c2 alpha alpha2^2 I2^3``;
    ``restore_a3=True`` adds them back, which makes H2 agree with :func:`rotation_terms`.
    """
    a11, a12, a21, a22 = sys.a11, sys.a12, sys.a21, sys.a22
    c1, c2, c3, c4, c5, c6 = sys.c1, sys.c2, sys.c3, sys.c4, sys.c5, sys.c6
    al, a2, I2, L = sys.alpha, sys.alpha2, sys.I2, lam
    u1 = 1.0 + al * I2

    A1 = L**2 * u1**2 * (
        -a12 * c6 * a2 * I2**2 * al - a11 * c2 * al * I2**2 * a2**2 - a11 * c2 * al * I2 * a2
        - a12 * c6 * al * I2 + a11 * a12 * al * a2**2 * I2 + a11 * a12 * al * a2
        + a12 * a22 * al * a2 - a11 * c2 * a2**2 * I2 - a12 * c6 * a2 * I2 - a11 * c2 * a2
        - a12 * c6)
    A2 = -L * u1 * (
        a11 * a12 * c1 * a2**2 * al * I2**2 + a12**2 * c4 * a2 * I2**2 * al
        - 2 * a12 * a11 * c6 * a2 * I2**2 * al - 2 * c2 * al * I2**2 * a2**2 * a11**2
        + a12 * al * a2**2 * a11**2 * I2 - 2 * a12 * a11 * c6 * al * I2
        - 2 * c2 * al * I2 * a2 * a11**2 + a12**2 * c4 * al * I2
        + a11 * a12 * c1 * a2 * al * I2 + a11 * a12 * c1 * a2**2 * I2 + a12**2 * c4 * a2 * I2
        - 2 * a12 * a11 * c6 * a2 * I2 - 2 * a11**2 * c2 * a2**2 * I2 + a12**2 * c4
        - 2 * a11**2 * c2 * a2 - 2 * a12 * a11 * c6 + a11 * a12 * c1 * a2
        + a12 * al * a2 * a11**2 - a12**2 * al * a21 * a2 + 2 * a12 * a11 * a22 * al * a2)
    A3 = L * u1 * a12 * (
        -a12 * c5 * al * I2**2 * a2 + a12 * a11 * al * a2**2 * I2**2 + 2 * a12 * a22 * al * a2 * I2
        + 2 * a12 * a11 * al * a2 * I2 - a12 * c5 * al * I2 + a12 * a22 * al + a11 * a12 * al
        - a12 * c5 * a2 * I2 + a12 * a22 * a2 - 2 * a11 * c2 * al * I2**2 * a2
        - a11 * c2 * al * I2 - a11 * c2 - a11 * c2 * a2**2 * I2**2 - 2 * a11 * c2 * a2 * I2
        - restore_a3 * (a12 * c5 + a11 * c2 * al * a2**2 * I2**3))
    A4 = -a11 * (
        -a12**2 * c4 * a2 * I2 - a11 * a12 * c1 * a2 * al * I2 + c2 * al * I2 * a2 * a11**2
        - a12**2 * c4 * a2 * I2**2 * al - a12**2 * c4 * al * I2 - a12**2 * c4
        + a12**2 * al * a21 * a2 - a12 * a11 * a22 * al * a2
        - a11 * a12 * c1 * a2**2 * al * I2**2 + a12 * a11 * c6 + a11**2 * c2 * a2**2 * I2
        + a12 * a11 * c6 * a2 * I2**2 * al + a11**2 * c2 * a2 - a11 * a12 * c1 * a2
        + a12 * a11 * c6 * a2 * I2 + a12 * a11 * c6 * al * I2
        + c2 * al * I2**2 * a2**2 * a11**2 - a11 * a12 * c1 * a2**2 * I2)
    A5 = a12 * (
        2 * a11**2 * c2 * a2 * I2 + a11**2 * c2 * al * I2 + a12**2 * al * a21
        + a11**2 * c2 * a2**2 * I2**2 - a12 * a11 * a22 * a2 - a12 * a11 * a22 * al
        - a12**2 * c3 * a2 * I2 - a12**2 * c3 * al * I2 + a11 * a12 * c5 + a12**2 * a2 * a21
        - a12 * a11 * c1 + 2 * a12**2 * al * a21 * a2 * I2 - a12 * a11 * c1 * a2**2 * I2**2
        - a12 * a11 * c1 * al * I2 - 2 * a12 * a11 * c1 * a2 * I2 + a11 * a12 * c5 * a2 * I2
        + a11 * a12 * c5 * al * I2 - a12**2 * c3 * al * I2**2 * a2 - a12**2 * c3
        + a11 * a12 * c5 * al * I2**2 * a2 - 2 * a12 * a11 * a22 * al * a2 * I2
        - 2 * a12 * a11 * c1 * al * I2**2 * a2 - a12 * a11 * c1 * al * I2**3 * a2**2
        + 2 * a11**2 * c2 * al * I2**2 * a2 + a11**2 * c2 * al * I2**3 * a2**2 + a11**2 * c2)

    def h(u, v):
        return (L * u1**2 * a12
                * ((al * L + L * al**2 * I2) * v + a12 - al * a11 * u + a12 * al * I2)
                * ((a2 * L + a2 * L * al * I2) * v + a12 - a2 * a11 * u + a2 * I2 * a12)
                * (1.0 + a2 * I2))

    def H1(u, v):
        num = (((-a12 * c1 + a11 * c2) * u + (-L * c2 * al * I2 + L * a12 * al - L * c2) * v)
               * ((L + L * al * I2) * v - a11 * u))
        den = a12 * ((al * L + L * al**2 * I2) * v + a12 - al * a11 * u + a12 * al * I2)
        return -num / den

    def H2(u, v):
        poly = A1 * v * v + A2 * u * v + A3 * v + A4 * u * u + A5 * u
        return -(L * u1 * v - a11 * u) * poly / h(u, v)

    return H1, H2


def _stencil_derivatives(f, h: float) -> dict:
    """Central differences (second order) of all partials needed for the Lyapunov quantity."""
    F = {}

    def at(i, j):
        key = (i, j)
        if key not in F:
            F[key] = f(i * h, j * h)
        return F[key]

    h2, h3 = h * h, h ** 3
    return {
        "uu": (at(1, 0) - 2 * at(0, 0) + at(-1, 0)) / h2,
        "vv": (at(0, 1) - 2 * at(0, 0) + at(0, -1)) / h2,
        "uv": (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h2),
        "uuu": (at(2, 0) - 2 * at(1, 0) + 2 * at(-1, 0) - at(-2, 0)) / (2 * h3),
        "vvv": (at(0, 2) - 2 * at(0, 1) + 2 * at(0, -1) - at(0, -2)) / (2 * h3),
        "uvv": (at(1, 1) - 2 * at(1, 0) + at(1, -1) - at(-1, 1) + 2 * at(-1, 0) - at(-1, -1)) / (2 * h3),
        "uuv": (at(1, 1) - 2 * at(0, 1) + at(-1, 1) - at(1, -1) + 2 * at(0, -1) - at(-1, -1)) / (2 * h3),
    }


def richardson_derivatives(f, steps=FD_STEPS) -> tuple[dict, dict]:
    """Partials at the origin extrapolated over three halving steps, with error estimates."""
    d = [_stencil_derivatives(f, h) for h in steps]
    best, err = {}, {}
    for k in d[0]:
        r1 = (4.0 * d[1][k] - d[0][k]) / 3.0
        r2 = (4.0 * d[2][k] - d[1][k]) / 3.0
        best[k] = (16.0 * r2 - r1) / 15.0
        err[k] = abs(best[k] - r2)
    return best, err


def lyapunov_combination(d1: dict, d2: dict, lam: float) -> float:
    """Guckenheimer-Holmes combination for ``u' = lam v + H1``, ``v' = -lam u + H2``."""
    cubic = d1["uuu"] + d1["uvv"] + d2["uuv"] + d2["vvv"]
    quad = (d1["uv"] * (d1["uu"] + d1["vv"]) - d2["uv"] * (d2["uu"] + d2["vv"])
            - d1["uu"] * d2["uu"] + d1["vv"] * d2["vv"])
    return cubic / 16.0 + quad / (16.0 * -lam)


@dataclass(frozen=True)
class LyapunovResult:
    a2_bar: float
    error_estimate: float
    Lambda: float
    length_scale: float


def natural_length(sys: ShiftedSystem, lam: float) -> float:
    """Length in (u, v) over which the denominators of the shifted field change by O(1)."""
    dy = math.hypot(sys.a11 / sys.a12, lam * sys.u1 / sys.a12)
    sat = max(sys.alpha / sys.u1, sys.alpha2 / sys.u2)
    return min(1.0, 1.0 / (dy * sat), 1.0 / dy * sys.I2 if sys.I2 > 0 else 1.0)


def lyapunov_coefficient(params: ModelParams, e2=None, *, check_hopf: bool = True,
                         steps=FD_STEPS, rel_tol: float = 1e-4) -> LyapunovResult:
    """First Lyapunov quantity of E2; negative means a family of stable cycles.

    Steps are measured in units of :func:`natural_length` so that the finite
    differences resolve the rational nonlinearity regardless of how close E2
    sits to the boundary I = 0.
    """
    report = equilibrium_report(params)
    e2 = e2 if e2 is not None else report.e2
    if e2 is None:
        raise NotAtHopfPoint("E2 does not exist")
    if check_hopf:
        cp = char_poly(params, e2)
        if cp.U_sign() <= 0 or not is_zero(cp.W, cp.W_scale, band=1e-8):
            raise NotAtHopfPoint(f"W={cp.W:.3e}, U={cp.U:.3e} at E2: not a Hopf point")
    sys = shifted_system(params, e2)
    lam = rotation_frequency(sys)
    L = natural_length(sys, lam)
    H1, H2 = rotation_terms(sys, lam)
    # derivatives in scaled coordinates (u, v) = L (p, q), then undone by powers of L
    d1, e1 = richardson_derivatives(lambda p, q: H1(L * p, L * q), steps)
    d2, e2_ = richardson_derivatives(lambda p, q: H2(L * p, L * q), steps)
    for d, e in ((d1, e1), (d2, e2_)):
        for k in d:
            order = len(k)
            d[k] /= L ** order
            e[k] /= L ** order
    a2 = lyapunov_combination(d1, d2, lam)
    # propagate the extrapolation errors through the combination by perturbation
    worst = 0.0
    for which, err in ((d1, e1), (d2, e2_)):
        for k in which:
            saved = which[k]
            which[k] = saved + err[k]
            worst += abs(lyapunov_combination(d1, d2, lam) - a2)
            which[k] = saved
    scale = max(abs(a2), max(abs(v) for v in d1.values()) * 1e-3, 1e-300)
    if worst > rel_tol * max(abs(a2), 1e-300) and worst > rel_tol * scale:
        raise DerivativeIllConditioned(
            f"extrapolated derivatives disagree: a2_bar={a2:.6e} +/- {worst:.3e}")
    return LyapunovResult(a2, worst, lam, L)


def transversality_printed(params: ModelParams, e2) -> float:
    """The positive closed form ``1 / (4 A^3 (1 + alpha I)(1 + alpha2 I)^2)`` (magnitude only)."""
    A = quadratic_coeffs(params).A
    I = e2[1]
    return 1.0 / (4.0 * A ** 3 * (1.0 + params.alpha * I) * (1.0 + params.alpha2 * I) ** 2)


def transversality_analytic(params: ModelParams, e2) -> float:
    """``dRe(lam)/ds`` from ``Re(lam) = -W/2`` and ``W = s / (2 A^3 (1+alpha I)(1+alpha2 I)^2)``."""
    return -transversality_printed(params, e2)


def _re_lambda(params: ModelParams) -> tuple[float, float]:
    rep = equilibrium_report(params)
    if rep.e2 is None:
        raise LostEquilibrium("E2 disappeared under perturbation")
    cp = char_poly(params, rep.e2)
    return -0.5 * cp.W, s_indicator(params, rep.coeffs).s


@dataclass(frozen=True)
class Transversality:
    analytic: float
    printed: float
    fd_dre_dparam: float
    fd_dre_ds: float


def transversality(params: ModelParams, e2=None, parameter: str = "beta2",
                   rel_step: float = 1e-6) -> Transversality:
    """Check that Re(lam) crosses zero with nonzero speed as ``parameter`` moves."""
    e2 = e2 if e2 is not None else equilibrium_report(params).e2
    if e2 is None:
        raise NotAtHopfPoint("E2 does not exist")
    base = getattr(params, parameter)
    h = rel_step * max(abs(base), 1e-8)
    re_p, s_p = _re_lambda(params.replace(**{parameter: base + h}))
    re_m, s_m = _re_lambda(params.replace(**{parameter: base - h}))
    dre = (re_p - re_m) / (2 * h)
    ds = (s_p - s_m) / (2 * h)
    analytic = transversality_analytic(params, e2)
    if ds == 0.0 or is_zero(dre, re_p, re_m, band=1e-6):
        raise TransversalityFailed(f"Re(lambda) does not move with {parameter}")
    dre_ds = dre / ds
    if math.copysign(1.0, dre_ds) != math.copysign(1.0, analytic):
        raise TransversalityFailed(
            f"finite-difference dRe/ds={dre_ds:.3e} disagrees in sign with {analytic:.3e}")
    return Transversality(analytic, transversality_printed(params, e2), dre, dre_ds)


@dataclass(frozen=True)
class HopfReport:
    parameter: str
    value: float
    params: ModelParams
    e2: tuple
    Lambda: float
    a2_bar: float
    a2_bar_error_estimate: float
    transversality: float
    predicted_cycle: CyclePrediction
    s: float
    W: float
    U: float

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "value": self.value,
            "Lambda": self.Lambda,
            "a2_bar": self.a2_bar,
            "a2_bar_error_estimate": self.a2_bar_error_estimate,
            "transversality": self.transversality,
            "predicted_cycle": self.predicted_cycle.value,
        }


def _s_at(params: ModelParams, parameter: str, value: float) -> float:
    p = params.replace(**{parameter: value})
    rep = equilibrium_report(p)
    if rep.e2 is None or rep.case is ExistenceCase.TANGENT:
        raise LostEquilibrium(f"E2 does not exist at {parameter}={value!r}")
    ind = saddle_indicator(p, rep.coeffs)
    if ind.I_star is not None and rep.e2.I <= ind.I_star:
        raise LostEquilibrium(f"E2 is a saddle (I2 <= I*) at {parameter}={value!r}")
    return s_indicator(p, rep.coeffs).s


def hopf_report_at(params: ModelParams, parameter: str = "beta2") -> HopfReport:
    rep = equilibrium_report(params)
    if rep.e2 is None:
        raise NotAtHopfPoint("E2 does not exist")
    lyap = lyapunov_coefficient(params, rep.e2)
    trans = transversality(params, rep.e2, parameter)
    if lyap.a2_bar < 0:
        pred = CyclePrediction.STABLE
    elif lyap.a2_bar > 0:
        pred = CyclePrediction.UNSTABLE
    else:
        pred = CyclePrediction.INCONCLUSIVE
    if lyap.error_estimate >= abs(lyap.a2_bar):
        pred = CyclePrediction.INCONCLUSIVE
    cp = char_poly(params, rep.e2)
    s = s_indicator(params, rep.coeffs).s
    return HopfReport(parameter, getattr(params, parameter), params, tuple(rep.e2), lyap.Lambda,
                      lyap.a2_bar, lyap.error_estimate, trans.analytic, pred, s, cp.W, cp.U)


def locate_hopf(params: ModelParams, parameter: str = "beta2", lo: float | None = None,
                hi: float | None = None) -> HopfReport:
    """Find the parameter value in ``[lo, hi]`` where s changes sign and analyse it."""
    if parameter not in PARAM_KEYS:
        raise ValueError(f"unknown parameter {parameter!r}")
    if lo is None or hi is None or not lo < hi:
        raise ValueError("need a bracket lo < hi")
    s_lo = _s_at(params, parameter, lo)
    s_hi = _s_at(params, parameter, hi)
    if s_lo == 0.0:
        root = lo
    elif s_hi == 0.0:
        root = hi
    elif (s_lo > 0) == (s_hi > 0):
        raise NotFound(f"s has the same sign at {parameter}={lo!r} and {hi!r}")
    else:
        root = brentq(lambda x: _s_at(params, parameter, x), lo, hi,
                      xtol=1e-300, rtol=4 * float_info.epsilon, maxiter=400)
    return hopf_report_at(params.replace(**{parameter: root}), parameter)

