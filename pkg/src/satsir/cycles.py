"""Integration checks of a Hopf point's cycle prediction.

Two observations are made, both from trajectories only:

* the Poincare return map on the section ``I = I2`` at the Hopf point itself,
  whose cubic drift per revolution should equal ``2 pi a2_bar rho^2 delta^3 / Lambda``;
* small offsets of the bifurcation parameter to either side, chosen so the
  predicted cycle lies inside the cubic regime just measured.  An attracting
  cycle is found by forward integration, a repelling one on the time-reversed
  field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .equilibria import equilibrium_report
from .hopf import CyclePrediction, HopfReport, from_rotation_coords, shifted_system
from .integrate import IntegrationError, detect_cycle, integrate, section_crossings
from .stability import char_poly


@dataclass(frozen=True)
class ReturnMapCheck:
    delta: float   # offset in S along the section
    ratio: float   # measured drift over the cubic prediction
    rho: float     # rotation-coordinate radius per unit delta


@dataclass(frozen=True)
class SideObservation:
    side: int                 # +1: Re(lambda) > 0 at E2, -1: Re(lambda) < 0
    value: float              # parameter value used
    backward: bool            # integrated on the time-reversed field
    amplitude: float | None   # I-amplitude of the cycle found, None if none


@dataclass(frozen=True)
class HopfObservation:
    regime: ReturnMapCheck | None
    eps: float | None
    sides: tuple
    observed: CyclePrediction | None   # None: outside the oracle's budget
    reason: str

    def to_dict(self) -> dict:
        return {
            "return_map_ratio": None if self.regime is None else self.regime.ratio,
            "eps": self.eps,
            "sides": [{"side": s.side, "value": s.value, "backward": s.backward,
                       "amplitude": s.amplitude} for s in self.sides],
            "observed": None if self.observed is None else self.observed.value,
            "reason": self.reason,
        }


def return_map_drift(params, e2, Lambda: float, delta: float) -> float:
    """S-displacement after one revolution from ``(S2 + delta, I2)``; nan if it never returns."""
    S2, I2 = e2
    period = 2.0 * math.pi / Lambda
    traj = integrate(params, (S2 + delta, I2), 1.5 * period, 1e-12, 1e-15)
    cross = [c for c in section_crossings(traj, I2) if c[0] > 0.5 * period]
    return cross[0][1] - (S2 + delta) if cross else math.nan


def _ratio(rep: HopfReport, sysH, delta: float) -> tuple[float, float]:
    rho2 = 1.0 + (sysH.a11 / (rep.Lambda * sysH.u1)) ** 2
    try:
        drift = return_map_drift(rep.params, rep.e2, rep.Lambda, delta)
    except IntegrationError:
        drift = math.nan
    cubic = 2.0 * math.pi / rep.Lambda * rep.a2_bar * rho2 * delta ** 3
    return drift / cubic, math.sqrt(rho2)


def cubic_regime(rep: HopfReport, tol: float = 0.2, floor: float = 1e-6) -> ReturnMapCheck | None:
    """Largest section offset where the return map is cubic to within ``tol`` at delta and delta/2."""
    sysH = shifted_system(rep.params, rep.e2)
    S2, I2 = rep.e2
    delta = 0.5 * min(S2, 1.0 - S2 - I2)
    while delta > floor * max(S2, 1e-300):
        q, rho = _ratio(rep, sysH, delta)
        if abs(q - 1.0) < tol and abs(_ratio(rep, sysH, 0.5 * delta)[0] - 1.0) < tol:
            return ReturnMapCheck(delta, q, rho)
        delta *= 0.5
    return None


def _re_lambda(params) -> float:
    return -0.5 * char_poly(params, equilibrium_report(params).e2).W


def offset_value(rep: HopfReport, target: float) -> float | None:
    """Parameter value near the Hopf point where Re(lambda) at E2 equals ``target``."""
    x0 = rep.value

    def f(x):
        return _re_lambda(rep.params.replace(**{rep.parameter: x})) - target

    d = 1e-4 * abs(x0)
    while d < 0.5 * abs(x0):
        for lo, hi in ((x0 - d, x0), (x0, x0 + d)):
            try:
                if f(lo) * f(hi) < 0:
                    return brentq(f, lo, hi, xtol=1e-15)
            except (ValueError, TypeError):   # E2 lost or parameter invalid
                pass
        d *= 2.0
    return None


def _ring_inside(sysH, lam, e2, r) -> bool:
    for ang in np.linspace(0.0, 2.0 * math.pi, 16, endpoint=False):
        x, y = from_rotation_coords(sysH, lam, r * math.cos(ang), r * math.sin(ang))
        S, I = e2[0] + x, e2[1] + y
        if S <= 0.0 or I <= 0.0 or S + I >= 1.0:
            return False
    return True


def observe_hopf(rep: HopfReport, eps_max: float = 0.05, max_periods: float = 2e5) -> HopfObservation:
    """Compare the predicted cycle with integration on both sides of the Hopf point.

    ``eps`` is the offset in units of Lambda: the parameter is moved until
    Re(lambda) = +-eps Lambda.  It is the largest value (up to ``eps_max``)
    whose predicted cycle radius lies in the measured cubic regime and whose
    3x ring stays inside the invariant region.  When that needs more than
    ``max_periods`` revolutions of settling, the point is left unresolved.
    """
    regime = cubic_regime(rep)
    if regime is None:
        return HopfObservation(None, None, (), None, "no cubic regime on the return map")
    lam, a = rep.Lambda, abs(rep.a2_bar)
    sysH = shifted_system(rep.params, rep.e2)
    eps = min(eps_max, a * (0.5 * regime.delta * regime.rho) ** 2 / lam)
    while True:
        settle = 15.0 / (eps * lam)
        if settle * lam / (2.0 * math.pi) > max_periods:
            return HopfObservation(regime, eps, (), None, "settling exceeds the period budget")
        chosen = {}
        for side in (1, -1):
            value = offset_value(rep, side * eps * lam)
            if value is None:
                break
            p = rep.params.replace(**{rep.parameter: value})
            e2 = tuple(equilibrium_report(p).e2)
            r_pred = math.sqrt(eps * lam / a)
            if not _ring_inside(sysH, lam, e2, 3.0 * r_pred):
                break
            chosen[side] = (value, p, e2, r_pred)
        if len(chosen) == 2:
            break
        eps *= 0.5
    sides = []
    for side, (value, p, e2, r_pred) in chosen.items():
        x, y = from_rotation_coords(sysH, lam, 0.2 * r_pred, 0.0)
        backward = side < 0   # run in the time direction where E2 repels
        try:
            c = detect_cycle(p, (e2[0] + x, e2[1] + y), settle, 30.0 * 2.0 * math.pi / lam,
                             backward=backward)
        except IntegrationError:
            c = None
        sides.append(SideObservation(side, value, backward, None if c is None else c.amplitude))
    plus, minus = sides
    if plus.amplitude is not None and (minus.amplitude is None or minus.amplitude > 3 * plus.amplitude):
        observed = CyclePrediction.STABLE
    elif minus.amplitude is not None and (plus.amplitude is None or plus.amplitude > 3 * minus.amplitude):
        observed = CyclePrediction.UNSTABLE
    else:
        observed = CyclePrediction.INCONCLUSIVE
    return HopfObservation(regime, eps, tuple(sides), observed, "")
