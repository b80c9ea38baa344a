"""Adaptive Dormand-Prince integration, invariant-region checks and cycle detection."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .equilibria import equilibrium_report
from .model import ModelParams, in_region

DOMAIN_TOL = 1e-6
CYCLE_AMPLITUDE_FLOOR = 1e-6


class Termination(str, enum.Enum):
    TIME_LIMIT = "TimeLimit"
    CONVERGED = "ConvergedToPoint"
    CYCLE = "CycleDetected"
    LEFT_DOMAIN = "LeftDomainTolerance"


class IntegrationError(RuntimeError):
    pass


class StepSizeUnderflow(IntegrationError):
    pass


class StepBudgetExhausted(IntegrationError):
    pass


class InitOutsideDomain(ValueError):
    pass


@dataclass(frozen=True)
class StepStats:
    accepted: int
    rejected: int
    evaluations: int
    h_min: float
    h_max: float


@dataclass(frozen=True)
class Trajectory:
    """Accepted step nodes with their derivatives; :meth:`at` gives cubic Hermite dense output."""

    t: np.ndarray
    S: np.ndarray
    I: np.ndarray
    dS: np.ndarray
    dI: np.ndarray
    stats: StepStats
    termination: Termination
    backend: str = field(default=_backend.BACKEND, compare=False)

    def __len__(self):
        return len(self.t)

    @property
    def final(self) -> tuple[float, float]:
        return float(self.S[-1]), float(self.I[-1])

    @property
    def R(self) -> np.ndarray:
        return 1.0 - self.S - self.I

    def at(self, times):
        """Interpolated ``(S, I)`` at ``times`` (scalar or array) inside the integrated span."""
        tq = np.atleast_1d(np.asarray(times, dtype=float))
        if tq.size and (tq.min() < self.t[0] or tq.max() > self.t[-1]):
            raise ValueError("requested time outside the integrated interval")
        k = np.clip(np.searchsorted(self.t, tq, side="right") - 1, 0, len(self.t) - 2)
        t0, t1 = self.t[k], self.t[k + 1]
        h = t1 - t0
        th = (tq - t0) / h
        h00 = (1 + 2 * th) * (1 - th) ** 2
        h10 = th * (1 - th) ** 2
        h01 = th * th * (3 - 2 * th)
        h11 = th * th * (th - 1)
        S = h00 * self.S[k] + h10 * h * self.dS[k] + h01 * self.S[k + 1] + h11 * h * self.dS[k + 1]
        I = h00 * self.I[k] + h10 * h * self.dI[k] + h01 * self.I[k + 1] + h11 * h * self.dI[k + 1]
        if np.ndim(times) == 0:
            return float(S[0]), float(I[0])
        return S, I

    def csv_text(self, times=None) -> str:
        """Columns t, S, I, R; rounding negatives within the domain tolerance print as 0."""
        if times is None:
            t, S, I = self.t, self.S, self.I
        else:
            t = np.asarray(times, dtype=float)
            S, I = self.at(t)
        S = np.where((S < 0) & (S >= -DOMAIN_TOL), 0.0, S)
        I = np.where((I < 0) & (I >= -DOMAIN_TOL), 0.0, I)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "S", "I", "R"])
        for row in zip(t, S, I, 1.0 - S - I):
            writer.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def write_csv(self, path, times=None) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text(times))


def _initial_step(params: ModelParams, S: float, I: float, span: float, rtol: float, atol: float) -> float:
    dS, dI = _backend.rhs(params.as_tuple(), S, I)
    d0 = max(abs(S) / (atol + rtol * abs(S)), abs(I) / (atol + rtol * abs(I)))
    d1 = max(abs(dS) / (atol + rtol * abs(S)), abs(dI) / (atol + rtol * abs(I)))
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h, span)


def integrate(params: ModelParams, init, t_end: float, rtol: float = 1e-8, atol: float = 1e-10,
              *, t0: float = 0.0, converge_tol: float = 1e-10, stop_on_converge: bool = False,
              max_steps: int = 10_000_000, backward: bool = False) -> Trajectory:
    """Integrate the model from ``init`` at ``t0`` to ``t_end``.

    Args:
        params: model constants.
        init: starting ``(S, I)``; must lie in the invariant region.
        t_end: final time, greater than ``t0``.
        rtol, atol: per-step error bound ``atol + rtol |y|``, each in (0, 1e-2].
        converge_tol: a run whose final vector field is below this (max norm)
            terminates as ConvergedToPoint.
        stop_on_converge: stop as soon as the vector field drops below ``converge_tol``.
        backward: follow the time-reversed field; ``t`` then counts elapsed
            reversed time and repelling sets (saddles, unstable cycles) become attracting.

    Raises:
        InitOutsideDomain: ``init`` is not in the invariant region.
        StepSizeUnderflow: the step size collapsed to rounding level.
    """
    S0, I0 = (float(x) for x in init)
    if not (math.isfinite(S0) and math.isfinite(I0)) or not in_region((S0, I0), 1e-12):
        raise InitOutsideDomain(f"initial state {(S0, I0)!r} is outside S, I >= 0, S + I <= 1")
    if not t_end > t0:
        raise ValueError(f"t_end must exceed t0, got {t_end!r}")
    for name, tol in (("rtol", rtol), ("atol", atol)):
        if not 0.0 < tol <= 1e-2:
            raise ValueError(f"{name} must lie in (0, 1e-2], got {tol!r}")
    h0 = _initial_step(params, S0, I0, t_end - t0, rtol, atol)
    out = _backend.dopri_run(params.as_tuple(), S0, I0, float(t0), float(t_end), float(rtol),
                             float(atol), h0, int(max_steps),
                             float(converge_tol) if stop_on_converge else 0.0, DOMAIN_TOL,
                             -1.0 if backward else 1.0)
    t, S, I, dS, dI, status, n_acc, n_rej, nfev, hmin, hmax = out
    if status == 3:
        raise StepSizeUnderflow(f"step size underflow at t={t[-1]!r}")
    if status == 4:
        raise StepBudgetExhausted(f"step budget of {max_steps} exhausted at t={t[-1]!r}")
    if status == 2:
        term = Termination.LEFT_DOMAIN
    elif status == 1 or max(abs(dS[-1]), abs(dI[-1])) < converge_tol:
        term = Termination.CONVERGED
    else:
        term = Termination.TIME_LIMIT
    stats = StepStats(int(n_acc), int(n_rej), int(nfev), float(hmin), float(hmax))
    return Trajectory(t, S, I, dS, dI, stats, term)


@dataclass(frozen=True)
class RegionCheck:
    ok: bool
    worst_violation: float
    index: int | None

    def __bool__(self):
        return self.ok


def verify_invariant_region(traj, tol: float = DOMAIN_TOL) -> RegionCheck:
    """Check S >= -tol, I >= -tol and S + I <= 1 + tol on every sample."""
    S = np.asarray(traj.S)
    I = np.asarray(traj.I)
    if S.size == 0:
        raise ValueError("empty trajectory")
    excess = np.maximum.reduce([-S, -I, S + I - 1.0])
    k = int(np.argmax(excess))
    worst = float(max(excess[k], 0.0))
    return RegionCheck(worst <= tol, worst, k if worst > tol else None)


@dataclass(frozen=True)
class CycleEstimate:
    period: float
    amplitude: float
    mean: tuple[float, float]
    converged: bool
    section: float
    returns: tuple

    def to_dict(self) -> dict:
        return {"period": self.period, "amplitude": self.amplitude, "mean": list(self.mean),
                "converged": self.converged, "section": self.section}


def section_crossings(traj: Trajectory, level: float) -> list[tuple[float, float]]:
    """Upward crossings of ``I = level`` as ``(t, S)`` pairs, refined on the Hermite interpolant."""
    g = traj.I - level
    idx = np.nonzero((g[:-1] < 0.0) & (g[1:] >= 0.0))[0]
    out = []
    for k in idx:
        lo, hi = traj.t[k], traj.t[k + 1]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if traj.at(mid)[1] < level:
                lo = mid
            else:
                hi = mid
        tc = 0.5 * (lo + hi)
        out.append((tc, traj.at(tc)[0]))
    return out


def detect_cycle(params: ModelParams, init, settle_time: float, observe_time: float,
                 section: float | None = None, rtol: float = 1e-10, atol: float = 1e-12,
                 n_returns: int = 4, s_tol: float = 1e-5, period_rtol: float = 1e-4,
                 backward: bool = False):
    """Look for a periodic orbit on a Poincare section of constant I.

    Integrates for ``settle_time``, then records upward crossings of
    ``I = section`` over ``observe_time``.  A cycle is reported when the last
    ``n_returns`` return points agree in S to ``s_tol``, the return times agree
    to ``period_rtol`` relative and the I-amplitude stays above the detection floor.
    Returns None when no cycle is found.  With ``backward`` the search runs on
    the time-reversed field, so it finds repelling cycles instead.
    """
    start = tuple(init)
    if settle_time > 0:
        pre = integrate(params, start, settle_time, rtol, atol, stop_on_converge=True,
                        backward=backward)
        if pre.termination is Termination.CONVERGED:
            return None
        if pre.termination is Termination.LEFT_DOMAIN:
            return None
        start = pre.final
    traj = integrate(params, start, observe_time, rtol, atol, stop_on_converge=True,
                     backward=backward)
    if traj.termination is not Termination.TIME_LIMIT:
        return None
    if section is None:
        e2 = equilibrium_report(params).e2
        section = e2.I if e2 is not None else float(np.median(traj.I))
    cross = section_crossings(traj, section)
    if len(cross) < n_returns + 1:
        return None
    last = cross[-(n_returns + 1):]
    times = np.array([c[0] for c in last])
    Svals = np.array([c[1] for c in last[1:]])
    periods = np.diff(times)
    period = float(periods.mean())
    if period <= 0:
        return None
    grid = np.linspace(times[-2], times[-1], 400)
    Sg, Ig = traj.at(grid)
    amplitude = float(Ig.max() - Ig.min())
    grid0 = np.linspace(times[-3], times[-2], 400)
    amp_prev = float(np.ptp(traj.at(grid0)[1]))
    if amplitude <= CYCLE_AMPLITUDE_FLOOR:
        return None
    s_ok = float(np.ptp(Svals)) <= s_tol
    p_ok = float(np.ptp(periods)) <= period_rtol * period
    a_ok = abs(amplitude - amp_prev) <= 1e-3 * amplitude
    if not (s_ok and p_ok and a_ok):
        return None
    return CycleEstimate(period, amplitude, (float(Sg.mean()), float(Ig.mean())), True,
                         float(section), tuple(last))
