"""Batch drivers: one-parameter bifurcation sweeps, (alpha2, beta2) region maps, Hopf scans."""

from __future__ import annotations

import csv
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from . import hopf
from .equilibria import (
    ExistenceCase,
    Region,
    a3_subregion,
    bifurcation_type,
    equilibrium_report,
)
from .integrate import integrate
from .model import PARAM_KEYS, POSITIVE_KEYS, ModelParams
from .stability import classify_dfe, classify_endemic

#: stand-in for a zero endpoint of a strictly positive parameter
TINY = sys.float_info.min


def grid(lo: float, hi: float, n: int, log: bool = False) -> np.ndarray:
    """Uniform (or log-spaced) grid including both endpoints."""
    if n < 2:
        raise ValueError("need at least two grid points")
    if not hi > lo:
        raise ValueError("need lo < hi")
    if log:
        if lo <= 0:
            raise ValueError("log spacing needs lo > 0")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def _admissible(parameter: str, value: float) -> float:
    if parameter in POSITIVE_KEYS and value == 0.0:
        return TINY
    return float(value)


def _pool_map(func, items, threads: int | None):
    threads = threads or os.cpu_count() or 1
    if threads <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


@dataclass(frozen=True)
class SweepRow:
    param_value: float
    r0: float
    case: str
    I_dfe: float
    I_e1: float | None
    I_e2: float | None
    class_dfe: str
    class_e1: str | None
    class_e2: str | None

    @property
    def n_endemic(self) -> int:
        if self.case == ExistenceCase.TANGENT.value:
            return 1
        return (self.I_e1 is not None) + (self.I_e2 is not None)


def analyse_point(params: ModelParams) -> SweepRow:
    """Equilibria and analytic stability classes at one parameter set (no integration)."""
    rep = equilibrium_report(params)
    dfe = classify_dfe(params, rep)
    e1 = e2 = c1 = c2 = None
    if rep.e2 is not None:
        e2 = rep.e2.I
        c2 = classify_endemic(params, "E2", rep).cls.value
    if rep.e1 is not None and rep.case is not ExistenceCase.TANGENT:
        e1 = rep.e1.I
        c1 = classify_endemic(params, "E1", rep).cls.value
    return SweepRow(0.0, rep.thresholds.r0, rep.case.value, 0.0, e1, e2, dfe.local.value, c1, c2)


def bifurcation_sweep(params: ModelParams, parameter: str, lo: float, hi: float, n_points: int,
                      *, log: bool = False, threads: int | None = 1) -> list[SweepRow]:
    """Analyse every grid value of ``parameter``; rows come back in grid order."""
    if parameter not in PARAM_KEYS:
        raise ValueError(f"unknown parameter {parameter!r}")
    values = [_admissible(parameter, v) for v in grid(lo, hi, n_points, log)]

    def one(value):
        row = analyse_point(params.replace(**{parameter: value}))
        return SweepRow(value, *astuple(row)[1:])

    return _pool_map(one, values, threads)


@dataclass(frozen=True)
class SpotCheck:
    param_value: float
    equilibrium: str
    expected: str
    observed: str

    @property
    def ok(self) -> bool:
        return self.expected == self.observed


def verify_sweep(params: ModelParams, parameter: str, rows: list[SweepRow], every: int = 10,
                 t_end: float = 5e3) -> list[SpotCheck]:
    """Integration spot-checks: perturb each Stable equilibrium on a subsample and see it return."""
    out = []
    for row in rows[::every]:
        p = params.replace(**{parameter: row.param_value})
        rep = equilibrium_report(p)
        targets = [("DFE", row.class_dfe, rep.dfe), ("E2", row.class_e2, rep.e2)]
        for name, cls, state in targets:
            if cls != "Stable" or state is None:
                continue
            start = (min(max(state.S - 1e-4, 0.0), 1.0), state.I + 1e-4)
            if start[0] + start[1] > 1.0:
                continue
            traj = integrate(p, start, t_end, 1e-9, 1e-12)
            dist = math.hypot(traj.final[0] - state.S, traj.final[1] - state.I)
            observed = "Stable" if dist < 1e-4 else "NotConverged"
            out.append(SpotCheck(row.param_value, name, cls, observed))
    return out


@dataclass(frozen=True)
class MapCell:
    alpha2: float
    beta2: float
    region: str
    subregion: str
    bif_type: str
    n_endemic: int


def map_cell(params: ModelParams) -> MapCell:
    rep = equilibrium_report(params)
    region = rep.thresholds.region
    sub = a3_subregion(params).label if region is Region.A3 else ""
    n = len(rep.endemic)
    return MapCell(params.alpha2, params.beta2, region.value, sub,
                   bifurcation_type(params).value, n)


def region_map(params: ModelParams, alpha2_range: tuple[float, float], beta2_range: tuple[float, float],
               resolution: int | tuple[int, int] = 50, *, log: bool = False,
               threads: int | None = 1) -> list[MapCell]:
    """Classify every cell of an (alpha2, beta2) grid; alpha2 varies slowest."""
    na, nb = (resolution, resolution) if isinstance(resolution, int) else resolution
    a_grid = [_admissible("alpha2", v) for v in grid(*alpha2_range, na, log)]
    b_grid = [_admissible("beta2", v) for v in grid(*beta2_range, nb, log)]
    cells = [(a, b) for a in a_grid for b in b_grid]
    return _pool_map(lambda ab: map_cell(params.replace(alpha2=ab[0], beta2=ab[1])), cells, threads)


def hopf_scan(params: ModelParams, parameter: str = "beta2", lo: float = 0.0, hi: float = 1.0,
              n_brackets: int = 50, *, log: bool = False, threads: int | None = 1,
              brackets: list[tuple[float, float]] | None = None) -> list[hopf.HopfReport]:
    """Locate every sign change of s on a grid (or in given brackets), refining and deduplicating."""
    if brackets is None:
        values = [_admissible(parameter, v) for v in grid(lo, hi, n_brackets + 1, log)]
        brackets = list(zip(values[:-1], values[1:]))

    def one(br):
        try:
            return hopf.locate_hopf(params, parameter, *br)
        except (hopf.NotFound, hopf.LostEquilibrium, hopf.NotAtHopfPoint,
                hopf.DerivativeIllConditioned, hopf.TransversalityFailed):
            return None

    found = [r for r in _pool_map(one, brackets, threads) if r is not None]
    found.sort(key=lambda r: r.value)
    unique: list[hopf.HopfReport] = []
    for r in found:
        if unique and abs(r.value - unique[-1].value) <= 1e-9 * max(abs(r.value), 1.0):
            continue
        unique.append(r)
    return unique


def rows_csv_text(rows) -> str:
    """Dataclass rows as CSV text with field names as header; None prints as empty."""
    if not rows:
        raise ValueError("nothing to write")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f.name for f in fields(rows[0])])
    for row in rows:
        writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v
                         for v in astuple(row)])
    return buf.getvalue()


def write_rows_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_csv_text(rows))
