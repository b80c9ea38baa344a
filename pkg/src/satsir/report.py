"""Full analysis of one parameter set, as a plain dict, JSON and readable text."""

from __future__ import annotations

import json
import math

from . import hopf
from .equilibria import (
    Region,
    a3_subregion,
    bifurcation_type,
    equilibrium_report,
)
from .model import ModelParams
from .stability import center_manifold, classify_dfe, stability_verdicts


def _clean(value):
    """Make a value JSON-safe: tuples become lists, non-finite floats become None."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    return value


def analysis_report(params: ModelParams, with_hopf: bool = True) -> dict:
    rep = equilibrium_report(params)
    th = rep.thresholds
    dfe = classify_dfe(params, rep)
    verdicts = stability_verdicts(params, rep)
    out = {
        "params": params.as_dict(),
        "derived": {"p": params.p, "m": params.m},
        "thresholds": th.to_dict(),
        "region": th.region.value,
        "subregion": a3_subregion(params).label if th.region is Region.A3 else None,
        "bifurcation_type": bifurcation_type(params).value,
        "equilibria": {
            "case": rep.case.value,
            "rule": rep.rule,
            "dfe": list(rep.dfe),
            "e1": None if rep.e1 is None else list(rep.e1),
            "e2": None if rep.e2 is None else list(rep.e2),
        },
        "dfe": {"local": dfe.local.value, "global_certificate": dfe.global_certificate},
        "stability": [v.to_dict() for v in verdicts],
        "center_manifold": None,
        "hopf": None,
    }
    if rep.coeffs.C_sign() == 0:
        cm = center_manifold(params)
        out["center_manifold"] = {"H": cm.H, "a0": cm.a0, "a1": cm.a1}
    if with_hopf and any(v.cls == "HopfCandidate" for v in verdicts):
        try:
            out["hopf"] = hopf.hopf_report_at(params).to_dict()
        except (hopf.NotAtHopfPoint, hopf.DerivativeIllConditioned, hopf.TransversalityFailed,
                hopf.LostEquilibrium) as exc:
            out["hopf"] = {"error": f"{type(exc).__name__}: {exc}"}
    return _clean(out)


def to_json(report: dict) -> str:
    """Canonical JSON: parsing and re-serialising it reproduces the same bytes."""
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.6g}"
    if isinstance(x, list):
        return "(" + ", ".join(_fmt(v) for v in x) + ")"
    return str(x)


def to_text(report: dict) -> str:
    th = report["thresholds"]
    eq = report["equilibria"]
    lines = ["parameters: " + ", ".join(f"{k}={_fmt(v)}" for k, v in report["params"].items()),
             f"r0 = {_fmt(th['r0'])}   r0* = {_fmt(th['r0_star'])}   P1 = {_fmt(th['P1'])}",
             f"R0+ = {_fmt(th['R0_plus'])}   R0- = {_fmt(th['R0_minus'])}",
             f"alpha2_0 = {_fmt(th['alpha2_0'])}   g(alpha2) = {_fmt(th['g_alpha2'])}",
             f"region: {report['region']}" + (f" ({report['subregion']})" if report["subregion"] else ""),
             f"bifurcation: {report['bifurcation_type']}",
             f"equilibria: {eq['case']} [{eq['rule']}]",
             f"  DFE = {_fmt(eq['dfe'])}: {report['dfe']['local']}, "
             f"global certificate {'yes' if report['dfe']['global_certificate'] else 'no'}"]
    for v in report["stability"]:
        if v["equilibrium"] == "DFE":
            continue
        state = eq[v["equilibrium"].lower()]
        extra = f", s = {_fmt(v['s'])}" if v["s"] is not None else ""
        lines.append(f"  {v['equilibrium']} = {_fmt(state)}: {v['class']} "
                     f"(W = {_fmt(v['W'])}, U = {_fmt(v['U'])}{extra})")
    if report["center_manifold"]:
        lines.append(f"center manifold: H = {_fmt(report['center_manifold']['H'])}")
    if report["hopf"]:
        h = report["hopf"]
        if "error" in h:
            lines.append(f"hopf: {h['error']}")
        else:
            lines.append(f"hopf: Lambda = {_fmt(h['Lambda'])}, a2_bar = {_fmt(h['a2_bar'])} "
                         f"-> {h['predicted_cycle']}")
    return "\n".join(lines) + "\n"
