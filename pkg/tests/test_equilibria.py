import math

import numpy as np
import pytest
import sympy as sp

from satsir.equilibria import (
    BifurcationType,
    ExistenceCase,
    InvalidRegion,
    Region,
    a3_subregion,
    alpha2_zero,
    bifurcation_type,
    critical_beta2,
    endemic_roots,
    equilibrium_report,
    g_curve,
    quadratic_coeffs,
    s_of_i,
    thresholds,
)
from satsir.model import ModelParams, r0, vector_field
from satsir.numerics import quadratic_roots

from _samplers import (
    BACKWARD_SET,
    EXAMPLE_A2,
    EXAMPLE_AT_ONE,
    EXAMPLE_BELOW,
    FORWARD_SET,
    random_params,
    two_endemic_sets,
)


def test_threshold_values_on_reference_sets():
    th = thresholds(BACKWARD_SET)
    assert th.g_alpha2 == pytest.approx(0.1188, abs=1e-3)
    assert th.alpha2_0 == pytest.approx(3.8776, abs=1e-3)
    assert th.region is Region.A3
    th = thresholds(FORWARD_SET)
    assert th.g_alpha2 == pytest.approx(-0.0017, abs=1e-3)
    assert th.region is Region.A1
    th = thresholds(EXAMPLE_AT_ONE)
    assert th.alpha2_0 == pytest.approx(1.8876, abs=1e-3)
    assert th.g_alpha2 == pytest.approx(0.4040, abs=1e-3)
    assert th.region is Region.A3


def test_region_boundary_a2_below_g_curve():
    for beta2 in np.linspace(0.001, 0.1187, 12):
        assert thresholds(BACKWARD_SET.replace(beta2=beta2)).region is Region.A3
    assert thresholds(BACKWARD_SET.replace(beta2=0.12)).region is Region.A2


def test_boundary_tie_breaks():
    a20 = alpha2_zero(BACKWARD_SET)
    assert thresholds(BACKWARD_SET.replace(alpha2=a20)).region is Region.A1
    g = g_curve(BACKWARD_SET)
    assert thresholds(BACKWARD_SET.replace(beta2=g)).region is Region.A2


def test_not_applicable_when_untreated_r0_at_most_one():
    p = BACKWARD_SET.replace(m_prime=0.99)
    th = thresholds(p)
    assert th.r0_star <= 1.0
    assert th.region is Region.NOT_APPLICABLE
    assert bifurcation_type(p) is BifurcationType.NOT_APPLICABLE
    assert equilibrium_report(p).case is ExistenceCase.NONE


def test_coefficients_match_symbolic_elimination():
    # eliminate S from the two steady-state equations and compare with (A, B, C)
    S, I = sp.symbols("S I", positive=True)
    for params in (BACKWARD_SET.replace(beta2=0.06), EXAMPLE_BELOW, FORWARD_SET):
        q = {k: sp.Rational(repr(v)) for k, v in params.as_dict().items()}
        p_, m_ = 1 - q["q"], 1 - q["m_prime"]
        inc = q["beta"] * S * I / (1 + q["alpha"] * I)
        dS = -inc - q["b"] * S + q["b"] * m_ * (1 - I) + p_ * q["delta"] * I
        S_eq = (1 + q["alpha"] * I) / q["beta"] * (p_ * q["delta"] + q["gamma"]
                                                   + q["beta2"] / (1 + q["alpha2"] * I))
        num = sp.numer(sp.together(dS.subs(S, S_eq) / I))
        poly = sp.Poly(sp.expand(num), I)
        assert poly.degree() == 2
        ref = [float(c) for c in poly.all_coeffs()]
        co = quadratic_coeffs(params)
        ratio = ref[0] / co.A
        assert ref[1] / ratio == pytest.approx(co.B, rel=1e-12)
        assert ref[2] / ratio == pytest.approx(co.C, rel=1e-12, abs=1e-15)


def test_c_is_scaled_one_minus_r0():
    rng = np.random.default_rng(11)
    for _ in range(500):
        p = random_params(rng)
        co = quadratic_coeffs(p)
        K = p.p * p.delta + p.gamma + p.beta2
        assert co.C == pytest.approx(p.b * K * (1.0 - r0(p)), rel=1e-12, abs=1e-14 * co.C_scale)
        assert co.A > 0
        assert np.sign(co.C) == np.sign(1.0 - r0(p)) or co.C_sign() == 0


def test_root_shapes():
    co = quadratic_coeffs(BACKWARD_SET.replace(beta2=0.001))
    assert co.C < 0
    I1, I2 = endemic_roots(co)
    assert I1 < 0 < I2
    co = quadratic_coeffs(EXAMPLE_AT_ONE.replace(beta=(0.0002 + 0.01 + 0.0498) / 0.3))
    I1, I2 = endemic_roots(co)
    assert abs(I1) < 1e-12
    assert I2 == pytest.approx(-co.B / co.A, rel=1e-9)


def test_stable_quadratic_roots():
    r = quadratic_roots(1.0, -1e8, 1.0)
    assert r[0] == pytest.approx(1e-8, rel=1e-14)
    assert r[1] == pytest.approx(1e8, rel=1e-14)
    assert quadratic_roots(1.0, 0.0, -4.0) == (-2.0, 2.0)
    assert quadratic_roots(1.0, 0.0, 4.0) is None


def test_worked_example_equilibrium():
    rep = equilibrium_report(EXAMPLE_AT_ONE)
    assert rep.e2 is not None
    assert rep.e2.S == pytest.approx(0.11210, abs=5e-4)
    assert rep.e2.I == pytest.approx(0.4781, abs=5e-4)
    assert max(map(abs, vector_field(EXAMPLE_AT_ONE, rep.e2))) < 1e-9
    assert s_of_i(EXAMPLE_AT_ONE, 0.4781) == pytest.approx(0.11210, abs=5e-4)


def test_below_threshold_example_has_no_endemic_state():
    rep = equilibrium_report(EXAMPLE_BELOW)
    assert rep.thresholds.r0 == pytest.approx(0.5445, abs=1e-4)
    assert rep.case is ExistenceCase.NONE
    assert rep.endemic == []


def test_s_of_i_tends_to_m_at_threshold():
    p = EXAMPLE_AT_ONE.replace(beta=(0.0002 + 0.01 + 0.0498) / 0.3)
    assert s_of_i(p, 1e-10) == pytest.approx(p.m, rel=1e-8)


def _scan_roots(co, step=1e-4):
    I = np.arange(step, 1.0 + step / 2, step)
    f = co.A * I * I + co.B * I + co.C
    return int(np.count_nonzero(np.sign(f[1:]) * np.sign(f[:-1]) < 0))


def test_report_residuals_and_brute_force_count():
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        p = random_params(rng)
        rep = equilibrium_report(p)
        co = rep.coeffs
        for S, I in rep.endemic:
            assert 0.0 < I <= 1.0 and S > 0.0 and S + I <= 1.0 + 1e-12
            assert abs(co(I)) < 1e-10 * max(co.A, abs(co.B), abs(co.C))
            assert max(map(abs, vector_field(p, (S, I)))) < 1e-9
        assert _scan_roots(co) <= len(rep.endemic)


def test_two_endemic_sign_conditions():
    for p in two_endemic_sets(300, seed=5):
        th = thresholds(p)
        co = quadratic_coeffs(p)
        assert th.region is Region.A3
        assert max(th.P1, th.R0_plus) < th.r0 < 1.0
        assert co.discriminant > 0 and co.B < 0 and co.C > 0
        assert th.R0_minus <= th.R0_plus
        assert th.R0_minus < th.P1
        assert g_curve(p) > 0 and p.alpha2 > alpha2_zero(p)


def test_factored_b_and_r0_bounds_from_numeric_roots():
    # B = b alpha K (P1 - r0) and C = b K (1 - r0); with r0 free the discriminant is a
    # quadratic in r0 whose roots must be R0- and R0+
    rng = np.random.default_rng(9)
    checked = 0
    while checked < 300:
        p = random_params(rng)
        th = thresholds(p)
        if th.region is not Region.A3:
            continue
        co = quadratic_coeffs(p)
        K = p.p * p.delta + p.gamma + p.beta2
        assert co.B == pytest.approx(p.b * p.alpha * K * (th.P1 - th.r0), rel=1e-9, abs=1e-12 * co.B_scale)
        u = p.b * p.alpha * K
        poly = [u * u, -2 * u * u * th.P1 + 4 * co.A * p.b * K, u * u * th.P1 ** 2 - 4 * co.A * p.b * K]
        lo, hi = np.sort(np.roots(poly).real)
        assert th.R0_plus == pytest.approx(hi, rel=1e-8, abs=1e-10)
        assert th.R0_minus == pytest.approx(lo, rel=1e-8, abs=1e-10)
        checked += 1


def test_topology_of_beta2_scans():
    def counts(params, lo, hi):
        return [len(equilibrium_report(params.replace(beta2=b2)).endemic)
                for b2 in np.linspace(lo, hi, 400)]

    crit = critical_beta2(FORWARD_SET)
    c = counts(FORWARD_SET, crit * 0.5, crit * 1.5)
    assert set(c) == {0, 1} and c == sorted(c, reverse=True)
    crit = critical_beta2(BACKWARD_SET)
    c = counts(BACKWARD_SET, crit * 0.5, crit * 1.5)
    assert c[0] == 1 and c[-1] == 0 and 2 in c
    k = c.index(2)
    assert set(c[:k]) == {1}


def test_bifurcation_types():
    assert bifurcation_type(BACKWARD_SET) is BifurcationType.BACKWARD
    assert bifurcation_type(FORWARD_SET) is BifurcationType.FORWARD
    assert bifurcation_type(EXAMPLE_A2) is BifurcationType.FORWARD


def test_subregions():
    for p in two_endemic_sets(50, seed=3):
        sub = a3_subregion(p)
        assert sub.names == ("A3^2", "A3^4")
    with pytest.raises(InvalidRegion):
        a3_subregion(FORWARD_SET)


def test_low_r0_subregion_matches_no_equilibria():
    # this corner needs R0- > r0 > 0, which only happens for extreme rates, so sample wide
    rng = np.random.default_rng(2)
    hits = 0
    for _ in range(100_000):
        u = lambda lo, hi: 10 ** rng.uniform(lo, hi)
        p = ModelParams.from_pm(b=u(-4, 2), delta=u(-4, 2), gamma=u(-5, 2), p=rng.uniform(0, 1),
                                m=rng.uniform(0, 1), beta=u(-3, 3), alpha=u(-4, 4),
                                beta2=u(-5, 3), alpha2=u(-3, 4))
        th = thresholds(p)
        if th.region is not Region.A3 or th.R0_minus is None:
            continue
        if th.r0 < min(th.P1, th.R0_minus):
            hits += 1
            assert a3_subregion(p).names == ("A3^1", "A3^3")
            assert equilibrium_report(p).case is ExistenceCase.NONE
    assert hits > 100


def test_tangent_case():
    # bisect beta2 onto the fold of the backward branch
    p = BACKWARD_SET
    crit = critical_beta2(p)
    lo, hi = crit, crit * 1.5
    assert equilibrium_report(p.replace(beta2=hi)).case is ExistenceCase.NONE
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if equilibrium_report(p.replace(beta2=mid)).case is ExistenceCase.NONE:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 4 * math.ulp(hi):
            break
    found = {equilibrium_report(p.replace(beta2=x)).case for x in (lo, hi)}
    assert found & {ExistenceCase.TANGENT, ExistenceCase.TWO_ENDEMIC}
    rep = equilibrium_report(p.replace(beta2=lo))
    assert rep.e1.I == pytest.approx(rep.e2.I, rel=1e-4)


def test_report_serialisation_fields():
    d = equilibrium_report(BACKWARD_SET).to_dict()
    assert set(d) == {"r0", "r0_star", "P1", "R0_plus", "R0_minus", "alpha2_0", "g_alpha2",
                      "region", "case", "dfe", "e1", "e2"}
