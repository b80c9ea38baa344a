import math

import numpy as np
import pytest

from satsir.cycles import cubic_regime, observe_hopf, offset_value, return_map_drift
from satsir.hopf import CyclePrediction, locate_hopf

from _samplers import HOPF_BRACKET, HOPF_FAMILY, SUBCRITICAL_BRACKET, SUBCRITICAL_FAMILY


@pytest.fixture(scope="module")
def supercritical():
    return locate_hopf(HOPF_FAMILY, "beta2", *HOPF_BRACKET)


@pytest.fixture(scope="module")
def subcritical():
    return locate_hopf(SUBCRITICAL_FAMILY, "beta2", *SUBCRITICAL_BRACKET)


def test_return_map_drift_is_cubic(supercritical, subcritical):
    for rep in (supercritical, subcritical):
        regime = cubic_regime(rep)
        assert regime is not None
        d = regime.delta / 4
        drifts = [return_map_drift(rep.params, rep.e2, rep.Lambda, x) for x in (d, d / 2)]
        assert np.sign(drifts[0]) == np.sign(rep.a2_bar)
        # halving the offset divides the drift by eight
        assert drifts[0] / drifts[1] == pytest.approx(8.0, rel=0.1)


def test_return_map_confirms_lyapunov_magnitude(supercritical):
    regime = cubic_regime(supercritical, tol=0.02)
    assert regime is not None
    assert regime.ratio == pytest.approx(1.0, abs=0.02)


def test_offset_hits_requested_real_part(supercritical):
    from satsir.cycles import _re_lambda
    for frac in (0.01, -0.01):
        v = offset_value(supercritical, frac * supercritical.Lambda)
        re = _re_lambda(HOPF_FAMILY.replace(beta2=v))
        assert re == pytest.approx(frac * supercritical.Lambda, rel=1e-8)
    # s decreases through zero as Re(lambda) turns positive
    assert offset_value(supercritical, 0.01 * supercritical.Lambda) > supercritical.value


def test_supercritical_observation(supercritical):
    obs = observe_hopf(supercritical)
    assert supercritical.predicted_cycle is CyclePrediction.STABLE
    assert obs.observed is CyclePrediction.STABLE
    plus, minus = obs.sides
    assert plus.side == 1 and not plus.backward and plus.amplitude > 0
    assert minus.amplitude is None


def test_subcritical_observation(subcritical):
    obs = observe_hopf(subcritical)
    assert subcritical.a2_bar > 0
    assert subcritical.predicted_cycle is CyclePrediction.UNSTABLE
    assert obs.observed is CyclePrediction.UNSTABLE
    plus, minus = obs.sides
    assert minus.backward and minus.amplitude > 0
    assert plus.amplitude is None or plus.amplitude > 3 * minus.amplitude
    assert set(obs.to_dict()) == {"return_map_ratio", "eps", "sides", "observed", "reason"}


def test_cycle_amplitude_scales_with_square_root_of_offset(supercritical):
    from satsir.integrate import detect_cycle
    from satsir.equilibria import equilibrium_report
    amps = []
    for eps in (2e-3, 5e-4):
        v = offset_value(supercritical, eps * supercritical.Lambda)
        p = HOPF_FAMILY.replace(beta2=v)
        e2 = equilibrium_report(p).e2
        c = detect_cycle(p, (e2.S, e2.I * 1.01), 15 / (eps * supercritical.Lambda), 300.0)
        amps.append(c.amplitude)
    assert amps[0] / amps[1] == pytest.approx(2.0, rel=0.1)


def test_budget_is_reported():
    rep = locate_hopf(HOPF_FAMILY, "beta2", *HOPF_BRACKET)
    obs = observe_hopf(rep, max_periods=1.0)
    assert obs.observed is None and "budget" in obs.reason
    assert math.isfinite(obs.eps)
