"""Reference parameter sets and random samplers shared by the tests."""

import numpy as np

from satsir.equilibria import ExistenceCase, equilibrium_report
from satsir.model import ModelParams

BASE = dict(b=0.2, delta=0.01, gamma=0.01, p=0.02, beta=0.2, alpha=0.4)

# worked example below threshold, and the same with r0 = 1
EXAMPLE_BELOW = ModelParams.from_pm(**BASE, m=0.3, beta2=0.1, alpha2=10.0)
EXAMPLE_AT_ONE = ModelParams.from_pm(**BASE, m=0.3, beta2=0.0498, alpha2=10.0)
EXAMPLE_A2 = EXAMPLE_AT_ONE.replace(alpha2=2.0)
# branch diagrams: backward with alpha2 = 16, forward with alpha2 = 3.8
BACKWARD_SET = ModelParams.from_pm(**BASE, m=0.1, beta2=0.01, alpha2=16.0)
FORWARD_SET = BACKWARD_SET.replace(alpha2=3.8)
# region-map settings
MAP_SET = ModelParams.from_pm(gamma=0.01, beta=0.2, b=0.2, m=0.3, p=0.02, delta=0.1,
                              alpha=0.4, beta2=0.05, alpha2=5.0)
PARTITION_SET = ModelParams.from_pm(alpha=0.4, beta=0.3, b=0.2, gamma=0.03, delta=0.05, p=0.3,
                                    m=0.3, beta2=0.05, alpha2=5.0)
# a supercritical Hopf family (beta2 is the bifurcation parameter)
HOPF_FAMILY = ModelParams.from_pm(b=0.0536, delta=0.934, gamma=0.0014, p=0.9762, m=0.4548,
                                  beta=13.2853, alpha=0.0387, beta2=1.8856, alpha2=21.0556)
HOPF_BRACKET = (1.3, 1.5)
# a subcritical one: the cycle born at the Hopf point repels
SUBCRITICAL_FAMILY = ModelParams(b=0.03908577226511454, delta=0.6371766555602055, gamma=0.0880381664579031,
                                 q=0.5920394661650643, m_prime=0.04948330266513523, beta=3.819276367850493,
                                 alpha=0.6743273749788391, beta2=2.3025581413651, alpha2=89.25942223406548)
SUBCRITICAL_BRACKET = (2.2, 2.4)


def random_params(rng, **fixed) -> ModelParams:
    """Broad log-uniform draw over the admissible parameter space."""
    values = dict(
        b=10 ** rng.uniform(-2, 0), delta=rng.uniform(0.01, 1.0), gamma=10 ** rng.uniform(-3, -0.3),
        p=rng.uniform(0.0, 1.0), m=rng.uniform(0.0, 1.0), beta=10 ** rng.uniform(-1, 1.3),
        alpha=10 ** rng.uniform(-2, 1), beta2=10 ** rng.uniform(-3, 0.5),
        alpha2=10 ** rng.uniform(-1, 2),
    )
    values.update(fixed)
    return ModelParams.from_pm(**values)


def random_state(rng):
    """Uniform point of the triangle S, I >= 0, S + I <= 1."""
    S, I = rng.uniform(0.0, 1.0, 2)
    if S + I > 1.0:
        S, I = 1.0 - S, 1.0 - I
    return float(S), float(I)


def two_endemic_sets(n: int, seed: int = 0) -> list:
    """Parameter sets with two positive endemic equilibria (max{P1, R0+} < r0 < 1)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        b = 10 ** rng.uniform(-2, 0)
        d = rng.uniform(0.01, 1.0)
        g = 10 ** rng.uniform(-3, -0.5)
        p = rng.uniform(0.01, 1.0)
        m = rng.uniform(0.05, 1.0)
        beta = 10 ** rng.uniform(-1, 1)
        K0 = p * d + g
        if beta * m <= K0:
            continue
        beta2 = beta * m / rng.uniform(0.3, 1.0) - K0
        params = ModelParams.from_pm(b=b, delta=d, gamma=g, p=p, m=m, beta=beta,
                                     alpha=10 ** rng.uniform(-2, 1), beta2=beta2,
                                     alpha2=10 ** rng.uniform(-1, 2))
        if equilibrium_report(params).case is ExistenceCase.TWO_ENDEMIC:
            out.append(params)
    return out


def e2_sets(n: int, seed: int = 0) -> list:
    """Random parameter sets where E2 exists (any existence case)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        params = random_params(rng)
        if equilibrium_report(params).e2 is not None:
            out.append(params)
    return out


def at_threshold(rng, shear_max: float = 3.0) -> ModelParams:
    """Random set with r0 = 1 exactly (beta = (p delta + gamma + beta2) / m), moderate shear."""
    while True:
        b = rng.uniform(0.2, 1.0)
        d = rng.uniform(0.05, 1.0)
        g = rng.uniform(0.01, 0.3)
        p = rng.uniform(0.1, 1.0)
        m = rng.uniform(0.3, 1.0)
        beta2 = rng.uniform(0.01, 0.5)
        if (g + beta2 + b * m) / b > shear_max:
            continue
        return ModelParams.from_pm(b=b, delta=d, gamma=g, p=p, m=m, beta=(p * d + g + beta2) / m,
                                   alpha=rng.uniform(0.1, 3.0), beta2=beta2,
                                   alpha2=rng.uniform(0.1, 3.0))
