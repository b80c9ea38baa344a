"""Planar SIR model with saturated incidence and saturated treatment.

The state is the pair (S, I) of susceptible and infected fractions; the
recovered fraction is R = 1 - S - I.  All functions here are pure and take
a validated :class:`ModelParams`.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, NamedTuple

PARAM_KEYS = ("b", "delta", "gamma", "q", "m_prime", "beta", "alpha", "beta2", "alpha2")
POSITIVE_KEYS = ("b", "delta", "gamma", "beta", "alpha", "beta2", "alpha2")
FRACTION_KEYS = ("q", "m_prime")


class ParameterError(ValueError):
    """Raised when a parameter set violates the model's invariants."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ModelParams:
    """The nine model constants.

    Attributes:
        b: birth/death rate of susceptible and recovered individuals.
        delta: birth/death rate of infected individuals.
        gamma: natural recovery rate.
        q: vertical transmission fraction, in [0, 1].
        m_prime: fraction of vaccinated newborns, in [0, 1].
        beta: infection rate.
        alpha: saturation constant of the incidence.
        beta2: treatment rate.
        alpha2: saturation constant of the treatment.
    """

    b: float
    delta: float
    gamma: float
    q: float
    m_prime: float
    beta: float
    alpha: float
    beta2: float
    alpha2: float

    def __post_init__(self):
        for key in PARAM_KEYS:
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParameterError(key, f"expected a number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(key, f"must be finite, got {value!r}")
            object.__setattr__(self, key, float(value))
        for key in POSITIVE_KEYS:
            if getattr(self, key) <= 0.0:
                raise ParameterError(key, f"must be strictly positive, got {getattr(self, key)!r}")
        for key in FRACTION_KEYS:
            if not 0.0 <= getattr(self, key) <= 1.0:
                raise ParameterError(key, f"must lie in [0, 1], got {getattr(self, key)!r}")

    @property
    def p(self) -> float:
        return 1.0 - self.q

    @property
    def m(self) -> float:
        return 1.0 - self.m_prime

    @classmethod
    def from_pm(cls, *, b, delta, gamma, p, m, beta, alpha, beta2, alpha2) -> "ModelParams":
        """Build from the complementary fractions p = 1 - q and m = 1 - m_prime."""
        return cls(b=b, delta=delta, gamma=gamma, q=1.0 - p, m_prime=1.0 - m,
                   beta=beta, alpha=alpha, beta2=beta2, alpha2=alpha2)

    @classmethod
    def from_mapping(cls, values: Mapping[str, float]) -> "ModelParams":
        missing = [k for k in PARAM_KEYS if k not in values]
        if missing:
            raise ParameterError(missing[0], "missing required parameter")
        unknown = sorted(set(values) - set(PARAM_KEYS))
        if unknown:
            raise ParameterError(unknown[0], "unknown parameter")
        return cls(**{k: values[k] for k in PARAM_KEYS})

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in PARAM_KEYS}

    def as_tuple(self) -> tuple:
        """Flat (b, delta, gamma, p, m, beta, alpha, beta2, alpha2) used by the kernels."""
        return (self.b, self.delta, self.gamma, self.p, self.m,
                self.beta, self.alpha, self.beta2, self.alpha2)


class StateSI(NamedTuple):
    S: float
    I: float


def in_region(state, tol: float = 0.0) -> bool:
    """True when ``state`` lies in {S >= 0, I >= 0, S + I <= 1} up to ``tol``."""
    S, I = state
    return S >= -tol and I >= -tol and S + I <= 1.0 + tol


def parse_param_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        try:
            values[key] = float(value)
        except ValueError:
            raise ParameterError(key, f"not a number: {value!r}") from None
    return values


def load_params(path=None, overrides: Mapping[str, float] | None = None) -> ModelParams:
    """Read a parameter file and apply ``overrides`` on top (overrides win)."""
    values = parse_param_text(Path(path).read_text()) if path is not None else {}
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return ModelParams.from_mapping(values)


def format_params(params: ModelParams) -> str:
    return "".join(f"{k} = {getattr(params, k)!r}\n" for k in PARAM_KEYS)


def incidence(params: ModelParams, state) -> float:
    S, I = state
    return params.beta * S * I / (1.0 + params.alpha * I)


def treatment(params: ModelParams, I: float) -> float:
    return params.beta2 * I / (1.0 + params.alpha2 * I)


def vector_field(params: ModelParams, state) -> tuple[float, float]:
    S, I = state
    p, m = params.p, params.m
    inc = params.beta * S * I / (1.0 + params.alpha * I)
    dS = -inc - params.b * S + params.b * m * (1.0 - I) + p * params.delta * I
    dI = inc - p * params.delta * I - params.gamma * I - params.beta2 * I / (1.0 + params.alpha2 * I)
    return dS, dI


def jacobian(params: ModelParams, state) -> tuple[tuple[float, float], tuple[float, float]]:
    """Exact Jacobian of :func:`vector_field` as a nested 2x2 tuple."""
    S, I = state
    beta, alpha, b = params.beta, params.alpha, params.b
    pd = params.p * params.delta
    den = 1.0 + alpha * I
    c_i = beta * I / den
    c_s = beta * S / (den * den)
    d_i = params.beta2 / (1.0 + params.alpha2 * I) ** 2
    return ((-c_i - b, -c_s - b * params.m + pd),
            (c_i, c_s - pd - params.gamma - d_i))


def r0(params: ModelParams) -> float:
    """Basic reproduction number with treatment."""
    return params.beta * params.m / (params.beta2 + params.p * params.delta + params.gamma)


def r0_star(params: ModelParams) -> float:
    """Basic reproduction number without treatment (beta2 = 0)."""
    return params.beta * params.m / (params.p * params.delta + params.gamma)


def recovered_fraction(state) -> float:
    S, I = state
    return 1.0 - S - I
