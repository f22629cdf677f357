"""GEV distribution primitives.

Parameters follow the (tau, mu, xi) convention: scale, location, shape.
Distribution function::

    F(y) = exp(-[1 + xi (y - mu) / tau] ** (-1 / xi))     xi != 0
    F(y) = exp(-exp(-(y - mu) / tau))                       xi == 0

For xi != 0 the support endpoint is ``beta = mu - tau / xi`` (a lower bound
when xi > 0, an upper bound when xi < 0).
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DegenerateData, DomainError, OutOfSupport, ZeroShape

# Below this |xi| the xi != 0 formulas have lost all precision.
GUMBEL_EPS = 1e-8


def logsumexp(a: np.ndarray) -> float:
    """log(sum(exp(a))) with a max shift; -inf for an all -inf input."""
    m = float(np.max(a))
    if not math.isfinite(m):
        return m
    return m + math.log(float(np.sum(np.exp(a - m))))


@dataclass(frozen=True)
class GevParams:
    tau: float
    mu: float
    xi: float

    def __post_init__(self):
        for name in ("tau", "mu", "xi"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
        if not self.tau > 0:
            raise DomainError(f"tau must be positive, got {self.tau!r}")
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "xi", float(self.xi))

    def beta(self) -> float:
        return beta_of(self)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.tau, self.mu, self.xi)


@dataclass(frozen=True, eq=False)
class DataSample:
    """Sorted, validated observations.

    ``values`` is sorted ascending; ``observed`` keeps the original order
    (block maxima and CSV round trips need it). Both arrays are read-only.
    """

    values: np.ndarray
    observed: np.ndarray = field(repr=False)

    @classmethod
    def from_values(cls, values: Sequence[float] | np.ndarray) -> "DataSample":
        raw = np.array(values, dtype=float).ravel()
        if raw.size < 2:
            raise DegenerateData(f"need at least 2 observations, got {raw.size}")
        if not np.all(np.isfinite(raw)):
            raise DegenerateData("observations must be finite")
        srt = np.sort(raw)
        if srt[0] == srt[-1]:
            raise DegenerateData("all observations are equal")
        raw.flags.writeable = False
        srt.flags.writeable = False
        return cls(values=srt, observed=raw)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def y_min(self) -> float:
        return float(self.values[0])

    @property
    def y_max(self) -> float:
        return float(self.values[-1])

    @property
    def data_range(self) -> float:
        return self.y_max - self.y_min

    @cached_property
    def gaps_above_min(self) -> np.ndarray:
        # Y_i - Y_(1), exact for the reference point itself
        return self.values - self.values[0]

    @cached_property
    def gaps_below_max(self) -> np.ndarray:
        return self.values[-1] - self.values

    @cached_property
    def fingerprint(self) -> str:
        return hashlib.sha256(self.values.tobytes()).hexdigest()[:16]

    def affine(self, a: float, c: float) -> "DataSample":
        """Sample transformed as a*Y + c (a > 0), original order kept."""
        if not a > 0:
            raise DomainError("scale factor must be positive")
        return DataSample.from_values(a * self.observed + c)


@dataclass(frozen=True, eq=False)
class StandardizedValues:
    w: np.ndarray
    params: GevParams


def beta_of(params: GevParams) -> float:
    if params.xi == 0.0:
        raise ZeroShape("beta is undefined for xi == 0")
    return params.mu - params.tau / params.xi


def endpoints(params: GevParams) -> tuple[float, float]:
    if params.xi == 0.0:
        return (-math.inf, math.inf)
    b = beta_of(params)
    return (b, math.inf) if params.xi > 0 else (-math.inf, b)


def support_contains(params: GevParams, data: DataSample) -> bool:
    xi = params.xi
    if xi == 0.0:
        return True
    b = beta_of(params)
    if xi > 0:
        return b < data.y_min
    return b > data.y_max


def standardize(params: GevParams, data: DataSample) -> StandardizedValues:
    if params.xi == 0.0:
        raise ZeroShape("standardized values need xi != 0")
    w = 1.0 + params.xi * (data.values - params.mu) / params.tau
    if not np.all(w > 0):
        raise OutOfSupport(f"{params} leaves observations outside the support")
    w.flags.writeable = False
    return StandardizedValues(w=w, params=params)


def log_likelihood(params: GevParams, data: DataSample | np.ndarray) -> float:
    """Joint log-likelihood; ``-inf`` when some observation is out of support."""
    y = data.values if isinstance(data, DataSample) else np.asarray(data, dtype=float)
    tau, mu, xi = params.tau, params.mu, params.xi
    n = y.size
    z = (y - mu) / tau
    if abs(xi) < GUMBEL_EPS:
        return float(-n * math.log(tau) - z.sum() - np.exp(-z).sum())
    xz = xi * z
    if not np.all(xz > -1.0):
        return -math.inf
    logw = np.log1p(xz)
    lse = logsumexp(-logw / xi)
    if lse > 709.0:
        return -math.inf
    return float(-n * math.log(tau) - (1.0 + 1.0 / xi) * logw.sum() - math.exp(lse))


def logpdf(params: GevParams, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    tau, mu, xi = params.tau, params.mu, params.xi
    z = (y - mu) / tau
    if abs(xi) < GUMBEL_EPS:
        return -math.log(tau) - z - np.exp(-z)
    xz = np.atleast_1d(xi * z)
    out = np.full(xz.shape, -np.inf)
    ok = xz > -1.0
    logw = np.log1p(xz[ok])
    out[ok] = -math.log(tau) - (1.0 + 1.0 / xi) * logw - np.exp(-logw / xi)
    return out.reshape(np.shape(y))


def pdf(params: GevParams, y) -> np.ndarray:
    return np.exp(logpdf(params, y))


def cdf(params: GevParams, y):
    """Distribution function, clamped to 0/1 outside the support."""
    yy = np.asarray(y, dtype=float)
    tau, mu, xi = params.tau, params.mu, params.xi
    z = (yy - mu) / tau
    if abs(xi) < GUMBEL_EPS:
        out = np.exp(-np.exp(-z))
    else:
        xz = xi * z
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            t = np.exp(-np.log1p(np.maximum(xz, -1.0)) / xi)
        inside = xz > -1.0
        # below the lower endpoint (xi > 0) F = 0; above the upper (xi < 0) F = 1
        out = np.where(inside, np.exp(-t), 0.0 if xi > 0 else 1.0)
    return float(out) if out.ndim == 0 else out


def quantile(params: GevParams, p):
    pp = np.asarray(p, dtype=float)
    if np.any(~((pp > 0) & (pp < 1))):
        raise DomainError("quantile probabilities must lie in (0, 1)")
    tau, mu, xi = params.tau, params.mu, params.xi
    lg = -np.log(-np.log(pp))  # standard Gumbel quantile
    if abs(xi) < GUMBEL_EPS:
        out = mu + tau * lg
    else:
        # ((-log p)^(-xi) - 1) / xi == expm1(xi * lg) / xi
        out = mu + tau * np.expm1(xi * lg) / xi
    return float(out) if out.ndim == 0 else out


def draw(params: GevParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """Raw inverse-CDF draws in generation order (no validation, no sort)."""
    u = rng.random(n)
    # rng.random is in [0, 1); 0 would map to the lower endpoint
    u[u == 0.0] = np.nextafter(0.0, 1.0)
    return quantile(params, u)


def sample(params: GevParams, n: int, seed: int | Sequence[int]) -> DataSample:
    if n < 2:
        raise DomainError("sample size must be at least 2")
    return DataSample.from_values(draw(params, n, np.random.default_rng(seed)))
