"""Profile likelihood over the shape parameter.

For a fixed xi != 0 the log-likelihood restricted to the slice
{(tau, mu): all w_i > 0} has a unique maximizer. With
delta_i = xi (Y_i - beta) the maximizing support endpoint beta_n(xi) is the
unique root of the strictly increasing function

    H_n(beta) = sum delta^(-1-1/xi) / (sum delta^(-1/xi) * sum delta^(-1))
                - (xi + 1) / n,

and the scale follows in closed form as
tau_n(xi) = {(1/n) sum delta^(-1/xi)}^(-xi).

Numerics
--------
Every slice quantity is evaluated relative to the observation nearest to
beta (Y_(1) for xi > 0, Y_(n) for xi < 0). With ``t`` the gap between beta
and that observation and ``d_i >= 0`` the distance of Y_i from it,

    delta_i = |xi| (t + d_i),   ell_i = log1p(d_i / t),

and all the 1/xi-sized terms in PL_n and PL'_n cancel analytically. This keeps
the slice accurate down to |xi| ~ 1e-8, where t ~ tau / |xi| is huge.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import GUMBEL_EPS, DataSample, GevParams, log_likelihood
from .errors import BracketFailure, ConvergenceFailure, DomainError, GevError

DEFAULT_TOL = 1e-12
# below this |xi| the analytic PL'_n loses too many digits to cancellation
ANALYTIC_DERIV_EPS = 1e-4
_FD_STEP = 2e-3
_MAX_ITER = 200

CSV_HEADER = ("xi", "beta_n", "tau_n", "mu_n", "pl", "pl_deriv", "iters")


@dataclass(frozen=True)
class ProfilePoint:
    xi: float
    beta_n: float  # nan on the Gumbel slice
    tau_n: float
    mu_n: float
    pl: float
    pl_deriv: float
    solver_iterations: int = 0
    # gap between beta_n and the nearest observation; warm-start hint
    gap: float = field(default=math.nan, repr=False, compare=False)

    @property
    def params(self) -> GevParams:
        return GevParams(self.tau_n, self.mu_n, 0.0 if self.is_gumbel else self.xi)

    @property
    def is_gumbel(self) -> bool:
        return abs(self.xi) < GUMBEL_EPS


@dataclass
class ProfileCurve:
    points: list[ProfilePoint]
    n: int
    y_min: float
    y_max: float
    fingerprint: str
    errors: list[tuple[float, str]] = field(default_factory=list)

    @property
    def xi(self) -> np.ndarray:
        return np.array([p.xi for p in self.points])

    @property
    def pl(self) -> np.ndarray:
        return np.array([p.pl for p in self.points])

    @property
    def pl_deriv(self) -> np.ndarray:
        return np.array([p.pl_deriv for p in self.points])

    @property
    def beta_n(self) -> np.ndarray:
        return np.array([p.beta_n for p in self.points])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for p in self.points:
            writer.writerow(
                [_fmt(p.xi), _fmt(p.beta_n), _fmt(p.tau_n), _fmt(p.mu_n),
                 _fmt(p.pl), _fmt(p.pl_deriv), p.solver_iterations]
            )
        return buf.getvalue()


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# -- slice evaluation in gap coordinates ------------------------------------

def _offsets(xi: float, data: DataSample) -> tuple[np.ndarray, float]:
    """Distances d_i >= 0 from the reference observation, and its value."""
    if xi > 0:
        return data.gaps_above_min, data.y_min
    return data.gaps_below_max, data.y_max


class _Slice:
    """Sums needed on one xi-slice at a given gap t = |beta - Y_ref|."""

    __slots__ = ("xi", "t", "n", "ell", "w", "lse", "q", "r", "ewq", "ewr")

    def __init__(self, xi: float, t: float, d: np.ndarray):
        self.xi = xi
        self.t = t
        self.n = d.size
        s = t + d
        self.q = d / s
        self.r = t / s
        self.ell = np.log1p(d / t)
        a = self.ell * (-1.0 / xi)
        m = float(a.max())
        e = np.exp(a - m)
        se = float(e.sum())
        self.w = e / se
        self.lse = m + math.log(se)
        self.ewq = float(self.w @ self.q)
        self.ewr = float(self.w @ self.r)

    def root_fn(self) -> float:
        """log of (n / (1 + xi)) * sum delta^(-1-1/xi) / (sum delta^(-1/xi) sum delta^(-1)).

        Zero exactly where H_n vanishes, and monotone in the same direction.
        """
        a1 = math.log1p(-self.ewq) if self.ewq < 0.5 else math.log(self.ewr)
        mq = float(self.q.mean())
        a2 = math.log1p(-mq) if mq < 0.5 else math.log(float(self.r.mean()))
        return a1 - a2 - math.log1p(self.xi)

    def root_fn_dlogt(self) -> float:
        qr = self.q * self.r
        var_w = float(self.w @ (self.q - self.ewq) ** 2)
        p = -1.0 / self.xi
        return (float(self.w @ qr) + p * var_w) / self.ewr - float(qr.mean()) / float(self.r.mean())

    def log_tau(self) -> float:
        return math.log(abs(self.xi)) + math.log(self.t) - self.xi * (self.lse - math.log(self.n))

    def pl(self) -> float:
        n, xi = self.n, self.xi
        lam = math.log(abs(xi)) + math.log(self.t)
        return (-n * lam - n * (self.lse - math.log(n))
                - ((xi + 1.0) / xi) * float(self.ell.sum()) - n)

    def pl_deriv(self) -> float:
        n, xi = self.n, self.xi
        return -n / xi + (float(self.ell.sum()) - n * float(self.w @ self.ell)) / (xi * xi)


def _check_xi(xi: float, n: int) -> None:
    if not (-1.0 < xi < n - 1):
        raise DomainError(f"xi must lie in (-1, n-1) = (-1, {n - 1}), got {xi!r}")


def _gap_of(beta: float, xi: float, data: DataSample) -> float:
    t = data.y_min - beta if xi > 0 else beta - data.y_max
    if not t > 0:
        side = "below Y_(1)" if xi > 0 else "above Y_(n)"
        raise DomainError(f"beta={beta!r} must lie {side} for xi={xi!r}")
    return t


def h_n(beta: float, xi: float, data: DataSample) -> float:
    """The monotone function whose root is the slice maximizer beta_n(xi)."""
    if xi == 0.0:
        raise DomainError("h_n needs xi != 0")
    t = _gap_of(beta, xi, data)
    d, _ = _offsets(xi, data)
    g = _Slice(xi, t, d).root_fn()
    return (1.0 + xi) / data.n * math.expm1(g)


def tau_of(xi: float, beta: float, data: DataSample) -> float:
    """Closed-form slice scale {(1/n) sum [xi (Y_i - beta)]^(-1/xi)}^(-xi)."""
    if xi == 0.0:
        raise DomainError("tau_of needs xi != 0")
    t = _gap_of(beta, xi, data)
    d, _ = _offsets(xi, data)
    return math.exp(_Slice(xi, t, d).log_tau())


def _beta_from_gap(xi: float, t: float, data: DataSample) -> float:
    return data.y_min - t if xi > 0 else data.y_max + t


def _solve_gap(xi: float, data: DataSample, tol: float, guess: float | None = None
               ) -> tuple[_Slice, int]:
    """Safeguarded Newton on log t for the slice root, keeping a sign bracket."""
    d, ref = _offsets(xi, data)
    rng = data.data_range
    # G is decreasing in log t for xi > 0 (beta = Y_(1) - t), increasing for xi < 0
    orient = -1.0 if xi > 0 else 1.0
    s_floor = math.log(rng) + math.log(1e-300)
    s_ceil = math.log(rng) + 1000.0 * math.log(2.0)
    evals = 0

    cache: dict[float, _Slice] = {}

    def g_at(s: float) -> float:
        nonlocal evals
        evals += 1
        st = _Slice(xi, math.exp(s), d)
        cache[s] = st
        return st.root_fn()

    # above the root (in log t) orient * G > 0
    if guess is not None and guess > 0 and math.isfinite(guess):
        s0 = min(max(math.log(guess), s_floor), s_ceil)
        g0 = g_at(s0)
        above = orient * g0 > 0
        step = 0.25
        s1 = s0
        while True:
            s1 = s1 - step if above else s1 + step
            if not (s_floor <= s1 <= s_ceil):
                raise BracketFailure(f"no sign change of H_n while expanding from t={guess!r} at xi={xi!r}")
            g1 = g_at(s1)
            if (orient * g1 > 0) != above or g1 == 0.0:
                break
            s0, g0 = s1, g1
            step *= 2.0
        lo, hi = (s1, s0) if above else (s0, s1)
    else:
        # t = range * 1e-9 on the near side, shrinking further if needed
        lo = math.log(rng * 1e-9)
        while orient * g_at(lo) > 0:
            lo -= math.log(1e3)
            if lo < s_floor:
                raise BracketFailure(f"H_n has no root near the boundary at xi={xi!r}")
        k = 0
        hi = math.log(rng)
        while orient * g_at(hi) < 0:
            k += 1
            hi = math.log(rng) + k * math.log(2.0)
            if hi > s_ceil:
                raise BracketFailure(f"H_n has no root far from the boundary at xi={xi!r}")

    # lo: orient*G <= 0, hi: orient*G >= 0
    x = 0.5 * (lo + hi)
    for _ in range(_MAX_ITER):
        st = cache.get(x) or _Slice(xi, math.exp(x), d)
        if x not in cache:
            evals += 1
        g = st.root_fn()
        if g == 0.0:
            return st, evals
        if orient * g > 0:
            hi = x
        else:
            lo = x
        dg = st.root_fn_dlogt()
        newton_ok = dg != 0.0 and math.isfinite(dg) and orient * dg > 0
        x_new = x - g / dg if newton_ok else 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        t = st.t
        # beta accurate to tol*max(1,|beta|) and the gap itself to tol relative
        step_tol = tol * min(t, max(1.0, abs(ref) + t))
        if abs(math.expm1(x_new - x)) * t < step_tol or (hi - lo) * t < step_tol:
            return _Slice(xi, math.exp(x_new), d), evals + 1
        if x_new == x or x_new in (lo, hi):
            return st, evals
        x = x_new
    raise ConvergenceFailure(f"slice solver did not converge at xi={xi!r}")


def solve_beta(xi: float, data: DataSample, tol: float = DEFAULT_TOL) -> float:
    """Unique root of :func:`h_n` in the xi-dependent domain of beta."""
    if xi == 0.0:
        raise DomainError("solve_beta needs xi != 0")
    _check_xi(xi, data.n)
    if not tol > 0:
        raise DomainError("tol must be positive")
    st, _ = _solve_gap(xi, data, tol)
    return _beta_from_gap(xi, st.t, data)


def _point_from_slice(st: _Slice, data: DataSample, iters: int) -> ProfilePoint:
    xi, t = st.xi, st.t
    log_tau = st.log_tau()
    # mu = beta + tau/xi, rewritten around the reference observation
    excess = t * math.expm1(-xi * (st.lse - math.log(st.n)))
    mu = data.y_min + excess if xi > 0 else data.y_max - excess
    return ProfilePoint(
        xi=xi,
        beta_n=_beta_from_gap(xi, t, data),
        tau_n=math.exp(log_tau),
        mu_n=mu,
        pl=st.pl(),
        pl_deriv=st.pl_deriv(),
        solver_iterations=iters,
        gap=t,
    )


def _gap_guess(xi: float, hint: ProfilePoint | None, data: DataSample) -> float | None:
    """Predict the gap at xi from a neighbouring slice's (tau, mu)."""
    if hint is None or not math.isfinite(hint.tau_n):
        return None
    if xi > 0:
        g = data.y_min - hint.mu_n + hint.tau_n / xi
    else:
        g = hint.mu_n - hint.tau_n / xi - data.y_max
    if g > 0:
        return g
    # cancellation near the boundary; fall back to the neighbour's own gap
    same_side = (hint.xi > 0) == (xi > 0) and not hint.is_gumbel
    return hint.gap if same_side and math.isfinite(hint.gap) else None


def _analytic_point(xi: float, data: DataSample, tol: float, hint: ProfilePoint | None
                    ) -> ProfilePoint:
    st, iters = _solve_gap(xi, data, tol, _gap_guess(xi, hint, data))
    return _point_from_slice(st, data, iters)


def _fd_deriv(xi: float, data: DataSample, tol: float, hint: ProfilePoint | None) -> float:
    """Richardson-extrapolated central difference of PL_n at xi."""
    def pl(x: float) -> float:
        if abs(x) < GUMBEL_EPS:
            return gumbel_cross_section(data, tol, with_deriv=False).pl
        return _analytic_point(x, data, tol, hint).pl

    h = _FD_STEP
    d1 = (pl(xi + h) - pl(xi - h)) / (2 * h)
    d2 = (pl(xi + h / 2) - pl(xi - h / 2)) / h
    return (4.0 * d2 - d1) / 3.0


def profile_loglik(xi: float, data: DataSample, tol: float = DEFAULT_TOL,
                   hint: ProfilePoint | None = None) -> ProfilePoint:
    """Slice maximizer and profile log-likelihood PL_n(xi).

    ``hint`` is an already solved neighbouring point used to warm-start the
    root search; the result does not depend on it beyond solver tolerance.
    """
    _check_xi(xi, data.n)
    if abs(xi) < GUMBEL_EPS:
        return gumbel_cross_section(data, tol)
    pt = _analytic_point(xi, data, tol, hint)
    if abs(xi) < ANALYTIC_DERIV_EPS:
        pt = _replace_deriv(pt, _fd_deriv(xi, data, tol, pt))
    return pt


def _replace_deriv(pt: ProfilePoint, deriv: float) -> ProfilePoint:
    return ProfilePoint(pt.xi, pt.beta_n, pt.tau_n, pt.mu_n, pt.pl, deriv,
                        pt.solver_iterations, pt.gap)


def profile_deriv(xi: float, data: DataSample, point: ProfilePoint) -> float:
    """PL'_n(xi) from the analytic formula at an already solved slice."""
    if xi == 0.0:
        raise DomainError("the analytic derivative needs xi != 0")
    if point.xi != xi or point.is_gumbel:
        raise DomainError("point was not solved at this xi")
    t = point.gap if math.isfinite(point.gap) else _gap_of(point.beta_n, xi, data)
    d, _ = _offsets(xi, data)
    return _Slice(xi, t, d).pl_deriv()


def gumbel_cross_section(data: DataSample, tol: float = DEFAULT_TOL,
                         with_deriv: bool = True) -> ProfilePoint:
    """Slice maximizer at xi = 0.

    Solves the one-dimensional Gumbel scale equation
    tau = mean(Y) - sum Y e^{-Y/tau} / sum e^{-Y/tau} (strictly increasing
    residual in tau), then mu = -tau log((1/n) sum e^{-Y/tau}).
    """
    z = data.gaps_above_min
    zbar = float(z.mean())
    n = data.n

    def resid(tau: float) -> tuple[float, float]:
        a = -z / tau
        e = np.exp(a - a.max())
        w = e / e.sum()
        m = float(w @ z)
        var = float(w @ (z - m) ** 2)
        return tau - zbar + m, 1.0 + var / (tau * tau)

    lo, hi = 0.0, zbar  # resid(0+) = -zbar < 0, resid(zbar) > 0
    tau = min(max(math.sqrt(6.0 * float(z.var())) / math.pi, 1e-3 * zbar), 0.999 * zbar)
    for it in range(1, _MAX_ITER + 1):
        f, df = resid(tau)
        if f > 0:
            hi = tau
        else:
            lo = tau
        new = tau - f / df
        if not (lo < new < hi):
            new = 0.5 * (lo + hi)
        if abs(new - tau) <= tol * tau or f == 0.0:
            tau = new
            break
        tau = new
    else:
        raise ConvergenceFailure("Gumbel slice solver hit the iteration cap")
    a = -z / tau
    m = float(a.max())
    mu = data.y_min - tau * (m + math.log(float(np.exp(a - m).sum())) - math.log(n))
    pl = log_likelihood(GevParams(tau, mu, 0.0), data)
    pt = ProfilePoint(0.0, math.nan, tau, mu, pl, math.nan, it)
    if with_deriv:
        pt = _replace_deriv(pt, _fd_deriv(0.0, data, tol, pt))
    return pt


def curve(data: DataSample, xi_grid: Sequence[float] | np.ndarray,
          tol: float = DEFAULT_TOL, warm_start: bool = True) -> ProfileCurve:
    """Profile points along an increasing grid.

    Evaluation is sequential; each solve is warm-started from the previous
    successful point unless ``warm_start`` is false. Failed points are
    recorded in ``errors`` and skipped.
    """
    grid = [float(x) for x in xi_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("xi grid must be strictly increasing")
    for x in grid:
        _check_xi(x, data.n)
    out = ProfileCurve([], data.n, data.y_min, data.y_max, data.fingerprint)
    prev = None
    for x in grid:
        try:
            pt = profile_loglik(x, data, tol, hint=prev if warm_start else None)
        except GevError as exc:
            out.errors.append((x, str(exc)))
            continue
        out.points.append(pt)
        prev = pt
    return out


def stationarity_residuals(point: ProfilePoint, data: DataSample) -> tuple[float, float]:
    """Scaled residuals of the two slice optimality conditions.

    First: relative mismatch of tau with its closed form. Second: the beta
    equation written as (n / (1 + xi)) H_n(beta), dimensionless.
    """
    xi = point.xi
    d, _ = _offsets(xi, data)
    st = _Slice(xi, _gap_of(point.beta_n, xi, data), d)
    r_tau = abs(math.exp(st.log_tau()) / point.tau_n - 1.0)
    r_beta = abs(math.expm1(st.root_fn()))
    return r_tau, r_beta
