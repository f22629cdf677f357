"""Global maximum-likelihood search over the profile likelihood.

The fit scans PL_n on a coarse shape grid, refines every sign change of
PL'_n with a bracketing root finder, adds the xi = 0 Gumbel slice when the
search interval contains it, and keeps the best candidate.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import brentq

from .core import DataSample, GevParams, beta_of
from .errors import DomainError, GevError, NoCandidate
from .profile import (
    DEFAULT_TOL,
    ProfileCurve,
    ProfilePoint,
    curve,
    gumbel_cross_section,
    profile_loglik,
)

WARN_LOW_SHAPE = "xi_hat <= {:g}: asymptotic normality unavailable"
WARN_AT_BOUND = "maximum at search bound"
WARN_TIE = "near-tie between candidates: flat likelihood ridge"
WARN_NEAR_UPPER = "xi_hat close to n-1: likelihood unbounded beyond this point"
WARN_SPURIOUS = "profile likelihood grows towards xi = n-1; that limit is ignored"
WARN_SLICE_FAIL = "profile slice failed at {} grid point(s)"
WARN_NO_INFERENCE = "inference unavailable: {}"


@dataclass(frozen=True)
class SearchConfig:
    xi_lower: float = -0.99
    xi_upper: float | None = None  # None: min(n - 1 - 1e-6, 5)
    coarse_grid_size: int = 256
    refine_tol: float = 1e-10
    beta_tol: float = DEFAULT_TOL
    warn_below: float = -0.5

    def resolved_upper(self, n: int) -> float:
        cap = n - 1 - 1e-6
        return min(cap, 5.0) if self.xi_upper is None else self.xi_upper

    def validate(self, n: int) -> None:
        hi = self.resolved_upper(n)
        if not (-1.0 < self.xi_lower < hi < n - 1):
            raise DomainError(
                f"need -1 < xi_lower < xi_upper < n-1, got {self.xi_lower}, {hi}, n={n}")
        if self.coarse_grid_size < 16:
            raise DomainError("coarse grid needs at least 16 points")
        if not (self.refine_tol > 0 and self.beta_tol > 0):
            raise DomainError("tolerances must be positive")

    def grid(self, n: int) -> np.ndarray:
        """Coarse grid, uniform in log(1 + xi) so points crowd towards -1."""
        lo, hi = math.log1p(self.xi_lower), math.log1p(self.resolved_upper(n))
        g = np.expm1(np.linspace(lo, hi, self.coarse_grid_size))
        g[0], g[-1] = self.xi_lower, self.resolved_upper(n)
        return g


@dataclass
class Candidate:
    xi: float
    pl: float
    pl_deriv: float
    kind: str  # "stationary", "gumbel" or "grid"
    point: ProfilePoint = field(repr=False)


@dataclass
class FitResult:
    theta_hat: GevParams
    beta_hat: float  # nan when xi_hat == 0
    loglik: float
    curve: ProfileCurve
    stationary_points: list[tuple[float, float]]
    warnings: list[str]
    config: SearchConfig
    n: int
    inference: Any = None  # InferenceResult, filled in by fit()

    @property
    def xi_hat(self) -> float:
        return self.theta_hat.xi

    @property
    def se(self):
        return None if self.inference is None else self.inference.se

    def to_dict(self) -> dict:
        se = self.se
        cfg = asdict(self.config)
        cfg["xi_upper"] = self.config.resolved_upper(self.n)
        out = {
            "tau": self.theta_hat.tau,
            "mu": self.theta_hat.mu,
            "xi": self.theta_hat.xi,
            "beta": None if math.isnan(self.beta_hat) else self.beta_hat,
            "loglik": self.loglik,
            "se": None if se is None else {"mu": se[0], "tau": se[1], "xi": se[2]},
            "warnings": list(self.warnings),
            "stationary_points": [{"xi": x, "pl": p} for x, p in self.stationary_points],
            "n": self.n,
            "config": cfg,
        }
        if self.inference is not None:
            out["hessian"] = self.inference.hessian.matrix.tolist()
        return out


def _refine(data: DataSample, lo: ProfilePoint, hi: ProfilePoint, cfg: SearchConfig
            ) -> ProfilePoint:
    """Root of PL'_n inside [lo.xi, hi.xi] where the derivative changes sign."""
    last = [lo]

    def deriv(x: float) -> float:
        near = min(last, key=lambda p: abs(p.xi - x))
        pt = profile_loglik(x, data, cfg.beta_tol, hint=near)
        last.append(pt)
        return pt.pl_deriv

    if lo.pl_deriv == 0.0:
        return lo
    if hi.pl_deriv == 0.0:
        return hi
    last.append(hi)
    root = brentq(deriv, lo.xi, hi.xi, xtol=cfg.refine_tol, rtol=4 * np.finfo(float).eps,
                  maxiter=200)
    near = min(last, key=lambda p: abs(p.xi - root))
    return profile_loglik(root, data, cfg.beta_tol, hint=near)


def _search(data: DataSample, cfg: SearchConfig) -> tuple[list[Candidate], ProfileCurve]:
    cfg.validate(data.n)
    crv = curve(data, cfg.grid(data.n), cfg.beta_tol)
    pts = crv.points
    if not pts:
        raise NoCandidate("every profile slice failed: " + "; ".join(m for _, m in crv.errors))
    cands = [Candidate(p.xi, p.pl, p.pl_deriv, "grid", p) for p in pts]
    for a, b in zip(pts, pts[1:]):
        da, db = a.pl_deriv, b.pl_deriv
        if not (math.isfinite(da) and math.isfinite(db)):
            continue
        if da == 0.0 or (da > 0) != (db > 0):
            try:
                s = _refine(data, a, b, cfg)
            except (GevError, ValueError, RuntimeError):
                continue
            cands.append(Candidate(s.xi, s.pl, s.pl_deriv, "stationary", s))
    if cfg.xi_lower <= 0.0 <= cfg.resolved_upper(data.n):
        try:
            g = gumbel_cross_section(data, cfg.beta_tol)
            cands.append(Candidate(0.0, g.pl, g.pl_deriv, "gumbel", g))
        except GevError:
            pass
    return cands, crv


def _pick(cands: list[Candidate], n: int) -> tuple[Candidate, bool]:
    best = max(c.pl for c in cands)
    tied = [c for c in cands if best - c.pl < 1e-9 * n]
    # stationary points before grid points, then the smaller |xi|
    rank = {"stationary": 0, "gumbel": 0, "grid": 1}
    tied.sort(key=lambda c: (rank[c.kind], abs(c.xi)))
    distinct = {round(c.xi, 6) for c in tied if c.kind != "grid"}
    return tied[0], len(distinct) > 1


def candidate_report(data: DataSample, config: SearchConfig | None = None
                     ) -> list[tuple[float, float, float]]:
    """Stationary points of PL_n as (xi, PL_n, PL'_n), best first."""
    cands, _ = _search(data, config or SearchConfig())
    rows = [(c.xi, c.pl, c.pl_deriv) for c in cands if c.kind == "stationary"]
    return sorted(rows, key=lambda r: -r[1])


def fit(data: DataSample, config: SearchConfig | None = None, inference: bool = True
        ) -> FitResult:
    """Global maximizer of the GEV log-likelihood over the search interval."""
    if not isinstance(data, DataSample):
        data = DataSample.from_values(data)
    cfg = config or SearchConfig()
    cands, crv = _search(data, cfg)
    win, tie = _pick(cands, data.n)
    warnings: list[str] = []
    if crv.errors:
        warnings.append(WARN_SLICE_FAIL.format(len(crv.errors)))
    upper = cfg.resolved_upper(data.n)
    if win.kind == "grid" and win.xi == crv.points[-1].xi and upper > data.n - 1 - 1e-3:
        # the climb towards n-1 is the unbounded direction, not a maximum
        below = _below_final_climb(cands, crv)
        if below:
            win, tie = _pick(below, data.n)
            warnings.append(WARN_SPURIOUS)
    p = win.point
    if win.kind == "grid" and win.xi in (crv.points[0].xi, crv.points[-1].xi):
        warnings.append(WARN_AT_BOUND)
    elif win.kind == "grid":
        # interior grid maximum with no bracketed stationary point nearby
        p = _polish_grid_max(data, crv, win, cfg)
    if tie:
        warnings.append(WARN_TIE)
    if p.xi <= cfg.warn_below:
        warnings.append(WARN_LOW_SHAPE.format(cfg.warn_below))
    if p.xi > data.n - 2:
        warnings.append(WARN_NEAR_UPPER)
    theta = p.params
    stationary = sorted(((c.xi, c.pl) for c in cands if c.kind in ("stationary", "gumbel")),
                        key=lambda r: -r[1])
    res = FitResult(
        theta_hat=theta,
        beta_hat=math.nan if theta.xi == 0.0 else beta_of(theta),
        loglik=p.pl,
        curve=crv,
        stationary_points=stationary,
        warnings=warnings,
        config=cfg,
        n=data.n,
    )
    if inference:
        from .inference import infer

        try:
            res.inference = infer(theta, data)
        except GevError as exc:
            res.warnings.append(WARN_NO_INFERENCE.format(exc))
    return res


def _below_final_climb(cands: list[Candidate], crv: ProfileCurve) -> list[Candidate]:
    """Candidates left of the ascending run that ends the coarse curve."""
    pts = crv.points
    i = len(pts) - 1
    while i > 0 and pts[i - 1].pl_deriv > 0:
        i -= 1
    if i == 0:
        return []
    cut = pts[i - 1].xi
    return [c for c in cands if c.xi <= cut]


def _polish_grid_max(data, crv, win, cfg) -> ProfilePoint:
    from scipy.optimize import minimize_scalar

    xs = [p.xi for p in crv.points]
    i = xs.index(win.xi)
    lo, hi = xs[i - 1], xs[i + 1]
    r = minimize_scalar(lambda x: -profile_loglik(x, data, cfg.beta_tol, hint=win.point).pl,
                        bounds=(lo, hi), method="bounded",
                        options={"xatol": cfg.refine_tol})
    pt = profile_loglik(float(r.x), data, cfg.beta_tol, hint=win.point)
    return pt if pt.pl >= win.pl else win.point
