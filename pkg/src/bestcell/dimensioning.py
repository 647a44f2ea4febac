"""Power budgets, outage, coverage and area rate density.

The link budget is interference limited: the maximum site power is set
so the mean other-cell interference at the receiver sits a fixed ratio
(default 1e5) above thermal noise.  Outage at an SIR target gamma* comes
from moment-matching the ratio f to a log-normal at each radius
(Fenton-Wilkinson style) and averaging the tail over the cell; the
matched spread is widened by sqrt(2) to compensate the moment fit's
underestimate of the tail.  Cell spectral efficiency uses the Shannon
rate at the SIR target that meets a coverage goal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .attachment import DEFAULT_GRID_POINTS, NetworkConfig, mobile_density, rb_grid
from .geometry import bs_density
from .interference import ocif_spatial_distribution
from .iopr import iopr_total
from .numerics import DEFAULT_QUADRATURE, ConvergenceError, QuadratureSpec, q_function

__all__ = [
    "SystemConstants",
    "LognormalFit",
    "RateDensityCurve",
    "DimensioningResult",
    "InfeasibleLoadError",
    "fit_lognormal",
    "max_bs_power",
    "power_density",
    "outage_at",
    "cell_outage",
    "coverage_curve",
    "rate_density",
    "compute_dimensioning",
    "cdma_bs_power",
]

GAMMA_SEARCH_DB = (-40.0, 40.0)
GAMMA_RESOLUTION_DB = 0.01


class InfeasibleLoadError(ValueError):
    """The aggregate load reaches or passes the power-equation pole."""


@dataclass(frozen=True)
class SystemConstants:
    """Radio-system constants for dimensioning.

    ``n_subcarriers`` splits the total noise power n0*bw evenly, so
    ``subcarrier_noise * n_subcarriers == n0 * bw`` holds exactly.
    ``interference_ratio`` is the design margin of mean interference
    over thermal noise in the interference-limited regime.
    """

    n0: float = 4e-21
    bw: float = 5e6
    interference_ratio: float = 1e5
    n_subcarriers: int = 512
    gamma_star: float = 1.0
    alpha: float = 0.5
    sigma_n_sq: float | None = None
    p_cch: float = 1.0

    def __post_init__(self) -> None:
        if self.n0 <= 0.0 or self.bw <= 0.0 or self.interference_ratio <= 0.0:
            raise ValueError("n0, bw and interference_ratio must be positive")
        if self.n_subcarriers < 1:
            raise ValueError("n_subcarriers must be positive")
        if self.gamma_star <= 0.0:
            raise ValueError("gamma_star must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.sigma_n_sq is None:
            object.__setattr__(self, "sigma_n_sq", self.n0 * self.bw)
        elif self.sigma_n_sq < 0.0:
            raise ValueError("sigma_n_sq must be nonnegative")

    @property
    def subcarrier_noise(self) -> float:
        return self.n0 * self.bw / self.n_subcarriers


@dataclass(frozen=True)
class LognormalFit:
    """Log-normal moment match, optionally with sqrt(2) tail widening."""

    m: float
    v: float
    mu: float
    sigma: float
    compensated: bool


def fit_lognormal(m: float, v: float, compensate: bool = False) -> LognormalFit:
    """Match a log-normal to mean ``m`` and variance ``v``.

    mu = ln(m / sqrt(1 + v/m^2)), sigma = sqrt(ln(1 + v/m^2)); when
    ``compensate`` is set the matched sigma is widened by sqrt(2).
    log1p keeps the match exact for v << m^2, where 1 + v/m^2 would
    round away the variance.
    """
    if m <= 0.0:
        raise ValueError("mean must be positive")
    if v < 0.0:
        raise ValueError("variance must be nonnegative")
    s2 = math.log1p(v / (m * m))
    mu = math.log(m) - 0.5 * s2
    sigma = math.sqrt(s2)
    if compensate:
        sigma *= math.sqrt(2.0)
    return LognormalFit(m=m, v=v, mu=mu, sigma=sigma, compensated=compensate)


def max_bs_power(rc: float, cfg: NetworkConfig, sys: SystemConstants,
                 r_inf: float = math.inf, n: int = DEFAULT_GRID_POINTS,
                 spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Maximum site power (W) at cell radius ``rc``.

    Sized so the cell-average mean interference gain carries the design
    ratio of interference over total thermal noise.
    """
    curve = ocif_spatial_distribution(replace(cfg, rc=rc), r_inf=r_inf, n=n, spec=spec)
    return sys.interference_ratio * sys.n0 * sys.bw / curve.mu_g


def power_density(rc: float, cfg: NetworkConfig, sys: SystemConstants,
                  r_inf: float = math.inf, n: int = DEFAULT_GRID_POINTS,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Transmit power per unit area (W/m^2) at cell radius ``rc``."""
    return max_bs_power(rc, cfg, sys, r_inf, n, spec) * bs_density(rc)


def _fit_params(m, v, compensate: bool):
    m = np.asarray(m, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(v < 0.0):
        raise ConvergenceError(
            "negative matched variance for f; tighten the moment grid",
            best_estimate=float(np.min(v)))
    s2 = np.log1p(v / (m * m))
    mu = np.log(m) - 0.5 * s2
    sigma = np.sqrt(s2)
    if compensate:
        sigma = sigma * math.sqrt(2.0)
    return mu, sigma


def _lognormal_tail(gamma_star: float, mu, sigma):
    """P[f > 1/gamma*] for f log-normal(mu, sigma), sigma may be 0."""
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    thr = -math.log(gamma_star) - mu
    out = np.empty_like(mu)
    deg = sigma == 0.0
    if np.any(deg):
        out[deg] = np.where(thr[deg] > 0.0, 0.0, np.where(thr[deg] < 0.0, 1.0, 0.5))
    if np.any(~deg):
        out[~deg] = q_function(thr[~deg] / sigma[~deg])
    return out


def outage_at(r_b, gamma_star: float, cfg: NetworkConfig,
              r_inf: float = math.inf, compensate: bool = True):
    """Outage probability P[f > 1/gamma*] at radius ``r_b``."""
    if gamma_star <= 0.0:
        raise ValueError("gamma_star must be positive")
    fbar, fsq = iopr_total(r_b, cfg, r_inf)
    m = np.asarray(fbar, dtype=float)
    v = np.asarray(fsq, dtype=float) - m * m
    mu, sigma = _fit_params(m, v, compensate)
    out = _lognormal_tail(gamma_star, mu, sigma)
    return float(out) if np.asarray(r_b).ndim == 0 else out


def _cell_tail_average(cfg: NetworkConfig, r_inf: float, n: int, compensate: bool):
    rb = rb_grid(cfg.rc, n)
    fbar, fsq = iopr_total(rb, cfg, r_inf)
    v = fsq - fbar * fbar
    mu, sigma = _fit_params(fbar, v, compensate)
    p = mobile_density(rb, cfg)
    z = float(np.trapezoid(p, rb))

    def average(gamma_star: float) -> float:
        o = _lognormal_tail(gamma_star, mu, sigma)
        return float(np.trapezoid(o * p, rb)) / z

    return average


def cell_outage(gamma_star: float, cfg: NetworkConfig, r_inf: float = math.inf,
                n: int = DEFAULT_GRID_POINTS, compensate: bool = True) -> float:
    """Cell-average outage at SIR target ``gamma_star`` (linear)."""
    if gamma_star <= 0.0:
        raise ValueError("gamma_star must be positive")
    return _cell_tail_average(cfg, r_inf, n, compensate)(gamma_star)


def coverage_curve(gamma_db: Sequence[float], cfg: NetworkConfig,
                   r_inf: float = math.inf, n: int = DEFAULT_GRID_POINTS,
                   compensate: bool = True) -> np.ndarray:
    """Coverage probability 1 - outage over a grid of SIR targets in dB."""
    average = _cell_tail_average(cfg, r_inf, n, compensate)
    gamma_db = np.asarray(gamma_db, dtype=float)
    return np.array([1.0 - average(10.0 ** (g / 10.0)) for g in gamma_db])


@dataclass(frozen=True)
class RateDensityCurve:
    """Shannon rate density against site density at a coverage target."""

    coverage_target: float
    gamma_star_db: float
    c_cell: float
    rc: np.ndarray
    cell_density: np.ndarray
    rate_density: np.ndarray


def rate_density(coverage_target: float, rc_list: Iterable[float],
                 cfg: NetworkConfig, r_inf: float = math.inf,
                 n: int = DEFAULT_GRID_POINTS, compensate: bool = True) -> RateDensityCurve:
    """Area spectral-rate density (bit/s/Hz/m^2) at a coverage target.

    Bisects the SIR target on a fixed dB bracket to 0.01 dB, takes the
    Shannon efficiency there, and scales by site density.  The achieved
    SIR and efficiency are independent of the cell radius; only the site
    density varies along ``rc_list``.
    """
    if not 0.0 < coverage_target < 1.0:
        raise ValueError("coverage_target must lie in (0, 1)")
    average = _cell_tail_average(cfg, r_inf, n, compensate)

    def cov(g_db: float) -> float:
        return 1.0 - average(10.0 ** (g_db / 10.0))

    lo, hi = GAMMA_SEARCH_DB
    if cov(lo) < coverage_target or cov(hi) > coverage_target:
        raise ValueError(
            f"coverage target {coverage_target:g} not bracketed on "
            f"[{lo:g}, {hi:g}] dB")
    while hi - lo > GAMMA_RESOLUTION_DB:
        mid = 0.5 * (lo + hi)
        if cov(mid) >= coverage_target:
            lo = mid
        else:
            hi = mid
    gamma_star_db = 0.5 * (lo + hi)
    c_cell = math.log2(1.0 + 10.0 ** (gamma_star_db / 10.0))
    rc = np.asarray(list(rc_list), dtype=float)
    if np.any(rc <= 0.0):
        raise ValueError("cell radii must be positive")
    dens = np.array([bs_density(r) for r in rc])
    return RateDensityCurve(coverage_target=coverage_target,
                            gamma_star_db=gamma_star_db, c_cell=c_cell,
                            rc=rc, cell_density=dens, rate_density=c_cell * dens)


@dataclass(frozen=True)
class DimensioningResult:
    """Bundle of the dimensioning curves for one configuration."""

    cfg: NetworkConfig
    sys: SystemConstants
    rc: np.ndarray
    p_max: np.ndarray
    power_density: np.ndarray
    gamma_db: np.ndarray
    coverage: np.ndarray
    rate: RateDensityCurve


def compute_dimensioning(cfg: NetworkConfig, sys: SystemConstants,
                         rc_list: Iterable[float], gamma_db: Sequence[float],
                         coverage_target: float, r_inf: float = math.inf,
                         n: int = DEFAULT_GRID_POINTS) -> DimensioningResult:
    """Convenience wrapper producing every dimensioning curve at once."""
    rc = np.asarray(list(rc_list), dtype=float)
    pmax = np.array([max_bs_power(r, cfg, sys, r_inf, n) for r in rc])
    pdens = pmax * np.array([bs_density(r) for r in rc])
    cov = coverage_curve(gamma_db, cfg, r_inf, n)
    rate = rate_density(coverage_target, rc, cfg, r_inf, n)
    return DimensioningResult(cfg=cfg, sys=sys, rc=rc, p_max=pmax,
                              power_density=pdens,
                              gamma_db=np.asarray(gamma_db, dtype=float),
                              coverage=cov, rate=rate)


def cdma_bs_power(users: Iterable[tuple[float, float, float]],
                  sys: SystemConstants) -> float:
    """Total CDMA site power for a set of (r_b, f_u, h_u) users.

    Control channels plus per-user shares, with the pole at aggregate
    load (1 + alpha gamma*)/gamma* raised as :class:`InfeasibleLoadError`.
    With no users the site transmits only the control power.
    """
    g = sys.gamma_star
    share = g / (1.0 + sys.alpha * g)
    sum_h = 0.0
    sum_load = 0.0
    for _r_b, f_u, h_u in users:
        if f_u < 0.0 or h_u < 0.0:
            raise ValueError("f_u and h_u must be nonnegative")
        sum_h += h_u
        sum_load += sys.alpha + f_u
    denom = 1.0 - share * sum_load
    if denom <= 0.0:
        raise InfeasibleLoadError(
            f"aggregate load {sum_load:g} reaches the pole "
            f"{(1.0 + sys.alpha * g) / g:g}")
    return (sys.p_cch + share * sys.sigma_n_sq * sum_h) / denom
