"""Moments of the interference-over-own-power ratio f.

f is the total interfering gain divided by the serving-site gain; its
first two moments drive both the outage model and the uplink/downlink
power budgets.  The same near-2-sites-plus-fluid-ring split as the gain
model applies, but every term reduces to a closed-form Q expression in
the dB gap variable (N(0, 2 sigma^2)), shifted by a correction delta_j
that moves the gap's conditioning from the single-site marginal to the
joint attachment event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attachment import (
    DEFAULT_GRID_POINTS,
    NetworkConfig,
    attach_qinv,
    marginal_not_in_cell,
    mobile_density,
    rb_grid,
)
from .geometry import bs_density, nearest_distances
from .numerics import ConvergenceError, q_function

__all__ = [
    "IoprCurve",
    "iopr_delta",
    "iopr_near_mean",
    "iopr_far_mean",
    "iopr_second_moments",
    "iopr_total",
    "iopr_spatial_stats",
]


def _gap_coef(cfg: NetworkConfig) -> float:
    return cfg.eta / (math.sqrt(2.0) * cfg.a * cfg.sigma_db)


def _rbar(r_b, j: int, cfg: NetworkConfig):
    nd = nearest_distances(r_b, cfg.rc)
    return (nd.r1, nd.r2, nd.r3)[j - 1]


def iopr_delta(r_b, j: int, cfg: NetworkConfig):
    """Mean-shift correction for conditioning on joint attachment.

    delta_j = (Q^-1(P_attach) - gap_j) / sigma, where gap_j is the dB
    comparison threshold against site j in units of the gap's standard
    deviation.  Always nonnegative, because the joint attachment
    probability never exceeds any single marginal.
    """
    if j not in (1, 2, 3):
        raise ValueError("delta is defined for j in {1, 2, 3}")
    r_b = np.asarray(r_b, dtype=float)
    gap = _gap_coef(cfg) * np.log(r_b / _rbar(r_b, j, cfg))
    out = (attach_qinv(r_b, cfg) - gap) / cfg.sigma_db
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def iopr_near_mean(r_b, j: int, cfg: NetworkConfig):
    """Mean of G_j / G_own given attachment, for the nearest two sites."""
    if j not in (1, 2):
        raise ValueError("near terms exist for j = 1 and 2 only")
    r_b = np.asarray(r_b, dtype=float)
    rbar = _rbar(r_b, j, cfg)
    gap = _gap_coef(cfg) * np.log(r_b / rbar)
    sas = math.sqrt(2.0) * cfg.a * cfg.sigma_db
    delta = iopr_delta(r_b, j, cfg)
    marg = marginal_not_in_cell(r_b, rbar, cfg)
    tilt = math.exp((cfg.a * cfg.sigma_db) ** 2)
    out = tilt / marg * (r_b / rbar) ** cfg.eta * q_function(gap + sas + delta)
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def _ring_factor(r_b, cfg: NetworkConfig, r_inf: float):
    """2 pi rho_BS r_b^eta (rd^(2-eta) - r_inf^(2-eta)) / (eta - 2)."""
    nd = nearest_distances(r_b, cfg.rc)
    if math.isfinite(r_inf) and np.any(r_inf <= nd.rd):
        raise ValueError("r_inf must exceed the fluid ring's inner radius")
    tail = 0.0 if math.isinf(r_inf) else r_inf ** (2.0 - cfg.eta)
    ring = nd.rd ** (2.0 - cfg.eta) - tail
    return (2.0 * math.pi * bs_density(cfg.rc) * np.asarray(r_b, dtype=float) ** cfg.eta
            * ring / (cfg.eta - 2.0))


def iopr_far_mean(r_b, cfg: NetworkConfig, r_inf: float = math.inf):
    """Mean of the fluid-ring contribution to f beyond the second site."""
    r_b = np.asarray(r_b, dtype=float)
    rbar3 = _rbar(r_b, 3, cfg)
    gap = _gap_coef(cfg) * np.log(r_b / rbar3)
    sas = math.sqrt(2.0) * cfg.a * cfg.sigma_db
    delta = iopr_delta(r_b, 3, cfg)
    marg = marginal_not_in_cell(r_b, rbar3, cfg)
    tilt = math.exp((cfg.a * cfg.sigma_db) ** 2)
    out = _ring_factor(r_b, cfg, r_inf) / marg * tilt * q_function(gap + sas + delta)
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def iopr_second_moments(r_b, cfg: NetworkConfig, r_inf: float = math.inf):
    """Second moments of the three f terms, as a (f1sq, f2sq, f3sq) tuple.

    Same structure as the means with the log-normal tilt squared in the
    exponent (exp(4 sigma^2 a^2)) and the Q shift doubled.
    """
    r_b = np.asarray(r_b, dtype=float)
    sas = math.sqrt(2.0) * cfg.a * cfg.sigma_db
    tilt2 = math.exp(4.0 * (cfg.a * cfg.sigma_db) ** 2)
    out = []
    for j in (1, 2):
        rbar = _rbar(r_b, j, cfg)
        gap = _gap_coef(cfg) * np.log(r_b / rbar)
        delta = iopr_delta(r_b, j, cfg)
        marg = marginal_not_in_cell(r_b, rbar, cfg)
        out.append(tilt2 / marg * (r_b / rbar) ** (2.0 * cfg.eta)
                   * q_function(gap + 2.0 * sas + delta))
    rbar3 = _rbar(r_b, 3, cfg)
    gap3 = _gap_coef(cfg) * np.log(r_b / rbar3)
    delta3 = iopr_delta(r_b, 3, cfg)
    marg3 = marginal_not_in_cell(r_b, rbar3, cfg)
    out.append(_ring_factor(r_b, cfg, r_inf) ** 2 / marg3 * tilt2
               * q_function(gap3 + 2.0 * sas + delta3))
    if np.asarray(r_b).ndim == 0:
        return tuple(float(np.asarray(o)) for o in out)
    return tuple(np.asarray(o) for o in out)


def iopr_total(r_b, cfg: NetworkConfig, r_inf: float = math.inf):
    """First and second moment of the total ratio f at radius ``r_b``.

    The second moment expands the square of the three-term sum, with the
    cross terms taken as products of the individual means.
    """
    f1 = iopr_near_mean(r_b, 1, cfg)
    f2 = iopr_near_mean(r_b, 2, cfg)
    f3 = iopr_far_mean(r_b, cfg, r_inf)
    f1sq, f2sq, f3sq = iopr_second_moments(r_b, cfg, r_inf)
    fbar = f1 + f2 + f3
    fsq = f1sq + f2sq + f3sq + 2.0 * (f1 * f2 + f1 * f3 + f2 * f3)
    return fbar, fsq


@dataclass(frozen=True)
class IoprCurve:
    """Ratio moments tabulated on the standard radial grid.

    ``density_f`` and ``density_fsq`` weight the moments by the
    normalized mobile density, so they integrate to ``mu_f`` and to the
    cell-average second moment; ``sigma_f_sq`` is the cell variance.
    """

    cfg: NetworkConfig
    r_inf: float
    rb: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f3plus: np.ndarray
    fbar: np.ndarray
    f1_sq: np.ndarray
    f2_sq: np.ndarray
    f3plus_sq: np.ndarray
    fsq: np.ndarray
    delta1: np.ndarray
    delta2: np.ndarray
    delta3: np.ndarray
    weight: np.ndarray
    density_f: np.ndarray
    density_fsq: np.ndarray
    mu_f: float
    sigma_f_sq: float


def iopr_spatial_stats(cfg: NetworkConfig, r_inf: float = math.inf,
                       n: int = DEFAULT_GRID_POINTS) -> IoprCurve:
    """Tabulate the f moments and their cell averages mu_f, sigma_f^2."""
    rb = rb_grid(cfg.rc, n)
    f1 = iopr_near_mean(rb, 1, cfg)
    f2 = iopr_near_mean(rb, 2, cfg)
    f3 = iopr_far_mean(rb, cfg, r_inf)
    f1sq, f2sq, f3sq = iopr_second_moments(rb, cfg, r_inf)
    fbar = f1 + f2 + f3
    fsq = f1sq + f2sq + f3sq + 2.0 * (f1 * f2 + f1 * f3 + f2 * f3)
    p = mobile_density(rb, cfg)
    z = float(np.trapezoid(p, rb))
    weight = p / z
    mu_f = float(np.trapezoid(weight * fbar, rb))
    mean_fsq = float(np.trapezoid(weight * fsq, rb))
    sigma_f_sq = mean_fsq - mu_f * mu_f
    if sigma_f_sq < 0.0:
        raise ConvergenceError(
            "cell variance of f came out negative; tighten the grid",
            best_estimate=sigma_f_sq)
    return IoprCurve(cfg=cfg, r_inf=r_inf, rb=rb,
                     f1=f1, f2=f2, f3plus=f3, fbar=fbar,
                     f1_sq=f1sq, f2_sq=f2sq, f3plus_sq=f3sq, fsq=fsq,
                     delta1=iopr_delta(rb, 1, cfg),
                     delta2=iopr_delta(rb, 2, cfg),
                     delta3=iopr_delta(rb, 3, cfg),
                     weight=weight,
                     density_f=weight * fbar,
                     density_fsq=weight * fsq,
                     mu_f=mu_f, sigma_f_sq=sigma_f_sq)
