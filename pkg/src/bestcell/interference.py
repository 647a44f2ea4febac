"""Mean other-cell interference gain seen by an attached mobile.

The total interfering gain splits into the two nearest co-channel sites,
handled individually with their capture-loss condition, plus a fluid
ring of site density rho_BS for everything from the third site outward.
Each term conditions on the serving site's shadowing (truncated at the
attachment point) and averages the interferer's log-normal over the
region where it loses the capture comparison, which collapses to a
one-dimensional Gaussian-weighted integral of a Q function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attachment import (
    DEFAULT_GRID_POINTS,
    NetworkConfig,
    attach_probability,
    mobile_density,
    rb_grid,
    xi_b_max,
)
from .geometry import bs_density, nearest_distances
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec, integrate

__all__ = [
    "OcifCurve",
    "ocif_near_term",
    "ocif_far_term",
    "ocif_spatial_distribution",
]


def _loss_weighted_tilt(c1: float, sigma: float, a: float, xi_max: float,
                        spec: QuadratureSpec) -> float:
    """E[ Q(c1 + xi/sigma + a*sigma) ; xi <= xi_max ] for xi ~ N(0, sigma^2).

    The Q factor is the probability mass of the interferer's shadowing
    over the losing region, already tilted by its log-normal mean.
    """
    lower = -spec.tail_cutoff * sigma
    upper = min(xi_max, spec.tail_cutoff * sigma)
    if upper <= lower:
        return 0.0
    asig = a * sigma
    norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))
    inv_sqrt2 = 1.0 / math.sqrt(2.0)

    def f(xi: float) -> float:
        q = 0.5 * math.erfc((c1 + xi / sigma + asig) * inv_sqrt2)
        return q * norm * math.exp(-0.5 * (xi / sigma) ** 2)

    return integrate(f, lower, upper, spec)


def ocif_near_term(r_b: float, j: int, cfg: NetworkConfig,
                   spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Mean gain from the j-th nearest interferer (j = 1 or 2).

    Conditions jointly on the serving site's truncated shadowing and on
    the interferer losing the capture comparison, and renormalizes by
    the attachment probability.
    """
    if j not in (1, 2):
        raise ValueError("near terms exist for j = 1 and 2 only")
    r_b = float(r_b)
    nd = nearest_distances(r_b, cfg.rc)
    rbar = nd.r1 if j == 1 else nd.r2
    return _ocif_term(r_b, rbar, cfg, spec)


def _ocif_term(r_b: float, rbar: float, cfg: NetworkConfig,
               spec: QuadratureSpec) -> float:
    sigma, a = cfg.sigma_db, cfg.a
    p = attach_probability(r_b, cfg)
    ximax = xi_b_max(r_b, cfg, cutoff=spec.tail_cutoff)
    c1 = cfg.eta / (a * sigma) * math.log(r_b / rbar)
    inner = _loss_weighted_tilt(c1, sigma, a, ximax, spec)
    tilt = math.exp(0.5 * (sigma * a) ** 2)
    return cfg.k0 * cfg.r0 ** cfg.eta * rbar ** (-cfg.eta) * tilt * inner / p


def ocif_far_term(r_b: float, cfg: NetworkConfig, r_inf: float = math.inf,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Mean gain from all interferers beyond the second nearest.

    Fluid approximation: sites of density rho_BS smeared over the ring
    from the mid-distance (r2+r3)/2 out to ``r_inf`` (default infinity),
    each weighted by the third-site capture-loss mass.
    """
    r_b = float(r_b)
    sigma, a, eta = cfg.sigma_db, cfg.a, cfg.eta
    nd = nearest_distances(r_b, cfg.rc)
    if math.isfinite(r_inf) and r_inf <= nd.rd:
        raise ValueError("r_inf must exceed the fluid ring's inner radius")
    ring = nd.rd ** (2.0 - eta) - (0.0 if math.isinf(r_inf) else r_inf ** (2.0 - eta))
    p = attach_probability(r_b, cfg)
    ximax = xi_b_max(r_b, cfg, cutoff=spec.tail_cutoff)
    c1 = eta / (a * sigma) * math.log(r_b / nd.r3)
    inner = _loss_weighted_tilt(c1, sigma, a, ximax, spec)
    tilt = math.exp(0.5 * (sigma * a) ** 2)
    dens = bs_density(cfg.rc)
    return (2.0 * math.pi * dens * cfg.k0 * cfg.r0 ** eta / (p * (eta - 2.0))
            * ring * tilt * inner)


@dataclass(frozen=True)
class OcifCurve:
    """Other-cell interference gain tabulated on the standard grid.

    ``weight`` is the normalized mobile density (integrates to 1 over the
    grid); ``density`` is weight * total, so its integral is ``mu_g``,
    the cell-average mean interference gain.
    """

    cfg: NetworkConfig
    r_inf: float
    rb: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    g3plus: np.ndarray
    total: np.ndarray
    weight: np.ndarray
    density: np.ndarray
    mu_g: float


def ocif_spatial_distribution(cfg: NetworkConfig, r_inf: float = math.inf,
                              n: int = DEFAULT_GRID_POINTS,
                              spec: QuadratureSpec = DEFAULT_QUADRATURE) -> OcifCurve:
    """Tabulate the interference terms and their cell average mu_g."""
    rb = rb_grid(cfg.rc, n)
    g1 = np.empty(n)
    g2 = np.empty(n)
    g3 = np.empty(n)
    for i, r in enumerate(rb):
        nd = nearest_distances(float(r), cfg.rc)
        g1[i] = _ocif_term(float(r), nd.r1, cfg, spec)
        g2[i] = _ocif_term(float(r), nd.r2, cfg, spec)
        g3[i] = ocif_far_term(float(r), cfg, r_inf, spec)
    total = g1 + g2 + g3
    p = mobile_density(rb, cfg)
    z = float(np.trapezoid(p, rb))
    weight = p / z
    density = weight * total
    mu_g = float(np.trapezoid(density, rb))
    return OcifCurve(cfg=cfg, r_inf=r_inf, rb=rb, g1=g1, g2=g2, g3plus=g3,
                     total=total, weight=weight, density=density, mu_g=mu_g)
