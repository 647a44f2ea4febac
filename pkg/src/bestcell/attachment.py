"""Strongest-cell attachment under log-normal shadowing.

A mobile attaches to the base station with the largest product of path
gain and shadowing, not necessarily the nearest one.  With per-site
shadowing xi ~ N(0, sigma^2) in dB, the probability of not being
captured by interferer j depends only on the dB distance gap, and the
joint attachment probability is approximated by the product over the
nearest two or three sites (two suffice up to 10 dB shadowing, three
beyond).  Everything here is a function of r_b / R_c only, which the
tests pin down as exact scale invariance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .geometry import nearest_distances
from .numerics import (
    DEFAULT_TAIL_CUTOFF,
    LN10_OVER_10,
    q_function,
    q_inverse,
    truncated_ln_partial_moment,
)

__all__ = [
    "NetworkConfig",
    "AttachmentProfile",
    "marginal_not_in_cell",
    "attach_probability",
    "attach_probability_complement",
    "attach_qinv",
    "mobile_density",
    "xi_b_max",
    "mean_owncell_gain",
    "rb_grid",
    "attachment_profile",
]

DEFAULT_GRID_POINTS = 400


@dataclass(frozen=True)
class NetworkConfig:
    """Propagation and deployment parameters.

    Parameters
    ----------
    eta : float
        Path-loss exponent, must exceed 2 so ring integrals converge.
    sigma_db : float
        Shadowing standard deviation in dB.  The model is calibrated for
        8..12 dB; values outside that range extrapolate with a warning.
    k0 : float
        Near-field attenuation (linear) at the reference distance.
    r0 : float
        Near-field reference distance in meters.
    rc : float
        Cell radius in meters (half the site spacing).
    marginal_terms : int or None
        How many nearest-site marginals enter the attachment product.
        ``None`` resolves to 2 for sigma_db <= 10 and 3 above.
    """

    eta: float = 3.0
    sigma_db: float = 8.0
    k0: float = 0.1
    r0: float = 1.0
    rc: float = 1000.0
    marginal_terms: int | None = field(default=None)

    def __post_init__(self) -> None:
        if self.eta <= 2.0:
            raise ValueError("eta must exceed 2")
        if self.sigma_db <= 0.0:
            raise ValueError("sigma_db must be positive")
        if self.k0 <= 0.0 or self.r0 <= 0.0 or self.rc <= 0.0:
            raise ValueError("k0, r0 and rc must be positive")
        if self.r0 >= self.rc:
            raise ValueError("near-field radius r0 must be below rc")
        if self.marginal_terms is None:
            if not 8.0 <= self.sigma_db <= 12.0:
                warnings.warn(
                    f"sigma_db={self.sigma_db:g} is outside the calibrated 8-12 dB "
                    "range; extrapolating the attachment marginal count",
                    stacklevel=2)
            resolved = 2 if self.sigma_db <= 10.0 else 3
            object.__setattr__(self, "marginal_terms", resolved)
        elif self.marginal_terms not in (2, 3):
            raise ValueError("marginal_terms must be 2 or 3")

    @property
    def a(self) -> float:
        """dB-to-natural-log shadowing constant ln(10)/10."""
        return LN10_OVER_10


def marginal_not_in_cell(r_b, r_j_bar, cfg: NetworkConfig):
    """Probability that interferer at distance ``r_j_bar`` does not capture.

    The dB gap between two i.i.d. shadowers is N(0, 2 sigma^2), so the
    marginal is Q(eta / (sqrt(2) a sigma) * ln(r_b / r_j_bar)).
    """
    r_b = np.asarray(r_b, dtype=float)
    r_j_bar = np.asarray(r_j_bar, dtype=float)
    if np.any(r_b <= 0.0) or np.any(r_j_bar <= 0.0):
        raise ValueError("distances must be positive")
    coef = cfg.eta / (math.sqrt(2.0) * cfg.a * cfg.sigma_db)
    return q_function(coef * np.log(r_b / r_j_bar))


def _marginals(r_b, cfg: NetworkConfig) -> list[np.ndarray]:
    nd = nearest_distances(r_b, cfg.rc)
    rbars = (nd.r1, nd.r2, nd.r3)[: cfg.marginal_terms]
    return [np.asarray(marginal_not_in_cell(r_b, rj, cfg)) for rj in rbars]


def attach_probability(r_b, cfg: NetworkConfig):
    """Probability of attaching to the serving site at radius ``r_b``.

    Product of the nearest-site marginals; a function of r_b / rc only.
    """
    ms = _marginals(r_b, cfg)
    out = ms[0]
    for m in ms[1:]:
        out = out * m
    return float(out) if out.ndim == 0 else out


def attach_probability_complement(r_b, cfg: NetworkConfig):
    """1 - attach_probability, computed without cancellation.

    Uses inclusion-exclusion on the marginal complements, which is exact
    algebraically and keeps full precision when the attachment
    probability is within an ulp of 1 (deep cell interior).
    """
    cs = [1.0 - m for m in _marginals(r_b, cfg)]
    out = cs[0]
    for c in cs[1:]:
        out = out + c - out * c
    return float(out) if out.ndim == 0 else out


def attach_qinv(r_b, cfg: NetworkConfig):
    """Q^-1 of the attachment probability, stable at both endpoints.

    Near P = 1 the identity Q^-1(P) = -Q^-1(1-P) is applied to the
    stable complement; if even the complement underflows, the dominant
    marginal's Q argument is the exact asymptote.
    """
    scalar = np.asarray(r_b).ndim == 0
    rb_arr = np.atleast_1d(np.asarray(r_b, dtype=float))
    ms = _marginals(rb_arr, cfg)
    p = ms[0].copy()
    for m in ms[1:]:
        p = p * m
    comp = np.atleast_1d(attach_probability_complement(rb_arr, cfg))

    out = np.empty_like(p)
    small = p < 0.5
    if np.any(small):
        out[small] = q_inverse(np.clip(p[small], 1e-308, None))
    big = ~small
    if np.any(big):
        cb = comp[big]
        vals = np.empty_like(cb)
        safe = cb > 0.0
        if np.any(safe):
            vals[safe] = -q_inverse(cb[safe])
        if np.any(~safe):
            # complement underflowed: Q^-1(P) tends to the largest marginal argument
            coef = cfg.eta / (math.sqrt(2.0) * cfg.a * cfg.sigma_db)
            rb_deep = rb_arr[big][~safe]
            nd = nearest_distances(rb_deep, cfg.rc)
            args = np.stack([coef * np.log(rb_deep / rj)
                             for rj in (nd.r1, nd.r2, nd.r3)[: cfg.marginal_terms]])
            vals[~safe] = args.max(axis=0)
        out[big] = vals
    return float(out[0]) if scalar else out


def mobile_density(r_b, cfg: NetworkConfig):
    """Unnormalized radial density of attached mobiles, r_b/(2 rc^2) * P."""
    r_b = np.asarray(r_b, dtype=float)
    out = r_b / (2.0 * cfg.rc * cfg.rc) * attach_probability(r_b, cfg)
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def xi_b_max(r_b, cfg: NetworkConfig, cutoff: float = DEFAULT_TAIL_CUTOFF):
    """Truncation point (dB) of the serving site's shadowing.

    Defined so a N(0, sigma^2) variable falls below it with exactly the
    attachment probability.  Capped at ``cutoff`` standard deviations,
    where the truncation has no effect at machine precision.
    """
    val = -cfg.sigma_db * np.asarray(attach_qinv(r_b, cfg))
    out = np.minimum(val, cutoff * cfg.sigma_db)
    return float(out) if out.ndim == 0 else out


def mean_owncell_gain(r_b, cfg: NetworkConfig):
    """Mean serving-site gain at radius ``r_b`` given attachment.

    Path gain times the partial log-normal moment of the truncated
    shadowing, renormalized by the attachment probability.
    """
    r_b = np.asarray(r_b, dtype=float)
    if np.any(r_b <= cfg.r0):
        raise ValueError("r_b must exceed the near-field radius r0")
    if np.any(r_b >= 2.0 * cfg.rc):
        raise ValueError("r_b must lie below 2*rc")
    p = attach_probability(r_b, cfg)
    ximax = xi_b_max(r_b, cfg)
    moment = truncated_ln_partial_moment(cfg.a, cfg.sigma_db, ximax, order=1)
    out = cfg.k0 * cfg.r0 ** cfg.eta * r_b ** (-cfg.eta) * moment / p
    return float(out) if np.asarray(out).ndim == 0 else out


def rb_grid(rc: float, n: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Default evaluation radii: midpoints of ``n`` equal cells on (0, 2*rc).

    Open at both ends and proportional to rc, so every scale-invariant
    quantity tabulated on it is identical across cell radii.
    """
    if n < 2:
        raise ValueError("need at least 2 grid points")
    return (np.arange(n) + 0.5) * (2.0 * rc / n)


@dataclass(frozen=True)
class AttachmentProfile:
    """Attachment statistics tabulated on the standard radial grid."""

    cfg: NetworkConfig
    rb: np.ndarray
    p_attach: np.ndarray
    density: np.ndarray
    xi_bmax: np.ndarray

    @property
    def attached_fraction(self) -> float:
        """Integral of the mobile density: the attached share of the 2rc disc."""
        return float(np.trapezoid(self.density, self.rb))


def attachment_profile(cfg: NetworkConfig, n: int = DEFAULT_GRID_POINTS) -> AttachmentProfile:
    """Tabulate attachment probability, density and truncation point."""
    rb = rb_grid(cfg.rc, n)
    p = attach_probability(rb, cfg)
    return AttachmentProfile(
        cfg=cfg,
        rb=rb,
        p_attach=p,
        density=rb / (2.0 * cfg.rc * cfg.rc) * p,
        xi_bmax=xi_b_max(rb, cfg),
    )
