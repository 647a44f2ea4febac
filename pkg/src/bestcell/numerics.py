"""Shared numerical kernels: Gaussian tails, tilted-normal moments, quadrature.

Everything downstream leans on two primitives: the Gaussian tail
probability Q and partial moments of exponentially tilted normals
(log-normal shadowing expressed in dB).  Both are wrapped here so the
rest of the package never touches scipy.special directly and so the
tail/accuracy behaviour is pinned down in one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy import integrate as _sciint
from scipy import special as _special

__all__ = [
    "LN10_OVER_10",
    "DEFAULT_TAIL_CUTOFF",
    "ConvergenceError",
    "QuadratureSpec",
    "q_function",
    "q_inverse",
    "truncated_ln_partial_moment",
    "integrate",
]

# dB -> natural-log conversion constant: exp(-a*xi) with xi in dB.
LN10_OVER_10 = math.log(10.0) / 10.0

# Gaussian integrands are truncated at this many standard deviations by default.
DEFAULT_TAIL_CUTOFF = 10.0


class ConvergenceError(RuntimeError):
    """Raised when a quadrature fails to reach the requested tolerance.

    The best estimate obtained so far is carried in ``best_estimate``.
    """

    def __init__(self, message: str, best_estimate: float):
        super().__init__(message)
        self.best_estimate = best_estimate


@dataclass(frozen=True)
class QuadratureSpec:
    """Settings for one-dimensional quadrature.

    Parameters
    ----------
    scheme : {'adaptive', 'fixed'}
        'adaptive' uses globally adaptive panels with error control,
        'fixed' uses a composite Gauss-Legendre rule with
        ``max_subdivisions`` panels and a two-level refinement check.
    rel_tol : float
        Requested relative tolerance, in (0, 1e-2].
    max_subdivisions : int
        Subdivision limit (adaptive) or panel count (fixed).
    tail_cutoff : float
        Where Gaussian-weighted integrands are truncated, in standard
        deviations.  Must be at least 8 so the discarded mass is far
        below every tolerance used in this package.
    """

    scheme: Literal["adaptive", "fixed"] = "adaptive"
    rel_tol: float = 1e-9
    max_subdivisions: int = 200
    tail_cutoff: float = DEFAULT_TAIL_CUTOFF

    def __post_init__(self) -> None:
        if self.scheme not in ("adaptive", "fixed"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if not 0.0 < self.rel_tol <= 1e-2:
            raise ValueError("rel_tol must lie in (0, 1e-2]")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")
        if self.tail_cutoff < 8.0:
            raise ValueError("tail_cutoff below 8 sigma discards visible mass")


DEFAULT_QUADRATURE = QuadratureSpec()


def q_function(x):
    """Gaussian tail probability Q(x) = P[N(0,1) > x].

    Evaluated through the complementary error function, which scipy
    implements with rational/continued-fraction expansions accurate to
    machine precision across the whole tail.  Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("q_function requires finite arguments")
    out = 0.5 * _special.erfc(x / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def q_inverse(p):
    """Inverse Gaussian tail: the x with Q(x) = p, for p in (0, 1).

    Uses the identity Q^-1(p) = -Phi^-1(p) so small tail probabilities
    keep full precision (no 1-p cancellation).
    """
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError("q_inverse is defined on the open interval (0, 1)")
    out = -_special.ndtri(p)
    return float(out) if out.ndim == 0 else out


def truncated_ln_partial_moment(a: float, sigma: float, xi_max, order: int = 1):
    """Partial moment of an exponentially tilted normal.

    Computes ``E[e^(-k a xi) ; xi <= xi_max]`` for xi ~ N(0, sigma^2) and
    k = order, i.e. the partial moment of a log-normal expressed through
    its dB-domain Gaussian.  Closed form:

        exp(k^2 sigma^2 a^2 / 2) * (1 - Q(xi_max / sigma + k a sigma))

    ``xi_max = +inf`` gives the full log-normal moment exp(k^2 s^2 a^2/2).
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if order < 1:
        raise ValueError("order must be a positive integer")
    xi_max = np.asarray(xi_max, dtype=float)
    kas = order * a * sigma
    tilt = math.exp(0.5 * kas * kas)
    with np.errstate(over="ignore"):
        out = tilt * (1.0 - 0.5 * _special.erfc((xi_max / sigma + kas) / math.sqrt(2.0)))
    return float(out) if out.ndim == 0 else out


def _fixed_panels(f: Callable[[float], float], lower: float, upper: float,
                  panels: int, nodes: int = 12) -> float:
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(lower, upper, panels + 1)
    total = 0.0
    for a_, b_ in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b_ - a_)
        mid = 0.5 * (a_ + b_)
        total += half * sum(wi * f(mid + half * xi) for xi, wi in zip(x, w))
    return total


def integrate(f: Callable[[float], float], lower: float, upper: float,
              spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Integrate a smooth scalar function over a finite interval.

    Returns the integral of ``f`` on [lower, upper] to the relative
    tolerance in ``spec``.  Raises :class:`ConvergenceError` (carrying the
    best estimate) when the subdivision budget is exhausted before the
    tolerance is met.
    """
    if not (math.isfinite(lower) and math.isfinite(upper)):
        raise ValueError("integration limits must be finite")
    if lower >= upper:
        raise ValueError("integration requires lower < upper")

    if spec.scheme == "adaptive":
        with np.errstate(all="ignore"):
            value, abserr, info, *tail = _sciint.quad(
                f, lower, upper, epsabs=0.0, epsrel=spec.rel_tol,
                limit=spec.max_subdivisions, full_output=1)
        if tail:  # quad appended an error message: tolerance not reached
            raise ConvergenceError(
                f"adaptive quadrature did not converge on [{lower:g}, {upper:g}]: "
                f"{tail[0].strip()}", best_estimate=value)
        return value

    coarse = _fixed_panels(f, lower, upper, spec.max_subdivisions)
    fine = _fixed_panels(f, lower, upper, 2 * spec.max_subdivisions)
    scale = max(abs(fine), abs(coarse))
    if scale > 0.0 and abs(fine - coarse) > spec.rel_tol * scale:
        raise ConvergenceError(
            f"fixed-panel quadrature ({spec.max_subdivisions} panels) did not "
            f"converge on [{lower:g}, {upper:g}]", best_estimate=fine)
    return fine
