"""Hexagonal base-station lattice and nearest-interferer distance estimates.

Base stations sit on a triangular lattice with spacing 2*R_c, so each
cell is a hexagon with inradius R_c and area 2*sqrt(3)*R_c^2.  For a
mobile at distance r_b from its serving site, the distances to the
closest three co-channel sites are estimated by the law of cosines at
the median angles of the three 30-degree sectors the lattice symmetry
folds the geometry into.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridLayout",
    "NearestDistances",
    "build_grid",
    "bs_density",
    "equivalent_network_radius",
    "nearest_distances",
]

# Median angles (radians) between the mobile direction and the 1st, 2nd
# and 3rd nearest co-channel sites, from the 12-fold lattice symmetry.
THETA_1 = math.pi / 12.0
THETA_2 = math.pi / 3.0 - math.pi / 12.0
THETA_3 = math.pi / 3.0 + math.pi / 12.0

_HEX_DIRECTIONS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))


@dataclass(frozen=True)
class GridLayout:
    """A concentric hexagonal deployment.

    Attributes
    ----------
    rc : float
        Cell radius in meters (half the site-to-site spacing).
    tiers : int
        Number of interferer rings around the central site.
    positions : np.ndarray
        (n, 2) Cartesian site coordinates, central site first, then ring
        by ring in walk order.
    """

    rc: float
    tiers: int
    positions: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.positions.shape[0]


def build_grid(rc: float, tiers: int = 3) -> GridLayout:
    """Lay out 1 + 3*tiers*(tiers+1) sites on a triangular lattice.

    The default three tiers give the 37-cell deployment used throughout:
    enough rings that the outermost sites contribute negligibly to the
    interference seen near the center.
    """
    if rc <= 0.0:
        raise ValueError("rc must be positive")
    if tiers < 1:
        raise ValueError("tiers must be at least 1")
    spacing = 2.0 * rc
    # Axial coordinates (q, r) -> Cartesian, neighbor step length = spacing.
    def to_xy(q: int, r: int) -> tuple[float, float]:
        return (spacing * (q + 0.5 * r), spacing * (math.sqrt(3.0) / 2.0) * r)

    pts = [(0.0, 0.0)]
    for k in range(1, tiers + 1):
        q, r = k * _HEX_DIRECTIONS[4][0], k * _HEX_DIRECTIONS[4][1]
        for d in _HEX_DIRECTIONS:
            for _ in range(k):
                pts.append(to_xy(q, r))
                q, r = q + d[0], r + d[1]
    return GridLayout(rc=rc, tiers=tiers, positions=np.asarray(pts, dtype=float))


def bs_density(rc: float) -> float:
    """Base stations per square meter: one site per hexagon of inradius rc."""
    if rc <= 0.0:
        raise ValueError("rc must be positive")
    return 1.0 / (2.0 * math.sqrt(3.0) * rc * rc)


def equivalent_network_radius(rc: float, tiers: int = 3) -> float:
    """Radius of the disc whose area equals that of a ``tiers``-ring grid.

    A hexagonal layout with ``tiers`` rings around the centre holds
    ``1 + 3*tiers*(tiers+1)`` sites, each owning a hexagon of area
    ``2*sqrt(3)*rc**2``.  The disc of the returned radius has exactly that
    total area, so ``bs_density(rc) * pi * R**2`` equals the site count.
    Useful as a finite outer cutoff when comparing ring-integral terms
    against a simulation that only instantiates the grid sites.
    """
    if rc <= 0.0:
        raise ValueError("rc must be positive")
    if tiers < 1:
        raise ValueError("tiers must be at least 1")
    n_sites = 1 + 3 * tiers * (tiers + 1)
    return rc * math.sqrt(2.0 * math.sqrt(3.0) * n_sites / math.pi)


@dataclass(frozen=True)
class NearestDistances:
    """Median-angle distance estimates to the three nearest interferers.

    ``r1 <= r2 <= r3`` always; ``rd = (r2 + r3) / 2`` is the inner radius
    of the continuum ring that stands in for everything beyond the third
    site.  Fields are floats or arrays matching the ``r_b`` input.
    """

    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    rd: np.ndarray


def nearest_distances(r_b, rc: float) -> NearestDistances:
    """Estimate distances to the three nearest co-channel sites.

    Law of cosines between the mobile (at radius ``r_b`` from its serving
    site) and a site 2*rc away, evaluated at the sector median angles.
    ``r_b`` may be a scalar or an array; entries must lie in (0, 2*rc).
    """
    if rc <= 0.0:
        raise ValueError("rc must be positive")
    r_b = np.asarray(r_b, dtype=float)
    if np.any(r_b <= 0.0) or np.any(r_b >= 2.0 * rc):
        raise ValueError("r_b must lie strictly between 0 and 2*rc")
    four_rc2 = (2.0 * rc) ** 2

    def law_of_cosines(theta: float):
        return np.sqrt(r_b * r_b + four_rc2 - 4.0 * rc * r_b * math.cos(theta))

    r1 = law_of_cosines(THETA_1)
    r2 = law_of_cosines(THETA_2)
    r3 = law_of_cosines(THETA_3)
    if r_b.ndim == 0:
        r1, r2, r3 = float(r1), float(r2), float(r3)
        return NearestDistances(r1, r2, r3, 0.5 * (r2 + r3))
    return NearestDistances(r1, r2, r3, 0.5 * (r2 + r3))
