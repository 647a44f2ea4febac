"""Hexagonal lattice layout and median-angle distance tests.

The median-angle estimates are cross-checked against a brute-force
oracle: distances from a mobile to every site of the 37-cell grid,
sorted, with the per-rank median taken over a dense uniform sweep of
the mobile's angle.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bestcell.geometry import (
    GridLayout,
    bs_density,
    build_grid,
    equivalent_network_radius,
    nearest_distances,
)

RC = 1000.0
SQRT3 = math.sqrt(3.0)


# ---------------------------------------------------------------------------
# build_grid
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("tiers,expected", [(1, 7), (2, 19), (3, 37), (6, 127)])
def test_site_counts(tiers, expected):
    grid = build_grid(RC, tiers=tiers)
    assert grid.n_sites == expected
    assert grid.positions.shape == (expected, 2)


def test_grid_ring_structure():
    grid = build_grid(500.0, tiers=3)
    d = np.linalg.norm(grid.positions, axis=1)
    assert d[0] == 0.0
    # Six first-ring sites at exactly the site spacing 2*rc.
    ring1 = np.isclose(d, 1000.0, rtol=0.0, atol=1e-9)
    assert ring1.sum() == 6
    # Second ring: six edge-midpoint sites at 2*sqrt(3)*rc, six corners at 4*rc.
    assert np.isclose(d, 1732.0508075688772935, rtol=1e-12).sum() == 6
    assert np.isclose(d, 2000.0, rtol=0.0, atol=1e-9).sum() == 6


def test_grid_minimum_spacing_is_site_distance():
    grid = build_grid(RC, tiers=3)
    p = grid.positions
    delta = p[:, None, :] - p[None, :, :]
    dist = np.linalg.norm(delta, axis=-1)
    dist[np.diag_indices_from(dist)] = np.inf
    assert dist.min() == pytest.approx(2.0 * RC, rel=1e-12)


def test_build_grid_validation():
    with pytest.raises(ValueError):
        build_grid(0.0)
    with pytest.raises(ValueError):
        build_grid(-100.0)
    with pytest.raises(ValueError):
        build_grid(RC, tiers=0)


# ---------------------------------------------------------------------------
# bs_density / equivalent_network_radius
# ---------------------------------------------------------------------------

def test_bs_density_frozen_and_scaling():
    assert bs_density(1.0) == pytest.approx(0.28867513459481288225, rel=1e-15)
    # One site per hexagon of area 2*sqrt(3)*rc^2.
    assert bs_density(RC) * 2.0 * SQRT3 * RC * RC == pytest.approx(1.0, rel=1e-15)
    assert bs_density(2.0 * RC) == bs_density(RC) / 4.0
    with pytest.raises(ValueError):
        bs_density(0.0)


@pytest.mark.parametrize("tiers", [1, 2, 3, 4, 6])
def test_equivalent_radius_holds_site_count(tiers):
    n_sites = 1 + 3 * tiers * (tiers + 1)
    radius = equivalent_network_radius(RC, tiers=tiers)
    assert bs_density(RC) * math.pi * radius ** 2 == pytest.approx(
        n_sites, rel=1e-12)


def test_equivalent_radius_frozen_and_scaling():
    assert equivalent_network_radius(1.0) == pytest.approx(
        6.387357690094755, rel=1e-15)
    assert equivalent_network_radius(2.0 * RC) == 2.0 * equivalent_network_radius(RC)
    with pytest.raises(ValueError):
        equivalent_network_radius(0.0)
    with pytest.raises(ValueError):
        equivalent_network_radius(RC, tiers=0)


# ---------------------------------------------------------------------------
# nearest_distances
# ---------------------------------------------------------------------------

def test_nearest_distances_frozen_values():
    nd = nearest_distances(1000.0, 1000.0)
    assert nd.r1 == pytest.approx(1065.9721829596337328, rel=1e-13)
    assert nd.r2 == pytest.approx(1473.6257582079005932, rel=1e-13)
    assert nd.r3 == pytest.approx(1991.1614247945636993, rel=1e-13)
    assert nd.rd == pytest.approx(1732.3935915012321462, rel=1e-13)
    assert nd.rd == 0.5 * (nd.r2 + nd.r3)


def test_nearest_distances_ordering_and_shapes():
    r_b = np.linspace(0.05, 1.95, 39) * RC
    nd = nearest_distances(r_b, RC)
    assert nd.r1.shape == r_b.shape
    assert np.all(nd.r1 < nd.r2)
    assert np.all(nd.r2 < nd.r3)
    scalar = nearest_distances(500.0, RC)
    assert isinstance(scalar.r1, float)


def test_nearest_distances_scale_proportionality():
    t = np.linspace(0.1, 1.9, 19)
    base = nearest_distances(t * RC, RC)
    # Power-of-two rescaling is exact in floating point.
    scaled = nearest_distances(t * 4.0 * RC, 4.0 * RC)
    assert np.array_equal(scaled.r1, 4.0 * base.r1)
    assert np.array_equal(scaled.r3, 4.0 * base.r3)
    # Arbitrary rescaling agrees to rounding.
    other = nearest_distances(t * 3.0 * RC, 3.0 * RC)
    np.testing.assert_allclose(other.r2, 3.0 * base.r2, rtol=1e-12)


def test_nearest_distances_domain():
    with pytest.raises(ValueError):
        nearest_distances(0.0, RC)
    with pytest.raises(ValueError):
        nearest_distances(2.0 * RC, RC)
    with pytest.raises(ValueError):
        nearest_distances([500.0, -1.0], RC)
    with pytest.raises(ValueError):
        nearest_distances(500.0, 0.0)


@settings(deadline=None, max_examples=200)
@given(st.floats(min_value=0.01, max_value=1.99))
def test_nearest_distances_triangle_bounds(t):
    r_b = t * RC
    nd = nearest_distances(r_b, RC)
    # Every first-ring site is 2*rc from the center, so its distance to
    # the mobile lies in [2*rc - r_b, 2*rc + r_b].
    assert nd.r1 >= 2.0 * RC - r_b - 1e-9
    assert nd.r3 <= 2.0 * RC + r_b + 1e-9


def _empirical_rank_medians(t: float, n_angles: int = 12000) -> np.ndarray:
    """Median distance to the 1st/2nd/3rd nearest site over the mobile angle."""
    sites = build_grid(RC, tiers=3).positions[1:]
    phi = (np.arange(n_angles) + 0.5) * (2.0 * math.pi / n_angles)
    xy = t * RC * np.stack([np.cos(phi), np.sin(phi)], axis=1)
    dist = np.linalg.norm(xy[:, None, :] - sites[None, :, :], axis=-1)
    dist.sort(axis=1)
    return np.median(dist[:, :3], axis=0)


def test_median_angle_matches_bruteforce_for_two_nearest():
    for t in np.linspace(0.2, 1.8, 9):
        med = _empirical_rank_medians(float(t))
        nd = nearest_distances(t * RC, RC)
        assert nd.r1 == pytest.approx(med[0], rel=1e-3)
        assert nd.r2 == pytest.approx(med[1], rel=1e-3)


def test_median_angle_third_site_validity_range():
    # The closed-form third-nearest estimate tracks the true median out to
    # t ~ 1.35; beyond that, second-ring sites overtake the modeled one.
    for t in np.linspace(0.2, 1.3, 6):
        med = _empirical_rank_medians(float(t))
        nd = nearest_distances(t * RC, RC)
        assert nd.r3 == pytest.approx(med[2], rel=1e-3)
    med = _empirical_rank_medians(1.8)
    nd = nearest_distances(1.8 * RC, RC)
    assert abs(nd.r3 - med[2]) / med[2] > 0.1


def test_grid_layout_is_frozen():
    grid = build_grid(RC)
    with pytest.raises(AttributeError):
        grid.rc = 5.0
    assert isinstance(grid, GridLayout)
