"""Power dimensioning, coverage, rate-density, and CDMA power tests."""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bestcell.attachment import NetworkConfig
from bestcell.dimensioning import (
    InfeasibleLoadError,
    LognormalFit,
    SystemConstants,
    cdma_bs_power,
    cell_outage,
    compute_dimensioning,
    coverage_curve,
    fit_lognormal,
    max_bs_power,
    outage_at,
    power_density,
    rate_density,
)
from bestcell.geometry import bs_density, equivalent_network_radius
from bestcell.interference import ocif_spatial_distribution

RC = 1000.0
R_EQ = equivalent_network_radius(RC)


# ---------------------------------------------------------------------------
# log-normal moment matching
# ---------------------------------------------------------------------------

def test_fit_frozen_values():
    fit = fit_lognormal(2.0, 4.0)
    assert isinstance(fit, LognormalFit)
    assert fit.mu == pytest.approx(0.34657359027997264, rel=1e-15)
    assert fit.sigma == pytest.approx(0.8325546111576977, rel=1e-15)
    assert not fit.compensated


@pytest.mark.parametrize("m,v", [
    (2.0, 4.0), (1.0, 0.25), (0.3, 9.0), (10.0, 1e-6), (10.0, 1e-12), (7.0, 0.0),
])
def test_fit_round_trip(m, v):
    fit = fit_lognormal(m, v)
    m_back = math.exp(fit.mu + 0.5 * fit.sigma ** 2)
    v_back = math.expm1(fit.sigma ** 2) * math.exp(2.0 * fit.mu + fit.sigma ** 2)
    assert m_back == pytest.approx(m, rel=1e-12)
    assert v_back == pytest.approx(v, rel=1e-12, abs=1e-300)


@settings(deadline=None, max_examples=200)
@given(st.floats(min_value=1e-3, max_value=1e3),
       st.floats(min_value=1e-12, max_value=1e4))
def test_fit_round_trip_property(m, v):
    fit = fit_lognormal(m, v)
    m_back = math.exp(fit.mu + 0.5 * fit.sigma ** 2)
    v_back = math.expm1(fit.sigma ** 2) * math.exp(2.0 * fit.mu + fit.sigma ** 2)
    assert m_back == pytest.approx(m, rel=1e-9)
    assert v_back == pytest.approx(v, rel=1e-9)


def test_fit_compensation():
    plain = fit_lognormal(2.0, 4.0)
    wide = fit_lognormal(2.0, 4.0, compensate=True)
    assert wide.compensated
    assert wide.sigma == plain.sigma * math.sqrt(2.0)
    assert wide.mu == plain.mu


def test_fit_validation():
    with pytest.raises(ValueError):
        fit_lognormal(0.0, 1.0)
    with pytest.raises(ValueError):
        fit_lognormal(-2.0, 1.0)
    with pytest.raises(ValueError):
        fit_lognormal(2.0, -1.0)


# ---------------------------------------------------------------------------
# system constants
# ---------------------------------------------------------------------------

def test_system_constants_defaults():
    sys = SystemConstants()
    assert sys.sigma_n_sq == sys.n0 * sys.bw
    assert sys.subcarrier_noise * sys.n_subcarriers == sys.n0 * sys.bw


def test_system_constants_validation():
    with pytest.raises(ValueError):
        SystemConstants(n0=0.0)
    with pytest.raises(ValueError):
        SystemConstants(bw=-1.0)
    with pytest.raises(ValueError):
        SystemConstants(interference_ratio=0.0)
    with pytest.raises(ValueError):
        SystemConstants(n_subcarriers=0)
    with pytest.raises(ValueError):
        SystemConstants(gamma_star=0.0)
    with pytest.raises(ValueError):
        SystemConstants(alpha=1.5)
    with pytest.raises(ValueError):
        SystemConstants(sigma_n_sq=-1.0)
    assert SystemConstants(sigma_n_sq=0.0).sigma_n_sq == 0.0


# ---------------------------------------------------------------------------
# site power and power density
# ---------------------------------------------------------------------------

def test_max_bs_power_definition(cfg8):
    sys = SystemConstants()
    mu_g = ocif_spatial_distribution(replace(cfg8, rc=RC), n=100).mu_g
    got = max_bs_power(RC, cfg8, sys, n=100)
    assert got == sys.interference_ratio * sys.n0 * sys.bw / mu_g


def test_power_scaling_laws(cfg8):
    sys = SystemConstants()
    p1 = max_bs_power(RC, cfg8, sys, n=100)
    p2 = max_bs_power(2.0 * RC, cfg8, sys, n=100)
    assert p2 / p1 == pytest.approx(2.0 ** cfg8.eta, rel=1e-9)
    d1 = power_density(RC, cfg8, sys, n=100)
    d2 = power_density(2.0 * RC, cfg8, sys, n=100)
    assert d2 / d1 == pytest.approx(2.0 ** (cfg8.eta - 2.0), rel=1e-9)
    assert p2 > p1 and d2 > d1


# ---------------------------------------------------------------------------
# outage and coverage
# ---------------------------------------------------------------------------

def test_outage_at_validation(cfg8):
    with pytest.raises(ValueError):
        outage_at(1000.0, 0.0, cfg8)


def test_outage_at_matches_simulation_matched_cutoff(sim8, cfg8, sim12, cfg12):
    # At the cell-radius bin, P[f > 1/gamma*] from the matched log-normal
    # lands within 0.05 of the empirical outage when the ring cutoff
    # matches the simulated network.
    for sim, cfg in ((sim8, cfg8), (sim12, cfg12)):
        centers = sim.bin_centers
        k = int(np.argmin(np.abs(centers - cfg.rc)))
        idx = np.clip(np.searchsorted(sim.bin_edges, sim.rb, side="right") - 1,
                      0, sim.spec.bins - 1)
        emp = float((sim.f[idx == k] > 1.0).mean())
        model = outage_at(float(centers[k]), 1.0, cfg, r_inf=R_EQ)
        assert model == pytest.approx(emp, abs=0.05)


def test_outage_grows_with_cutoff(cfg8):
    assert outage_at(1000.0, 1.0, cfg8) > outage_at(1000.0, 1.0, cfg8, r_inf=R_EQ)


def test_cell_outage_and_coverage_consistency(cfg8):
    gamma_db = np.array([-5.0, 0.0, 5.0])
    cov = coverage_curve(gamma_db, cfg8, n=128)
    for g_db, c in zip(gamma_db, cov):
        assert c == pytest.approx(
            1.0 - cell_outage(10.0 ** (g_db / 10.0), cfg8, n=128), rel=1e-12)
    assert np.all(cov > 0.0) and np.all(cov < 1.0)


def test_coverage_decreasing_in_target(cfg8):
    gamma_db = np.linspace(-10.0, 20.0, 31)
    cov = coverage_curve(gamma_db, cfg8, n=128)
    assert np.all(np.diff(cov) < 0.0)


def test_coverage_sigma_ordering(cfg8, cfg12):
    # Wider shadowing does not reduce best-cell coverage here: the
    # attachment selection gain outweighs the interference spread.
    gamma_db = [-5.0, 0.0, 5.0]
    cov8 = coverage_curve(gamma_db, cfg8, n=128)
    cov12 = coverage_curve(gamma_db, cfg12, n=128)
    assert np.all(cov12 >= cov8 - 0.02)


def test_compensation_changes_coverage(cfg8):
    raw = coverage_curve([0.0], cfg8, n=128, compensate=False)[0]
    comp = coverage_curve([0.0], cfg8, n=128, compensate=True)[0]
    assert raw != comp
    assert 0.0 < raw < 1.0 and 0.0 < comp < 1.0


def test_cell_outage_validation(cfg8):
    with pytest.raises(ValueError):
        cell_outage(-1.0, cfg8)


# ---------------------------------------------------------------------------
# rate density
# ---------------------------------------------------------------------------

def test_rate_density_scaling(cfg8):
    curve = rate_density(0.9, [250.0, 500.0, 1000.0, 2000.0], cfg8, n=128)
    assert curve.coverage_target == 0.9
    # The achieved SIR target and spectral efficiency are radius-free.
    assert curve.c_cell == pytest.approx(
        math.log2(1.0 + 10.0 ** (curve.gamma_star_db / 10.0)), rel=1e-15)
    np.testing.assert_allclose(curve.cell_density,
                               [bs_density(r) for r in curve.rc], rtol=1e-15)
    np.testing.assert_allclose(curve.rate_density,
                               curve.c_cell * curve.cell_density, rtol=1e-15)
    scaled = curve.rate_density * curve.rc ** 2
    assert np.max(scaled) / np.min(scaled) - 1.0 <= 1e-12


def test_rate_density_per_radius_calls_agree(cfg8):
    # Separate calls with rescaled configurations bisect to the same
    # target within the documented 0.01 dB resolution.
    gammas = []
    for rc in (500.0, 1000.0, 2000.0):
        cfg = replace(cfg8, rc=rc)
        gammas.append(rate_density(0.9, [rc], cfg, n=128).gamma_star_db)
    assert max(gammas) - min(gammas) <= 0.01


def test_rate_density_validation(cfg8):
    with pytest.raises(ValueError):
        rate_density(0.0, [1000.0], cfg8)
    with pytest.raises(ValueError):
        rate_density(1.0, [1000.0], cfg8)
    with pytest.raises(ValueError):
        rate_density(0.9, [-5.0], cfg8, n=64)
    with pytest.raises(ValueError, match="bracket"):
        rate_density(1e-14, [1000.0], cfg8, n=64)


def test_compute_dimensioning_bundle(cfg8):
    sys = SystemConstants()
    res = compute_dimensioning(cfg8, sys, [500.0, 1000.0], [-5.0, 0.0, 5.0],
                               coverage_target=0.9, n=100)
    assert res.p_max.shape == (2,)
    assert res.p_max[0] == max_bs_power(500.0, cfg8, sys, n=100)
    np.testing.assert_allclose(
        res.power_density, res.p_max * [bs_density(500.0), bs_density(1000.0)],
        rtol=1e-15)
    np.testing.assert_allclose(res.coverage,
                               coverage_curve([-5.0, 0.0, 5.0], cfg8, n=100),
                               rtol=1e-15)
    assert res.rate.coverage_target == 0.9


# ---------------------------------------------------------------------------
# CDMA site power
# ---------------------------------------------------------------------------

def test_cdma_no_users_returns_control_power():
    assert cdma_bs_power([], SystemConstants()) == 1.0
    assert cdma_bs_power([], SystemConstants(p_cch=2.5)) == 2.5


def test_cdma_single_user_hand_value():
    # share = gamma/(1 + alpha gamma) = 2/3; one user with f = 0.1:
    # P = p_cch / (1 - share * 0.6) = 1/0.6.
    got = cdma_bs_power([(500.0, 0.1, 0.0)], SystemConstants())
    assert got == pytest.approx(1.0 / 0.6, rel=1e-12)


def test_cdma_noise_term():
    sys = SystemConstants(sigma_n_sq=0.01)
    share = sys.gamma_star / (1.0 + sys.alpha * sys.gamma_star)
    expect = (1.0 + share * 0.01 * 2.0) / (1.0 - share * 0.6)
    got = cdma_bs_power([(500.0, 0.1, 2.0)], sys)
    assert got == pytest.approx(expect, rel=1e-14)


def test_cdma_pole_detection():
    sys = SystemConstants()  # pole at sum(alpha + f_u) = 1.5
    with pytest.raises(InfeasibleLoadError):
        cdma_bs_power([(100.0, 1.0, 0.5)], sys)
    # Just below the pole the power is finite (and large).
    almost = cdma_bs_power([(100.0, 1.0 - 1e-9, 0.5)], sys)
    assert math.isfinite(almost) and almost > 1e6


def test_cdma_load_is_additive():
    sys = SystemConstants()
    with pytest.raises(InfeasibleLoadError):
        cdma_bs_power([(100.0, 0.25, 0.0), (200.0, 0.25, 0.0)], sys)


def test_cdma_validation():
    with pytest.raises(ValueError):
        cdma_bs_power([(100.0, -0.1, 0.0)], SystemConstants())
    with pytest.raises(ValueError):
        cdma_bs_power([(100.0, 0.1, -1.0)], SystemConstants())
    assert issubclass(InfeasibleLoadError, ValueError)
