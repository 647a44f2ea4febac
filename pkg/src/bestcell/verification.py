"""End-to-end verification: every analytical curve against the simulator.

Ten numbered checks cover attachment accuracy, scale invariance, the
interference lower bound and its trends, the ratio-moment densities,
coverage, the power/rate scaling laws, the numeric identities, and
bit-level reproducibility.  Each check returns a measured summary string
alongside its pass/fail status so a failing run documents itself.

The interference, ratio and coverage comparisons (checks 3, 5 and 6) use
the library defaults, i.e. a fluid interference ring extending to
infinity, while the simulator only instantiates a finite grid.  The
report appends informational lines showing the same measurements with
the ring truncated at the radius enclosing exactly the simulated sites
(see :func:`bestcell.geometry.equivalent_network_radius`), which is the
apples-to-apples comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .attachment import NetworkConfig, attach_probability, rb_grid
from .dimensioning import (
    InfeasibleLoadError,
    SystemConstants,
    cdma_bs_power,
    cell_outage,
    coverage_curve,
    fit_lognormal,
    rate_density,
)
from .geometry import bs_density, equivalent_network_radius
from .interference import ocif_far_term, ocif_near_term, ocif_spatial_distribution
from .iopr import iopr_spatial_stats
from .montecarlo import SimResult, SimSpec, simulate
from .numerics import integrate, q_function, q_inverse, truncated_ln_partial_moment

__all__ = [
    "CheckResult",
    "VerificationReport",
    "run_all",
]

#: Radial window (in units of r_b / rc) over which binned comparisons run.
BIN_WINDOW = (0.1, 1.9)

#: Cell radii (m) for the scale-invariance check.
SCALE_RC = (250.0, 1000.0, 4000.0)

#: Cell radii (m) for the trend and power-law checks.
TREND_RC = (250.0, 500.0, 1000.0, 2000.0)

#: Sample budget for the reproducibility check's extra simulations.
DETERMINISM_SAMPLES = 100_000

#: Attached-sample budget for the empirical coverage comparison.
COVERAGE_SAMPLES = 100_000


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one numbered verification check."""

    criterion: int
    name: str
    passed: bool
    measured: str
    threshold: str

    def format(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{self.criterion:2d}] {status} {self.name}: "
                f"{self.measured} (require {self.threshold})")


@dataclass(frozen=True)
class VerificationReport:
    """All check outcomes plus informational notes, ready to print.

    The report deliberately omits the worker count: results are
    bit-identical across worker counts, and the rendered text must be
    too.
    """

    seed: int
    samples: int
    bins: int
    rc: float
    tiers: int
    checks: tuple[CheckResult, ...]
    notes: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def format(self) -> str:
        lines = [
            "best-cell verification suite",
            f"seed = {self.seed}",
            f"samples = {self.samples}",
            f"bins = {self.bins}",
            f"rc = {self.rc:.17g}",
            f"tiers = {self.tiers}",
            "",
        ]
        lines.extend(c.format() for c in self.checks)
        n_pass = sum(c.passed for c in self.checks)
        lines.append("")
        lines.extend(self.notes)
        if self.notes:
            lines.append("")
        lines.append(f"passed {n_pass} of {len(self.checks)} checks")
        return "\n".join(lines) + "\n"


def _bin_window(sim: SimResult) -> np.ndarray:
    t = sim.bin_centers / sim.spec.cfg.rc
    lo, hi = BIN_WINDOW
    return (t >= lo - 1e-12) & (t <= hi + 1e-12) & (sim.n_total > 0)


def _check_attachment(sim8: SimResult, sim12: SimResult,
                      cfg8: NetworkConfig, cfg12: NetworkConfig) -> CheckResult:
    devs = []
    for sim, cfg in ((sim8, cfg8), (sim12, cfg12)):
        w = _bin_window(sim)
        model = attach_probability(sim.bin_centers[w], cfg)
        devs.append(float(np.max(np.abs(model - sim.attach_freq[w]))))
    return CheckResult(
        criterion=1,
        name="attachment probability vs simulated frequency",
        passed=all(d <= 0.03 for d in devs),
        measured=f"max abs dev {devs[0]:.4f} (sigma 8), {devs[1]:.4f} (sigma 12)",
        threshold="<= 0.03 in every bin with center in [0.1, 1.9] rc",
    )


def _scale_fingerprint(cfg: NetworkConfig, gamma_db: np.ndarray) -> np.ndarray:
    curve = iopr_spatial_stats(cfg)
    return np.concatenate([
        attach_probability(rb_grid(cfg.rc), cfg),
        curve.fbar,
        curve.fsq,
        [curve.mu_f, curve.sigma_f_sq, cell_outage(1.0, cfg)],
        coverage_curve(gamma_db, cfg),
    ])


def _check_scale_invariance(cfg8: NetworkConfig) -> CheckResult:
    gamma_db = np.arange(-10.0, 21.0)
    base = _scale_fingerprint(replace(cfg8, rc=SCALE_RC[0]), gamma_db)
    rel = 0.0
    for rc in SCALE_RC[1:]:
        vals = _scale_fingerprint(replace(cfg8, rc=rc), gamma_db)
        rel = max(rel, float(np.max(np.abs(vals - base)
                                    / np.maximum(np.abs(base), 1e-300))))
    rcs = ", ".join(f"{r:g}" for r in SCALE_RC)
    return CheckResult(
        criterion=2,
        name="scale invariance of the normalized curves",
        passed=rel <= 1e-6,
        measured=f"max rel dev {rel:.3e} across rc in {{{rcs}}} m",
        threshold="<= 1e-6 relative",
    )


def _ocif_comparison(sim: SimResult, cfg: NetworkConfig, r_inf: float):
    w = _bin_window(sim) & (sim.n_attached >= 2)
    centers = sim.bin_centers[w]
    model = np.array([ocif_near_term(r, 1, cfg) + ocif_near_term(r, 2, cfg)
                      + ocif_far_term(r, cfg, r_inf) for r in centers])
    mc = sim.ocif_mean[w]
    se = sim.ocif_se[w]
    violations = int(np.sum(model > mc + 2.0 * se))
    mean_gap = float(np.mean((mc - model) / mc))
    return violations, int(w.sum()), mean_gap


def _check_ocif_bound(sim8: SimResult, sim12: SimResult, cfg8: NetworkConfig,
                      cfg12: NetworkConfig, r_inf: float) -> CheckResult:
    v8, n8, gap8 = _ocif_comparison(sim8, cfg8, r_inf)
    v12, n12, _ = _ocif_comparison(sim12, cfg12, r_inf)
    return CheckResult(
        criterion=3,
        name="mean interference gain bounded by simulation",
        passed=(v8 == 0 and v12 == 0 and gap8 <= 0.20),
        measured=(f"bound exceeded in {v8}/{n8} bins (sigma 8) and "
                  f"{v12}/{n12} bins (sigma 12); mean rel gap {gap8:+.3f} "
                  "(sigma 8)"),
        threshold="analytic <= mc + 2 se everywhere; mean gap <= 0.20",
    )


def _check_ocif_trends(mu_g8: list[float], mu_g12: list[float]) -> CheckResult:
    dec8 = all(a > b for a, b in zip(mu_g8, mu_g8[1:]))
    dec12 = all(a > b for a, b in zip(mu_g12, mu_g12[1:]))
    order = all(b > a for a, b in zip(mu_g8, mu_g12))
    txt8 = ", ".join(f"{v:.3e}" for v in mu_g8)
    return CheckResult(
        criterion=4,
        name="mean interference gain trends",
        passed=dec8 and dec12 and order,
        measured=(f"mu_g (sigma 8) = [{txt8}]; decreasing: {dec8} (sigma 8), "
                  f"{dec12} (sigma 12); sigma 12 above sigma 8: {order}"),
        threshold="strictly decreasing in rc; larger for sigma 12",
    )


def _mc_density_peaks(sim: SimResult):
    w = _bin_window(sim) & (sim.n_attached > 0)
    width = float(sim.bin_edges[1] - sim.bin_edges[0])
    norm = float(sim.n_attached.sum()) * width
    f_dens = sim.f_mean[w] * sim.n_attached[w] / norm
    f2_dens = sim.f2_mean[w] * sim.n_attached[w] / norm
    return float(np.nanmax(f_dens)), float(np.nanmax(f2_dens))


def _check_ratio_peaks(sim8: SimResult, cfg8: NetworkConfig,
                       cfg12: NetworkConfig, r_inf: float) -> CheckResult:
    curve8 = iopr_spatial_stats(cfg8, r_inf=r_inf)
    curve12 = iopr_spatial_stats(cfg12, r_inf=r_inf)
    peak_f8 = float(curve8.density_f.max())
    peak_f2_8 = float(curve8.density_fsq.max())
    mc_f, mc_f2 = _mc_density_peaks(sim8)
    dev_f = abs(peak_f8 - mc_f) / mc_f
    dev_f2 = abs(peak_f2_8 - mc_f2) / mc_f2
    order = (float(curve12.density_f.max()) < peak_f8
             and float(curve12.density_fsq.max()) < peak_f2_8)
    return CheckResult(
        criterion=5,
        name="ratio-moment density peaks",
        passed=(dev_f <= 0.10 and dev_f2 <= 0.20 and order),
        measured=(f"peak rel dev {dev_f:.3f} (mean), {dev_f2:.3f} (second "
                  f"moment) at sigma 8; sigma-12 peaks below sigma-8: {order}"),
        threshold="<= 0.10 and <= 0.20 at the peak; sigma-12 peaks lower",
    )


def _empirical_coverage_subset(sim: SimResult, gamma_db: np.ndarray,
                               n_max: int) -> tuple[np.ndarray, int]:
    f = sim.f[:n_max]
    if len(f) == 0:
        raise ValueError("no attached samples available for coverage")
    cov = np.array([(f <= 10.0 ** (-g / 10.0)).mean() for g in gamma_db])
    return cov, len(f)


def _check_coverage(sim8: SimResult, cfg8: NetworkConfig,
                    cfg12: NetworkConfig, r_inf: float) -> CheckResult:
    gamma_db = np.arange(-10.0, 21.0)
    analytic = coverage_curve(gamma_db, cfg8, r_inf=r_inf)
    mc, n_used = _empirical_coverage_subset(sim8, gamma_db, COVERAGE_SAMPLES)
    dev = float(np.max(np.abs(analytic - mc)))
    cmp_db = np.array([-5.0, 0.0, 5.0])
    gain = (coverage_curve(cmp_db, cfg12, r_inf=r_inf)
            - coverage_curve(cmp_db, cfg8, r_inf=r_inf))
    order = bool(np.all(gain >= -0.02))
    return CheckResult(
        criterion=6,
        name="coverage vs empirical coverage",
        passed=(dev <= 0.05 and order),
        measured=(f"max abs dev {dev:.4f} over [-10, 20] dB "
                  f"({n_used} attached samples); sigma-12 coverage within "
                  f"0.02 of sigma 8 at {{-5, 0, 5}} dB: {order}"),
        threshold="<= 0.05; coverage(sigma 12) >= coverage(sigma 8) - 0.02",
    )


def _check_power_scaling(mu_g8: list[float]) -> CheckResult:
    sys_c = SystemConstants()
    pmax = np.array([sys_c.interference_ratio * sys_c.n0 * sys_c.bw / m
                     for m in mu_g8])
    pdens = pmax * np.array([bs_density(r) for r in TREND_RC])
    eta = 3.0
    ratio_p = pmax[1:] / pmax[:-1]
    ratio_d = pdens[1:] / pdens[:-1]
    dev_p = float(np.max(np.abs(ratio_p / 2.0 ** eta - 1.0)))
    dev_d = float(np.max(np.abs(ratio_d / 2.0 ** (eta - 2.0) - 1.0)))
    mono = bool(np.all(np.diff(pmax) > 0.0) and np.all(np.diff(pdens) > 0.0))
    return CheckResult(
        criterion=7,
        name="site power and power density scaling",
        passed=(dev_p <= 1e-6 and dev_d <= 1e-6 and mono),
        measured=(f"doubling ratios off 2^eta by {dev_p:.3e} and 2^(eta-2) "
                  f"by {dev_d:.3e}; both increasing: {mono}"),
        threshold="= 2^eta and 2^(eta-2) to 1e-6; monotone increasing",
    )


def _check_rate_density(cfg8: NetworkConfig) -> CheckResult:
    target = 0.9
    gammas = []
    scaled = []
    for rc in TREND_RC:
        curve = rate_density(target, [rc], replace(cfg8, rc=rc))
        gammas.append(curve.gamma_star_db)
        scaled.append(float(curve.rate_density[0]) * rc * rc)
    spread_db = max(gammas) - min(gammas)
    scaled = np.asarray(scaled)
    rel = float(np.max(np.abs(scaled / scaled[0] - 1.0)))
    return CheckResult(
        criterion=8,
        name="rate density scaling at fixed coverage",
        passed=(spread_db <= 0.01 and rel <= 1e-6),
        measured=(f"achieved SIR target spread {spread_db:.3e} dB across rc; "
                  f"rate * rc^2 rel spread {rel:.3e} (target {target:g})"),
        threshold="SIR spread <= 0.01 dB; rate ~ rc^-2 to 1e-6",
    )


def _tlpm_quadrature(a: float, sigma: float, xi_max: float, order: int) -> float:
    norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))
    shift = order * a * sigma * sigma
    lower = -shift - 12.0 * sigma

    def f(xi: float) -> float:
        return math.exp(-order * a * xi) * norm * math.exp(-0.5 * (xi / sigma) ** 2)

    return integrate(f, lower, xi_max)


def _check_identities() -> CheckResult:
    a = math.log(10.0) / 10.0
    xs = np.linspace(-6.0, 6.0, 241)
    rt = float(np.max(np.abs(q_inverse(q_function(xs)) - xs)))

    tlpm_dev = 0.0
    for sigma in (8.0, 12.0):
        for order in (1, 2):
            for xi_max in (-8.0, 0.0, 10.0, 3.0 * sigma):
                closed = truncated_ln_partial_moment(a, sigma, xi_max, order)
                quad = _tlpm_quadrature(a, sigma, xi_max, order)
                tlpm_dev = max(tlpm_dev, abs(closed - quad) / quad)

    fit_dev = 0.0
    for m, v in ((2.0, 4.0), (1.0, 0.25), (0.3, 9.0), (10.0, 1e-6)):
        fit = fit_lognormal(m, v)
        m_back = math.exp(fit.mu + 0.5 * fit.sigma ** 2)
        v_back = math.expm1(fit.sigma ** 2) * math.exp(2.0 * fit.mu
                                                       + fit.sigma ** 2)
        fit_dev = max(fit_dev, abs(m_back - m) / m, abs(v_back - v) / v)

    sys_c = SystemConstants()
    no_user = cdma_bs_power([], sys_c) == sys_c.p_cch
    # aggregate load (alpha + f) hitting (1 + alpha g)/g exactly is the pole
    pole_load = (1.0 + sys_c.alpha * sys_c.gamma_star) / sys_c.gamma_star
    try:
        cdma_bs_power([(100.0, pole_load - sys_c.alpha, 0.5)], sys_c)
        pole_raised = False
    except InfeasibleLoadError:
        pole_raised = True
    below = cdma_bs_power([(100.0, pole_load - sys_c.alpha - 1e-9, 0.5)], sys_c)
    pole_ok = pole_raised and math.isfinite(below) and below > 0.0

    return CheckResult(
        criterion=9,
        name="numeric identities",
        passed=(rt <= 1e-9 and tlpm_dev <= 1e-6 and fit_dev <= 1e-12
                and no_user and pole_ok),
        measured=(f"q round-trip {rt:.2e}; partial-moment vs quadrature "
                  f"{tlpm_dev:.2e}; lognormal fit round-trip {fit_dev:.2e}; "
                  f"no-user power = control power: {no_user}; pole raised: "
                  f"{pole_ok}"),
        threshold="1e-9 / 1e-6 / 1e-12; exact control power; pole detected",
    )


def _sim_fingerprint(res: SimResult) -> bytes:
    arrays = (res.rb, res.f, res.g_own, res.ocif, res.g_near1, res.g_near2,
              res.xi_own, res.n_total, res.n_attached)
    return b"".join(np.ascontiguousarray(a).tobytes() for a in arrays)


def _check_determinism(cfg8: NetworkConfig, seed: int, samples: int,
                       bins: int, tiers: int) -> CheckResult:
    n = min(samples, DETERMINISM_SAMPLES)
    spec = SimSpec(cfg=cfg8, samples=n, seed=seed, tiers=tiers,
                   workers=1, bins=bins)
    first = _sim_fingerprint(simulate(spec))
    second = _sim_fingerprint(simulate(spec))
    wide = _sim_fingerprint(simulate(replace(spec, workers=8)))
    repeat_ok = first == second
    workers_ok = first == wide
    return CheckResult(
        criterion=10,
        name="bit-level reproducibility",
        passed=repeat_ok and workers_ok,
        measured=(f"repeat run identical: {repeat_ok}; workers 1 vs 8 "
                  f"identical: {workers_ok} ({n} samples)"),
        threshold="byte-identical raw outputs",
    )


def run_all(seed: int = 0, samples: int = 1_000_000, workers: int = 1,
            bins: int = 40, rc: float = 1000.0, tiers: int = 3,
            sim8: SimResult | None = None,
            sim12: SimResult | None = None) -> VerificationReport:
    """Run every verification check and collect the report.

    Pre-computed simulations for sigma = 8 and 12 dB may be passed in to
    avoid re-running them; they must use the matching rc, seed, sample
    count, tier count and bin count for the report header to be truthful.
    """
    cfg8 = NetworkConfig(eta=3.0, sigma_db=8.0, rc=rc)
    cfg12 = NetworkConfig(eta=3.0, sigma_db=12.0, rc=rc)
    if sim8 is None:
        sim8 = simulate(SimSpec(cfg=cfg8, samples=samples, seed=seed,
                                tiers=tiers, workers=workers, bins=bins))
    if sim12 is None:
        sim12 = simulate(SimSpec(cfg=cfg12, samples=samples, seed=seed,
                                 tiers=tiers, workers=workers, bins=bins))

    mu_g8 = [ocif_spatial_distribution(replace(cfg8, rc=r)).mu_g
             for r in TREND_RC]
    mu_g12 = [ocif_spatial_distribution(replace(cfg12, rc=r)).mu_g
              for r in TREND_RC]

    checks = (
        _check_attachment(sim8, sim12, cfg8, cfg12),
        _check_scale_invariance(cfg8),
        _check_ocif_bound(sim8, sim12, cfg8, cfg12, math.inf),
        _check_ocif_trends(mu_g8, mu_g12),
        _check_ratio_peaks(sim8, cfg8, cfg12, math.inf),
        _check_coverage(sim8, cfg8, cfg12, math.inf),
        _check_power_scaling(mu_g8),
        _check_rate_density(cfg8),
        _check_identities(),
        _check_determinism(cfg8, seed, samples, bins, tiers),
    )

    r_eq = equivalent_network_radius(rc, sim8.spec.tiers)
    v8, n8, gap8 = _ocif_comparison(sim8, cfg8, r_eq)
    m_peaks = _check_ratio_peaks(sim8, cfg8, cfg12, r_eq)
    m_cov = _check_coverage(sim8, cfg8, cfg12, r_eq)
    notes = (
        f"info: ring truncated at the simulated network's radius "
        f"({r_eq / rc:.6f} rc) instead of infinity:",
        f"info:   check 3 would measure: bound exceeded in {v8}/{n8} bins "
        f"(sigma 8); mean rel gap {gap8:+.3f}",
        f"info:   check 5 would measure: {m_peaks.measured}",
        f"info:   check 6 would measure: {m_cov.measured}",
    )

    return VerificationReport(seed=seed, samples=samples, bins=bins, rc=rc,
                              tiers=tiers, checks=checks, notes=notes)
