"""Downlink coverage probability against the SIR target.

The per-location ratio moments are matched to a log-normal (with the
sqrt(2) tail widening that accounts for the skew the two-moment match
misses) and averaged over the cell.  This demo compares the resulting
coverage curve with the empirical distribution of f from the exact-grid
simulation, and shows the mild coverage gain under wider shadowing.
"""

import numpy as np

from bestcell import (
    NetworkConfig,
    SimSpec,
    coverage_curve,
    empirical_coverage,
    equivalent_network_radius,
    simulate,
)
from _common import HAVE_MPL, plt, save_figure, section, table

SAMPLES = 200_000
RC = 1000.0


def main() -> None:
    gamma_db = np.arange(-10.0, 21.0, 2.0)
    r_eq = equivalent_network_radius(RC)

    cfg8 = NetworkConfig(eta=3.0, sigma_db=8.0, rc=RC)
    cfg12 = NetworkConfig(eta=3.0, sigma_db=12.0, rc=RC)
    sim8 = simulate(SimSpec(cfg=cfg8, samples=SAMPLES, seed=0))
    sim12 = simulate(SimSpec(cfg=cfg12, samples=SAMPLES, seed=0))

    cov8_inf = coverage_curve(gamma_db, cfg8)
    cov8_eq = coverage_curve(gamma_db, cfg8, r_inf=r_eq)
    cov12_eq = coverage_curve(gamma_db, cfg12, r_inf=r_eq)
    mc8, _ = empirical_coverage(sim8, gamma_db)
    mc12, _ = empirical_coverage(sim12, gamma_db)

    section("coverage vs SIR target (sigma = 8 dB)")
    keep = slice(0, None, 2)
    rows = list(zip(gamma_db[keep], cov8_inf[keep], cov8_eq[keep], mc8[keep]))
    table(["gamma* dB", "model (inf)", "model (grid)", "simulation"], rows)
    print("\nThe infinite-ring model under-covers relative to the finite grid;")
    print("truncating the interference ring at the simulated network's edge")
    print("closes most of the gap.")

    section("shadowing comparison at the grid cutoff")
    rows = [(g, c8, c12, c12 - c8)
            for g, c8, c12 in zip(gamma_db[keep], cov8_eq[keep], cov12_eq[keep])]
    table(["gamma* dB", "cov s8", "cov s12", "delta"], rows)
    print("\nBest-cell selection turns extra shadowing spread into selection")
    print("gain: coverage under 12 dB shadowing is not worse, and typically")
    print("slightly better, than under 8 dB.")

    if HAVE_MPL:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(gamma_db, cov8_inf, "C0--", label="model sigma 8, infinite ring")
        ax.plot(gamma_db, cov8_eq, "C0", label="model sigma 8, ring to grid edge")
        ax.plot(gamma_db, mc8, "C0o", ms=4, label="simulation sigma 8")
        ax.plot(gamma_db, cov12_eq, "C1", label="model sigma 12, ring to grid edge")
        ax.plot(gamma_db, mc12, "C1s", ms=4, label="simulation sigma 12")
        ax.set_xlabel("SIR target gamma* (dB)")
        ax.set_ylabel("coverage probability")
        ax.set_ylim(0, 1.02)
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
        save_figure(fig, "coverage.png")


if __name__ == "__main__":
    main()
