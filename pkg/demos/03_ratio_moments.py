"""Moments of the interference-over-own-power ratio f.

Coverage depends on f = (sum of other-site gains) / (serving gain).
This demo tabulates the analytic first and second moments of f along
the cell radius, weights them by where attached mobiles actually sit,
and compares the resulting densities with the exact-grid simulation.
"""

import numpy as np

from bestcell import (
    NetworkConfig,
    SimSpec,
    equivalent_network_radius,
    iopr_spatial_stats,
    simulate,
)
from _common import HAVE_MPL, plt, save_figure, section, table

SAMPLES = 200_000
RC = 1000.0


def mc_density(sim, values):
    """Simulated analogue of the model's density: per-bin conditional mean
    of ``values`` times the attached-mobile density."""
    idx = np.clip(np.searchsorted(sim.bin_edges, sim.rb, side="right") - 1,
                  0, sim.spec.bins - 1)
    width = sim.bin_edges[1] - sim.bin_edges[0]
    out = np.zeros(sim.spec.bins)
    total = len(sim.f)
    for k in range(sim.spec.bins):
        sel = idx == k
        if sel.any():
            out[k] = values[sel].mean() * sel.sum() / (total * width)
    return out


def main() -> None:
    cfg8 = NetworkConfig(eta=3.0, sigma_db=8.0, rc=RC)
    cfg12 = NetworkConfig(eta=3.0, sigma_db=12.0, rc=RC)
    sim8 = simulate(SimSpec(cfg=cfg8, samples=SAMPLES, seed=0))
    sim12 = simulate(SimSpec(cfg=cfg12, samples=SAMPLES, seed=0))
    r_eq = equivalent_network_radius(RC)

    stats8 = iopr_spatial_stats(cfg8, r_inf=r_eq)
    stats12 = iopr_spatial_stats(cfg12, r_inf=r_eq)

    section("cell-average ratio moments (ring truncated at the grid edge)")
    rows = [
        ("sigma 8", stats8.mu_f, sim8.mu_f, stats8.sigma_f_sq, sim8.sigma_f_sq),
        ("sigma 12", stats12.mu_f, sim12.mu_f, stats12.sigma_f_sq,
         sim12.sigma_f_sq),
    ]
    table(["case", "mu_f model", "mu_f sim", "var model", "var sim"], rows)

    section("density peaks")
    dens8 = mc_density(sim8, sim8.f)
    dens12 = mc_density(sim12, sim12.f)
    rows = [
        ("sigma 8", float(np.nanmax(stats8.density_f)), float(dens8.max())),
        ("sigma 12", float(np.nanmax(stats12.density_f)), float(dens12.max())),
    ]
    table(["case", "model peak", "sim peak"], rows)
    print("\nWider shadowing flattens the distribution of f: the sigma-12 peak")
    print("sits below the sigma-8 peak in both model and simulation.")

    if HAVE_MPL:
        fig, ax = plt.subplots(figsize=(6, 4))
        t = stats8.rb / RC
        ax.plot(t, stats8.density_f, "C0", label="model f density, sigma 8")
        ax.plot(sim8.bin_centers / RC, dens8, "C0o", ms=3,
                label="simulation, sigma 8")
        ax.plot(t, stats12.density_f, "C1", label="model f density, sigma 12")
        ax.plot(sim12.bin_centers / RC, dens12, "C1o", ms=3,
                label="simulation, sigma 12")
        ax.set_xlabel("mobile radius  r_b / rc")
        ax.set_ylabel("density of the mean ratio")
        ax.legend()
        ax.grid(alpha=0.3)
        save_figure(fig, "ratio_moments.png")


if __name__ == "__main__":
    main()
