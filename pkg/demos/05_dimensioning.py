"""Network dimensioning: site power, power density, and rate density.

In the interference-limited regime the maximum site power follows from
requiring the cell-average interference gain to carry a fixed design
margin over thermal noise.  This demo tabulates the scaling of site
power and area power density with cell radius, the rate density
achievable at a coverage target, and the CDMA power budget with its
load pole.
"""

import numpy as np

from bestcell import (
    InfeasibleLoadError,
    NetworkConfig,
    SystemConstants,
    bs_density,
    cdma_bs_power,
    max_bs_power,
    rate_density,
)
from _common import HAVE_MPL, plt, save_figure, section, table

RC_LIST = [125.0, 250.0, 500.0, 1000.0, 2000.0]


def main() -> None:
    cfg = NetworkConfig(eta=3.0, sigma_db=8.0)
    sys_c = SystemConstants()

    section("maximum site power and area power density")
    rows = []
    pmax_list = []
    for rc in RC_LIST:
        pmax = max_bs_power(rc, cfg, sys_c, n=200)
        pmax_list.append(pmax)
        rows.append((rc, pmax, pmax * bs_density(rc) * 1e6))
    table(["rc (m)", "P_max (W)", "density (W/km^2)"], rows)
    print("\nDoubling the cell radius multiplies the required site power by")
    print(f"2^eta = {2.0 ** cfg.eta:g} and the power per unit area by "
          f"2^(eta-2) = {2.0 ** (cfg.eta - 2):g}:")
    print("covering with fewer, larger cells costs more total energy.")

    section("rate density at a 90% coverage target")
    curve = rate_density(0.9, RC_LIST, cfg, n=200)
    rows = [(rc, dens * 1e6, rate * 1e6)
            for rc, dens, rate in zip(curve.rc, curve.cell_density,
                                      curve.rate_density)]
    table(["rc (m)", "sites/km^2", "bit/s/Hz/km^2"], rows)
    print(f"\nThe achieved SIR target ({curve.gamma_star_db:.2f} dB) and "
          f"spectral efficiency ({curve.c_cell:.3f} bit/s/Hz)")
    print("are radius-free; rate density therefore rises as rc^-2 -")
    print("densification buys capacity linearly in site count.")

    section("CDMA site power and the load pole")
    share = sys_c.gamma_star / (1.0 + sys_c.alpha * sys_c.gamma_star)
    pole = (1.0 + sys_c.alpha * sys_c.gamma_star) / sys_c.gamma_star
    print(f"pole at aggregate load sum(alpha + f_u) = {pole:g}")
    rows = []
    for f_u in (0.2, 0.6, 0.9, 0.99):
        users = [(500.0, f_u, 0.0)]
        rows.append((f_u, sys_c.alpha + f_u, cdma_bs_power(users, sys_c)))
    table(["f_u", "load", "P_BS (W)"], rows)
    try:
        cdma_bs_power([(500.0, 1.0, 0.0)], sys_c)
    except InfeasibleLoadError as exc:
        print(f"\nat f_u = 1.0 the load hits the pole: {exc}")

    if HAVE_MPL:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.loglog(RC_LIST, pmax_list, "o-")
        ax.set_xlabel("cell radius rc (m)")
        ax.set_ylabel("maximum site power (W)")
        ax.grid(alpha=0.3, which="both")
        save_figure(fig, "dimensioning.png")


if __name__ == "__main__":
    main()
