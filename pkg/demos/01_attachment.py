"""Attachment probability under best-cell selection.

A mobile does not always camp on the nearest site: with log-normal
shadowing, a farther site can deliver the strongest signal.  This demo
evaluates the analytic probability that a mobile at radius r_b stays on
the central site and compares it with the exact-grid simulation, for
shadowing spreads of 8 and 12 dB.
"""

import numpy as np

from bestcell import NetworkConfig, SimSpec, attach_probability, simulate
from _common import HAVE_MPL, plt, save_figure, section, table

SAMPLES = 200_000
RC = 1000.0


def main() -> None:
    results = {}
    for sigma in (8.0, 12.0):
        cfg = NetworkConfig(eta=3.0, sigma_db=sigma, rc=RC)
        sim = simulate(SimSpec(cfg=cfg, samples=SAMPLES, seed=0))
        t = sim.bin_centers / RC
        model = attach_probability(sim.bin_centers, cfg)
        results[sigma] = (t, model, sim.attach_freq)

    section("attachment probability vs mobile radius (eta = 3)")
    t = results[8.0][0]
    keep = slice(1, None, 4)
    rows = list(zip(t[keep],
                    results[8.0][1][keep], results[8.0][2][keep],
                    results[12.0][1][keep], results[12.0][2][keep]))
    table(["r_b/rc", "model s8", "sim s8", "model s12", "sim s12"], rows)

    print("\nReading the table: even at the nominal cell edge (r_b = rc) the")
    print("mobile keeps the central site only ~1/3 of the time at 8 dB - the")
    print("strongest cell is often not the nearest.  Wider shadowing (12 dB)")
    print("lowers the probability further because more neighbors get a chance")
    print("to win the comparison.")

    if HAVE_MPL:
        fig, ax = plt.subplots(figsize=(6, 4))
        for sigma, color in ((8.0, "C0"), (12.0, "C1")):
            tt, model, freq = results[sigma]
            ax.plot(tt, model, color=color, label=f"model, sigma = {sigma:g} dB")
            ax.plot(tt, freq, "o", ms=3, color=color, alpha=0.6,
                    label=f"simulation, sigma = {sigma:g} dB")
        ax.set_xlabel("mobile radius  r_b / rc")
        ax.set_ylabel("P[attached to central site]")
        ax.set_ylim(0, 1.02)
        ax.legend()
        ax.grid(alpha=0.3)
        save_figure(fig, "attachment.png")


if __name__ == "__main__":
    main()
