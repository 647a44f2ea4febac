"""Shared helpers for the demo scripts: table printing and optional plots.

Each demo prints its results as plain tables so it works anywhere; when
matplotlib is importable a PNG is additionally written next to the
script under ``demos/output/``.
"""

from __future__ import annotations

import os

OUTPUT_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    HAVE_MPL = True
except ImportError:  # plots are a bonus, never a requirement
    plt = None
    HAVE_MPL = False


def table(headers, rows, fmt="{:>14}"):
    """Print a fixed-width table."""
    print("  ".join(fmt.format(h) for h in headers))
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, float):
                cells.append(fmt.format(f"{v:.6g}"))
            else:
                cells.append(fmt.format(v))
        print("  ".join(cells))


def save_figure(fig, name: str) -> None:
    """Write the figure under demos/output/ and report the path."""
    os.makedirs(OUTPUT_DIR, exist_ok=True)
    path = os.path.join(OUTPUT_DIR, name)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    print(f"\nfigure written to {path}")


def section(title: str) -> None:
    print(f"\n=== {title} ===")
