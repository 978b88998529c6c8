"""Neutral-delay figure: solution plus derivative panel with lasting kinks.

Input: the delay CLI's node CSV (columns t, y, ydot_left, ydot_right).
The top panel shows history and solution; the bottom panel overlays the
left and right derivative traces so the persistent jumps are visible.
Markers and jump annotations come from the meta line, verbatim.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from numpy.polynomial import polynomial as npoly

if __package__:
    from .loader import breaking_points, polynomial_history, raw_text, \
        read_table
else:
    sys.path.insert(0, str(Path(__file__).resolve().parent))
    from loader import breaking_points, polynomial_history, raw_text, \
        read_table

COLUMNS = ("t", "y", "ydot_left", "ydot_right")


def render(in_path, out_path) -> dict:
    table = read_table(in_path, COLUMNS)
    points = breaking_points(table.meta)
    coeffs, delay = polynomial_history(table.meta)

    fig, (ax_y, ax_d) = plt.subplots(2, 1, figsize=(7.0, 5.6), sharex=True)
    history_t = np.linspace(-delay, 0.0, 200)
    ax_y.plot(history_t, npoly.polyval(history_t, coeffs), color="crimson",
              linewidth=2.0, label="history")
    times = table.column("t")
    ax_y.plot(times, table.column("y"), color="black", linewidth=1.4,
              label="solution")
    ax_d.plot(times, table.column("ydot_left"), color="steelblue",
              linewidth=1.0, label="ydot (left)")
    ax_d.plot(times, table.column("ydot_right"), color="darkorange",
              linewidth=1.0, linestyle="--", label="ydot (right)")
    ax_d.plot(history_t, npoly.polyval(history_t, npoly.polyder(coeffs)),
              color="crimson", linewidth=2.0)

    labels = []
    floor = float(np.min(table.column("ydot_left")))
    for point in points:
        t_kink = float(point["t"])
        jump_text = raw_text(point["jumps"][0])
        for axis in (ax_y, ax_d):
            axis.axvline(t_kink, color="gray", linestyle=":", linewidth=0.8)
        ax_d.annotate(jump_text, xy=(t_kink, floor), fontsize=7,
                      rotation=90, ha="right", va="bottom")
        labels.append(jump_text)

    ax_y.set_ylabel("y")
    ax_y.legend(loc="best")
    ax_y.set_title("neutral delay run: kinks persist at every step")
    ax_d.set_xlabel("t")
    ax_d.set_ylabel("ydot")
    ax_d.legend(loc="best")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return {"out": str(out_path), "labels": labels,
            "n_points": len(points)}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="in_path", required=True)
    parser.add_argument("--out", dest="out_path", required=True)
    args = parser.parse_args(argv)
    render(args.in_path, args.out_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
