"""Delay-run figure: history segment, solution curve, kink markers.

Input: the delay CLI's node CSV (columns t, y, ydot_left, ydot_right).
The history curve is drawn from the polynomial recorded in the meta line;
kink markers sit at the breaking points recorded there, each annotated
with its order-1 jump exactly as written in the file.
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

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    history_t = np.linspace(-delay, 0.0, 200)
    ax.plot(history_t, npoly.polyval(history_t, coeffs), color="crimson",
            linewidth=2.0, label="history")
    ax.plot(table.column("t"), table.column("y"), color="black",
            linewidth=1.4, label="solution")

    labels = []
    top = float(np.max(table.column("y")))
    for point in points:
        t_burst = float(point["t"])
        jump_text = raw_text(point["jumps"][0])
        ax.axvline(t_burst, color="gray", linestyle=":", linewidth=0.8)
        ax.annotate(jump_text, xy=(t_burst, top), fontsize=7,
                    rotation=90, ha="right", va="top")
        labels.append(jump_text)

    ax.set_xlabel("t")
    ax.set_ylabel("y")
    ax.legend(loc="best")
    ax.set_title("retarded delay run: kinks smooth out")
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
