"""Sewing-chain figure: event ladder between a pair of worldlines.

Input: the sewing CLI CSV (columns generation, trajectory_id, t).  Each
trajectory is a vertical rail; events are dots joined in generation order,
and same-rail return intervals are annotated with the spacing values the
CLI recorded in the meta line, verbatim.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

if __package__:
    from .loader import raw_text, read_table
else:
    sys.path.insert(0, str(Path(__file__).resolve().parent))
    from loader import raw_text, read_table

COLUMNS = ("generation", "trajectory_id", "t")


def render(in_path, out_path) -> dict:
    table = read_table(in_path, COLUMNS)
    rails = table.column("trajectory_id")
    times = table.column("t")

    fig, ax = plt.subplots(figsize=(5.0, 6.0))
    for rail in sorted(set(rails.tolist())):
        ax.axvline(rail, color="black", linewidth=1.2)
    ax.plot(rails, times, color="steelblue", linewidth=1.0, zorder=1)
    ax.scatter(rails, times, color="crimson", s=28, zorder=2)

    labels = []
    spacings = table.meta.get("spacings") or []
    for k, spacing in enumerate(spacings):
        if k + 2 >= len(times):
            break
        text = raw_text(spacing)
        midpoint = 0.5 * (times[k] + times[k + 2])
        ax.annotate(text, xy=(rails[k], midpoint), fontsize=7,
                    ha="left" if rails[k] == min(rails) else "right",
                    va="center",
                    xytext=(6 if rails[k] == min(rails) else -6, 0),
                    textcoords="offset points")
        labels.append(text)

    ax.set_xlabel("trajectory")
    ax.set_ylabel("t")
    ax.set_xticks(sorted(set(rails.tolist())))
    ax.set_title("discontinuity sewing chain")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return {"out": str(out_path), "labels": labels,
            "n_events": len(times)}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="in_path", required=True)
    parser.add_argument("--out", dest="out_path", required=True)
    args = parser.parse_args(argv)
    render(args.in_path, args.out_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
