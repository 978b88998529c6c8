"""Kick-ensemble figure: histogram of resonant momentum transfers.

Input: the kick-sweep CLI CSV (columns run, theta0, dpx, dpy, magnitude,
alignment, bound).  The histogram shows |dP|; the separatrix bound is a
vertical line annotated with the bound value exactly as written in the
file.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

if __package__:
    from .loader import SchemaError, read_table
else:
    sys.path.insert(0, str(Path(__file__).resolve().parent))
    from loader import SchemaError, read_table

COLUMNS = ("run", "theta0", "dpx", "dpy", "magnitude", "alignment", "bound")


def render(in_path, out_path) -> dict:
    table = read_table(in_path, COLUMNS)
    if not table.cells:
        raise SchemaError(f"{in_path}: no ensemble rows to draw")
    magnitudes = table.column("magnitude")
    bound_text = table.raw_column("bound")[0]
    bound = float(bound_text)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    edges = np.linspace(0.0, 1.12 * bound, 18)
    ax.hist(magnitudes, bins=edges, color="steelblue", edgecolor="white")
    ax.axvline(bound, color="crimson", linewidth=1.6)
    ax.annotate(bound_text, xy=(bound, ax.get_ylim()[1] * 0.95),
                fontsize=8, ha="right", va="top", rotation=90,
                color="crimson")
    ax.set_xlabel("|dP|")
    ax.set_ylabel("runs")
    ax.set_title(f"resonant kicks, {len(magnitudes)} runs")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return {"out": str(out_path), "labels": [bound_text],
            "n_runs": int(len(magnitudes))}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="in_path", required=True)
    parser.add_argument("--out", dest="out_path", required=True)
    args = parser.parse_args(argv)
    render(args.in_path, args.out_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
