"""Direction-fan figure: beam shifts along reciprocal lattice vectors.

Input: the vonlaue CLI JSON report (rows of G, du, residual).  Each row
becomes one arrow from the origin along its direction change du, labeled
with the lattice-consistency residual exactly as written in the file.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

if __package__:
    from .loader import SchemaError, raw_text, read_report
else:
    sys.path.insert(0, str(Path(__file__).resolve().parent))
    from loader import SchemaError, raw_text, read_report


def render(in_path, out_path) -> dict:
    report = read_report(in_path, ("meta", "rows"))
    rows = report["rows"]
    if not isinstance(rows, list):
        raise SchemaError(f"{in_path}: 'rows' must be a list")

    fig, ax = plt.subplots(figsize=(5.6, 5.6))
    labels = []
    reach = 0.0
    for row in rows:
        for key in ("du", "residual"):
            if key not in row:
                raise SchemaError(f"{in_path}: row lacks {key!r}; row has "
                                  f"{sorted(row)}")
        dx, dy = float(row["du"][0]), float(row["du"][1])
        reach = max(reach, abs(dx), abs(dy))
        text = raw_text(row["residual"])
        if dx == 0.0 and dy == 0.0:
            ax.scatter([0.0], [0.0], color="crimson", s=24, zorder=3)
        else:
            ax.annotate("", xy=(dx, dy), xytext=(0.0, 0.0),
                        arrowprops={"arrowstyle": "->",
                                    "color": "steelblue"})
        ax.annotate(text, xy=(dx, dy), fontsize=6, ha="left", va="bottom")
        labels.append(text)

    margin = 1.25 * (reach if reach > 0.0 else 1.0)
    ax.set_xlim(-margin, margin)
    ax.set_ylim(-margin, margin)
    ax.set_aspect("equal")
    ax.set_xlabel("du_x")
    ax.set_ylabel("du_y")
    ax.set_title("beam direction changes per reciprocal vector")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return {"out": str(out_path), "labels": labels, "arrows": len(rows)}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="in_path", required=True)
    parser.add_argument("--out", dest="out_path", required=True)
    args = parser.parse_args(argv)
    render(args.in_path, args.out_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
