"""Slit-geometry figure: two slits and the scattered direction rays.

Input: the double-slit CLI JSON report.  The slit separation comes from
the resolved config in the report's meta; one ray is drawn per entry of
the Bragg table, annotated with its angle exactly as written in the file.
An empty table still draws the forward ray.
"""

from __future__ import annotations

import argparse
import math
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
    report = read_report(in_path, ("meta", "bragg", "lambda_db"))
    config = report["meta"].get("config")
    if not isinstance(config, dict) or "a" not in config:
        raise SchemaError("report meta lacks the resolved slit separation "
                          "'a' in its config")
    separation = float(config["a"])

    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    # slits on the y axis, beam arriving along +x
    half = 0.5 * separation
    wall = 1.6 * half
    ax.plot([0.0, 0.0], [half * 1.15, wall], color="black", linewidth=3.0)
    ax.plot([0.0, 0.0], [-wall, -half * 1.15], color="black", linewidth=3.0)
    ax.plot([0.0, 0.0], [-half * 0.85, half * 0.85], color="black",
            linewidth=3.0)
    ax.scatter([0.0, 0.0], [half, -half], marker="s", s=40,
               color="crimson", zorder=3)
    ax.annotate("a", xy=(0.0, 0.0), fontsize=9, ha="right", va="center",
                xytext=(-8, 0), textcoords="offset points")
    ax.annotate("", xy=(0.0, 0.0), xytext=(-1.2 * wall, 0.0),
                arrowprops={"arrowstyle": "->", "color": "steelblue"})

    labels = []
    entries = report["bragg"]
    reach = 1.4 * wall
    if not entries:
        ax.plot([0.0, reach], [0.0, 0.0], color="darkorange",
                linewidth=1.2)
        rays = 1
    else:
        rays = 0
        for entry in entries:
            angle_text = raw_text(entry["theta_deg"])
            theta = math.radians(float(entry["theta_deg"]))
            ax.plot([0.0, reach * math.cos(theta)],
                    [0.0, reach * math.sin(theta)],
                    color="darkorange", linewidth=1.2)
            ax.annotate(angle_text,
                        xy=(reach * math.cos(theta), reach * math.sin(theta)),
                        fontsize=7, ha="left", va="center")
            labels.append(angle_text)
            rays += 1

    ax.set_aspect("equal")
    ax.set_xlim(-1.3 * wall, 2.0 * wall)
    ax.set_ylim(-1.6 * wall, 1.6 * wall)
    ax.set_title("double slit: scattered direction table")
    ax.set_xticks([])
    ax.set_yticks([])
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return {"out": str(out_path), "labels": labels, "rays": rays}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="in_path", required=True)
    parser.add_argument("--out", dest="out_path", required=True)
    args = parser.parse_args(argv)
    render(args.in_path, args.out_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
