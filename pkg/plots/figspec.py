"""Figure dispatch: one spec = input path(s) + figure kind + output image.

Usage as a script renders a batch, each item given as kind:input:output;
independent renders run in parallel worker processes.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

if not __package__:
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

KINDS = ("dde", "ndde", "sewing", "bragg", "kick-hist", "vonlaue")


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input file(s), figure kind, output image path."""

    kind: str
    inputs: Tuple[str, ...]
    out: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"expected one of {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input path is required")


def render(spec: FigureSpec) -> dict:
    """Render one figure; returns the drawn-label summary of the script."""
    from plots import (fig_bragg, fig_dde, fig_kick_hist, fig_ndde,
                       fig_sewing, fig_vonlaue)
    dispatch = {
        "dde": fig_dde.render,
        "ndde": fig_ndde.render,
        "sewing": fig_sewing.render,
        "bragg": fig_bragg.render,
        "kick-hist": fig_kick_hist.render,
        "vonlaue": fig_vonlaue.render,
    }
    return dispatch[spec.kind](spec.inputs[0], spec.out)


def _render_job(spec: FigureSpec) -> dict:
    return render(spec)


def render_batch(specs: Sequence[FigureSpec],
                 workers: Optional[int] = None) -> list:
    """Render independent figures, in parallel when workers allows it."""
    specs = list(specs)
    if workers is not None and workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1 or len(specs) <= 1:
        return [render(spec) for spec in specs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_render_job, specs))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        description="batch figure rendering from CLI output files")
    parser.add_argument("items", nargs="+",
                        help="each item is kind:input:output, e.g. "
                             "ndde:run.csv:run.png")
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args(argv)
    specs = []
    for item in args.items:
        parts = item.split(":")
        if len(parts) != 3:
            print(f"bad item {item!r}: expected kind:input:output",
                  file=sys.stderr)
            return 2
        specs.append(FigureSpec(kind=parts[0], inputs=(parts[1],),
                                out=parts[2]))
    render_batch(specs, workers=args.workers)
    return 0


if __name__ == "__main__":
    sys.exit(main())
