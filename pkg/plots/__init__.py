"""Figure scripts for the delayed-electrodynamics CLI outputs.

Each script renders one figure kind from the documented CSV/JSON files,
taking --in/--out flags.  Rendering is read-only: every number shown on a
figure is the exact string found in the input file.
"""

__version__ = "0.1.0"
