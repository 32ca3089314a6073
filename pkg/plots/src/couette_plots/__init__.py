"""Rendering of couette-lab run manifests into figures.

This package consumes the JSON/CSV files written by ``couette-lab``
drivers and draws figures from them; it never recomputes norms and
never modifies the manifests it reads.
"""

from couette_plots.render import (PlotJob, render_decay, render_threshold,
                                  load_manifest, PlotError)

__all__ = ["PlotJob", "render_decay", "render_threshold",
           "load_manifest", "PlotError"]
