"""Figure rendering from couette-lab run manifests.

The manifests are flat JSON documents (schema version 1) with optional
per-series CSV siblings; everything drawn here is read straight from
those files.  Envelope overlays are anchored (scaled) to the data at
the fit-window start, since the analytical constants in front of them
are not part of the manifest.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SUPPORTED_SCHEMA = (1,)

# decay series drawn by default, with their dashed envelope overlays
DECAY_SERIES = {
    "l2_omega": ("||omega||_L2", "(1+nu t^3)^(-1/4) e^(-nu t)"),
    "l2_dx_omega": ("||dx omega||_L2", "(1+nu t^3)^(-3/4) e^(-nu t)"),
    "linf_u1": ("||u1||_Linf", "(1+t)^(-1)"),
    "linf_u2": ("||u2||_Linf", "(1+t)^(-2) ln(1+t)"),
}


class PlotError(ValueError):
    """Raised for unusable manifests or plot jobs."""


@dataclass
class PlotJob:
    manifests: list
    kind: str                      # decay | threshold
    output: str
    envelopes: bool = True
    series: list = field(default_factory=list)  # empty -> defaults

    def __post_init__(self):
        if self.kind not in ("decay", "threshold"):
            raise PlotError(f"unknown figure kind {self.kind!r}")
        if not self.manifests:
            raise PlotError("need at least one manifest path")
        outdir = os.path.dirname(os.path.abspath(self.output))
        if not os.path.isdir(outdir) or not os.access(outdir, os.W_OK):
            raise PlotError(f"output directory not writable: {outdir}")


def load_manifest(path: str) -> dict:
    with open(path) as fh:
        man = json.load(fh)
    sv = man.get("schema_version")
    if sv not in SUPPORTED_SCHEMA:
        raise PlotError(f"{path}: unsupported schema version {sv!r}")
    return man


def _envelope(name: str, t: np.ndarray, nu: float) -> np.ndarray:
    if name == "l2_omega":
        return (1.0 + nu * t ** 3) ** (-0.25) * np.exp(-nu * t)
    if name == "l2_dx_omega":
        return (1.0 + nu * t ** 3) ** (-0.75) * np.exp(-nu * t)
    if name == "linf_u1":
        return (1.0 + t) ** (-1.0)
    if name == "linf_u2":
        return (1.0 + t) ** (-2.0) * np.log(1.0 + t)
    raise PlotError(f"no envelope defined for series {name!r}")


def render_decay(job: PlotJob):
    """Log-log decay overlay; returns (path, annotations).

    annotations maps series name -> the fitted slope written into the
    legend (3 decimals), exactly as drawn.
    """
    man = load_manifest(job.manifests[0])
    series = job.series or list(DECAY_SERIES)
    missing = [s for s in series if s not in man.get("series", {})]
    if missing:
        raise PlotError(
            f"manifest lacks series {missing}; available columns: "
            f"{sorted(man.get('series', {}))}")
    t = np.asarray(man["time"], dtype=float)
    nu = float(man["config"]["nu"])
    window = man.get("extra", {}).get("fit_window")
    t_anchor = window[0] if window else (t[t > 0][0] if np.any(t > 0)
                                         else 1.0)

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    annotations = {}
    for name in series:
        vals = np.asarray(man["series"][name], dtype=float)
        mask = (t > 0) & (vals > 0)
        label = DECAY_SERIES.get(name, (name, None))[0]
        fit = man.get("fits", {}).get(name)
        if fit is not None:
            slope_txt = f"{fit['slope']:.3f}"
            annotations[name] = slope_txt
            label = f"{label}  (slope {slope_txt})"
        (line,) = ax.loglog(t[mask], vals[mask], label=label)
        if job.envelopes and name in DECAY_SERIES:
            env = _envelope(name, t[mask], nu)
            i0 = int(np.argmin(np.abs(t[mask] - t_anchor)))
            scale = vals[mask][i0] / env[i0]
            ax.loglog(t[mask], scale * env, "--", color=line.get_color(),
                      alpha=0.6, linewidth=1.0)
    if window:
        ax.axvspan(window[0], window[1], color="0.92", zorder=0,
                   label="fit window")
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.set_title(f"decay overlays (nu = {nu:g}); dashed: envelopes "
                 "anchored at fit-window start")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(job.output, dpi=150)
    plt.close(fig)
    return job.output, annotations


def render_threshold(job: PlotJob):
    """A*(nu) scatter with fitted and reference slope-1/3 lines;
    returns (path, annotations) with the gamma annotation (3 decimals)."""
    man = load_manifest(job.manifests[0])
    thr = man.get("extra", {}).get("threshold")
    if not thr:
        raise PlotError("manifest has no threshold block")
    rows = [r for r in thr.get("rows", []) if r.get("A_star")]
    if len(rows) < 2:
        raise PlotError(
            f"need at least 2 bracketed (nu, A*) points, got {len(rows)}")
    nus = np.array([r["nu"] for r in rows], dtype=float)
    stars = np.array([r["A_star"] for r in rows], dtype=float)
    gamma = thr.get("gamma")
    if gamma is None:
        raise PlotError("manifest threshold block has no gamma fit")
    intercept = thr.get("intercept", np.exp(
        np.mean(np.log(stars) - gamma * np.log(nus))))

    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    ax.loglog(nus, stars, "o", label="A*(nu) bisected")
    grid = np.geomspace(nus.min(), nus.max(), 50)
    gamma_txt = f"{gamma:.3f}"
    ax.loglog(grid, intercept * grid ** gamma, "-",
              label=f"fit: gamma = {gamma_txt}")
    ref_scale = stars[0] / nus[0] ** (1.0 / 3.0)
    ax.loglog(grid, ref_scale * grid ** (1.0 / 3.0), "--", color="gray",
              label="reference slope 1/3")
    ax.set_xlabel("nu")
    ax.set_ylabel("A*")
    ax.set_title("stability threshold amplitude vs viscosity")
    ax.legend(fontsize=9)
    if thr.get("caveat"):
        fig.text(0.01, 0.01, thr["caveat"], fontsize=6, color="0.4")
    fig.tight_layout(rect=(0, 0.04, 1, 1))
    fig.savefig(job.output, dpi=150)
    plt.close(fig)
    return job.output, {"gamma": gamma_txt}
