"""Figure construction for each result kind.

All figures are rendered with the non-interactive Agg backend and written
to the requested path; nothing here depends on the engine package, only on
its CSV formats.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import read_result_csv

_KINDS = ("convergence", "tails", "lyapunov", "density")


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple                 # one or more CSV paths
    out: str
    haar_mean: float | None = None   # reference value for convergence plots
    rate_path: str | None = None     # optional rate CSV with fitted lines
    title: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input file is required")
        object.__setattr__(self, "inputs", tuple(self.inputs))


def _empty(ax, message="no data"):
    ax.annotate(message, xy=(0.5, 0.5), xycoords="axes fraction",
                ha="center", va="center", fontsize=14, color="0.4")


def _group_by_observable(table):
    groups = {}
    for row in table.rows:
        groups.setdefault(row[1], []).append(row)
    return groups


def _render_convergence(spec, ax):
    table = read_result_csv(spec.inputs[0], "estimates")
    if not table.rows:
        _empty(ax)
        return
    fits = {}
    if spec.rate_path:
        rate = read_result_csv(spec.rate_path, "rate")
        fits = {r[0]: (r[1], r[2]) for r in rate.rows}
    for name, rows in sorted(_group_by_observable(table).items()):
        rows.sort(key=lambda r: r[0])
        ns = np.array([r[0] for r in rows])
        means = np.array([r[2] for r in rows])
        errs = np.array([r[3] for r in rows])
        if spec.haar_mean is not None:
            dev = np.abs(means - spec.haar_mean)
            ax.errorbar(ns, dev, yerr=errs, fmt="o-", ms=3, capsize=2,
                        label=f"|mean - {spec.haar_mean:g}|  {name}")
            ax.set_yscale("log")
            ax.set_ylabel("absolute deviation from Haar mean")
        else:
            ax.errorbar(ns, means, yerr=errs, fmt="o-", ms=3, capsize=2,
                        label=name)
            ax.set_ylabel("ensemble mean")
        if name in fits:
            eta, c = fits[name]
            grid = np.linspace(ns.min(), ns.max(), 200)
            ax.plot(grid, c * np.exp(-eta * grid), "--", lw=1,
                    label=f"{c:.3g} exp(-{eta:.3g} n)")
    ax.set_xlabel("step n")
    ax.legend(fontsize=8)


def _render_tails(spec, ax):
    any_data = False
    for path in spec.inputs:
        table = read_result_csv(path, "tails")
        if not table.rows:
            continue
        any_data = True
        ns = np.array(table.column("n"))
        probs = np.array(table.column("prob"))
        lo = np.array(table.column("lo"))
        hi = np.array(table.column("hi"))
        label = str(path).rsplit("/", 1)[-1]
        pos = probs > 0
        if pos.any():
            ax.plot(ns[pos], probs[pos], "o-", ms=4, label=label)
            ax.fill_between(ns[pos], np.maximum(lo[pos], 1e-300), hi[pos],
                            alpha=0.2)
        if (~pos).any():
            # zero counts: show the Wilson upper endpoint as an open marker
            ax.plot(ns[~pos], hi[~pos], "v", mfc="none", ms=5,
                    label=f"{label} (0 hits, upper bound)")
    if not any_data:
        _empty(ax)
        return
    ax.set_yscale("log")
    ax.set_xlabel("step n")
    ax.set_ylabel("tail probability")
    ax.legend(fontsize=8)


def _render_lyapunov(spec, ax):
    table = read_result_csv(spec.inputs[0], "estimates")
    if not table.rows:
        _empty(ax)
        return
    exps = np.array(table.column("mean"))
    ax.hist(exps[np.isfinite(exps)], bins=30, color="C0", alpha=0.8)
    ax.axvline(0.0, color="k", lw=1)
    ax.set_xlabel("empirical exponent")
    ax.set_ylabel("count")


def _render_density(spec, ax):
    table = read_result_csv(spec.inputs[0], "density")
    if not table.rows:
        _empty(ax)
        return
    lo = np.array(table.column("bin_lo"))
    hi = np.array(table.column("bin_hi"))
    mass = np.array(table.column("hist_mass"))
    dens = np.array(table.column("density"))
    widths = hi - lo
    centers = 0.5 * (lo + hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        ax.bar(centers, mass / widths, width=widths, alpha=0.4,
               label="sampled")
    ok = np.isfinite(dens)
    ax.plot(centers[ok], dens[ok], "C1-", lw=1.5, label="analytic density")
    ax.set_xlabel("y")
    ax.set_ylabel("density")
    ax.legend(fontsize=8)


_RENDERERS = {
    "convergence": _render_convergence,
    "tails": _render_tails,
    "lyapunov": _render_lyapunov,
    "density": _render_density,
}


def render(spec: FigureSpec) -> str:
    """Render one figure and write it to spec.out; returns the output path."""
    fig, ax = plt.subplots(figsize=(6, 4), dpi=150)
    try:
        _RENDERERS[spec.kind](spec, ax)
        ax.set_title(spec.title or spec.kind)
        fig.tight_layout()
        fig.savefig(spec.out)
    finally:
        plt.close(fig)
    return spec.out
