"""Static SVG figures for the report path (matplotlib, Agg backend)."""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

golden_mean = (math.sqrt(5) - 1.0) / 2.0
fig_width = 4.5

params = {
    "axes.labelsize": 10,
    "font.size": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": [fig_width, fig_width * golden_mean],
    "lines.markersize": 4,
    "lines.linewidth": 1,
    "svg.hashsalt": "btspec",
    "svg.fonttype": "none",
}


def _figure():
    with plt.rc_context(params):
        fig, ax = plt.subplots()
    return fig, ax


def _save(fig, path, description=None):
    meta = {"Date": None}
    if description:
        meta["Description"] = description
    with plt.rc_context(params):
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata=meta)
    plt.close(fig)
    return path


def plot_spectrum(branches, path, title=None, description=None):
    """Branch values in the complex plane, Im against Re, coloured by q."""
    fig, ax = _figure()
    if branches:
        re = [b.lam.real for b in branches]
        im = [b.lam.imag for b in branches]
        qs = [b.q for b in branches]
        sc = ax.scatter(re, im, c=qs, cmap="viridis", s=14,
                        vmin=min(qs), vmax=max(qs) if max(qs) > min(qs) else min(qs) + 1)
        if len(set(qs)) > 1:
            fig.colorbar(sc, ax=ax, label="q")
    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    if title:
        ax.set_title(title)
    return _save(fig, path, description)


def plot_curves(sweep, path, description=None):
    """Spectral curves of a sweep: each continued branch drawn as a polyline."""
    fig, ax = _figure()
    cmap = plt.get_cmap("viridis")
    vals = sweep.values
    lo, hi = min(vals), max(vals)
    span = hi - lo if hi > lo else 1.0
    for curve in sweep.curves:
        pts = [sweep.branches[k][i].lam for k, i in curve]
        if len(pts) > 1:
            ax.plot([z.real for z in pts], [z.imag for z in pts], color="0.6", lw=0.6, zorder=1)
    for k, bs in enumerate(sweep.branches):
        if bs:
            ax.scatter([b.lam.real for b in bs], [b.lam.imag for b in bs], s=10, zorder=2,
                       color=cmap((vals[k] - lo) / span))
    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    ax.set_title(f"{sweep.parameter}-sweep ({len(vals)} values)")
    return _save(fig, path, description)


def plot_pseudospectra(grid, path, description=None):
    """log10 of the resolvent norm; contour map when the samples form a 2D grid."""
    fig, ax = _figure()
    re = np.unique(grid.z.real)
    im = np.unique(grid.z.imag)
    vals = np.log10(np.where(np.isfinite(grid.values), grid.values, np.nan))
    if re.size > 1 and im.size > 1 and re.size * im.size == grid.z.size:
        Z = np.full((im.size, re.size), np.nan)
        for z, v in zip(grid.z, vals):
            Z[np.searchsorted(im, z.imag), np.searchsorted(re, z.real)] = v
        cs = ax.contourf(re, im, Z, levels=12, cmap="magma_r")
        fig.colorbar(cs, ax=ax, label=r"$\log_{10}\|(A-z)^{-1}\|$")
        ax.set_xlabel("Re z")
        ax.set_ylabel("Im z")
    else:
        axis = grid.z.imag if im.size > 1 else grid.z.real
        ax.plot(axis, vals, "o-")
        bad = ~grid.converged
        if bad.any():
            ax.plot(axis[bad], np.nan_to_num(vals[bad]), "rx")
        ax.set_xlabel("Im z" if im.size > 1 else "Re z")
        ax.set_ylabel(r"$\log_{10}\|(A-z)^{-1}\|$")
    return _save(fig, path, description)


def plot_asymptotics(report, path, description=None):
    """Scaled real and imaginary parts against g with their Airy targets."""
    fig, ax = _figure()
    g = [r.g for r in report.rows]
    ax.plot(g, [r.re_scaled for r in report.rows], "o-", label=r"Re $\lambda\,g^{-2/3}$")
    ax.plot(g, [r.im_scaled for r in report.rows], "s-", label=r"$(gr-$Im$\lambda)\,g^{-2/3}$")
    if report.rows:
        ax.axhline(report.rows[0].target_re, color="C0", ls="--", lw=0.8)
        ax.axhline(report.rows[0].target_im, color="C1", ls="--", lw=0.8)
    ax.set_xscale("log")
    ax.set_xlabel("g")
    ax.legend(frameon=False)
    return _save(fig, path, description)


def plot_eigenfunction(rec, path, description=None):
    """Modulus of a reconstructed strip eigenfunction."""
    fig, ax = _figure()
    full = np.abs(rec.grid.scatter(rec.u, 0j))
    extent = [rec.grid.x[0], rec.grid.x[-1], rec.grid.y[0], rec.grid.y[-1]]
    im = ax.imshow(full.T, origin="lower", extent=extent, aspect="auto", cmap="viridis")
    fig.colorbar(im, ax=ax, label="|u|")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(rf"$\lambda$ = {rec.lam.real:.4g} {rec.lam.imag:+.4g}i")
    return _save(fig, path, description)
