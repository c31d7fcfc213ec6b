"""Render tradeoff curves to image files next to the CSV output."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .scheme import Variant  # noqa: E402
from . import tradeoff  # noqa: E402

_STYLE = {
    Variant.LSP: dict(color="tab:red", marker="o"),
    Variant.LP: dict(color="tab:blue", marker="s"),
    Variant.FP: dict(color="tab:green", marker="^"),
    Variant.L: dict(color="tab:purple", marker="d"),
}


def render_curves(curves, path, title="", show_bound_params=None):
    """Plot a set of PiecewiseLinearCurve objects into one file.

    `curves` maps a label to a curve.  When `show_bound_params` is a
    (N, K, L, H) tuple, the PDA lower bound is drawn dashed on [1, N].
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for label, curve in curves.items():
        xs = [float(p.M) for p in curve.corners]
        ys = [float(p.R) for p in curve.corners]
        style = _STYLE.get(curve.variant, {})
        ax.plot(xs, ys, markersize=4, linewidth=1.4, label=label, **style)
    if show_bound_params is not None:
        N, K, L, H = show_bound_params
        ms = [1 + (N - 1) * j / 255 for j in range(256)]
        ax.plot(ms, [float(tradeoff.pda_lower_bound(m, N, K, L, H)) for m in ms],
                color="black", linestyle="--", linewidth=1.0,
                label="PDA lower bound")
    ax.set_xlabel("memory M (files)")
    ax.set_ylabel("load R (files)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def emit_parameter_set(outdir, name, params, samples=256):
    """Write the four variant CSVs and one figure for a parameter set.

    Returns the list of written paths.
    """
    N, K, L, H = params
    os.makedirs(outdir, exist_ok=True)
    written = []
    curves = {}
    for variant in (Variant.LSP, Variant.LP, Variant.FP, Variant.L):
        curve = tradeoff.variant_curve(variant, N, K, L, H)
        curves[variant.value] = curve
        path = os.path.join(outdir, f"{name}_{variant.value}.csv")
        tradeoff.write_curve_csv(path, curve, samples=samples)
        written.append(path)
    regime = tradeoff.envelope_regime(N, K)
    fig_path = os.path.join(outdir, f"{name}.png")
    render_curves(curves, fig_path,
                  title=f"(N,K,L,H)=({N},{K},{L},{H}), regime {regime}",
                  show_bound_params=params)
    written.append(fig_path)
    return written


def emit_fig2(outdir, samples=256):
    """Regenerate every parameter set of the tradeoff comparison figure."""
    written = []
    for name, params in tradeoff.FIG2_SETS:
        written.extend(emit_parameter_set(outdir, name, params, samples=samples))
    return written
