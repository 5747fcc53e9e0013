"""SVG figure rendering for experiment results.

Figures are pure functions of result data: the Agg backend, a fixed hash
salt, and stripped date metadata make re-rendering byte-identical, so plots
can be regenerated from saved result files at any time.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

from .cantor_geometry import ScaleSequence, squares_of_generation

_SALT = {"svg.hashsalt": "cornerwalk"}


def _save(fig, path):
    with plt.rc_context(_SALT):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return str(path)


def plot_set(seq: ScaleSequence, depth: int, path) -> str:
    """The generation-``depth`` squares of the construction."""
    fig, ax = plt.subplots(figsize=(5, 5))
    cx, cy, side = squares_of_generation(seq, depth)
    for x, y in zip(cx, cy):
        ax.add_patch(
            Rectangle((x - side / 2, y - side / 2), side, side, facecolor="#30507a")
        )
    ax.add_patch(
        Rectangle((0, 0), 1, 1, fill=False, edgecolor="#999999", linewidth=0.7)
    )
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.05, 1.05)
    ax.set_aspect("equal")
    ax.set_title(f"generation {depth}, ratios {tuple(round(v, 4) for v in seq.values)}")
    return _save(fig, path)


def plot_dims(report: dict, dim_value: float, path) -> str:
    """Entropy-ratio sequence against the limit-set dimension."""
    gens = report["generations"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(gens, report["ratios"], "o-", label="corrected ratio d_n")
    ax.plot(gens, report["ratios_plugin"], "s--", alpha=0.6, label="plug-in ratio")
    ax.axhline(dim_value, color="#aa3333", linewidth=1, label="set dimension")
    est = report["estimate"]
    unc = report["uncertainty"]
    ax.errorbar([gens[-1]], [est], yerr=[unc], fmt="none", capsize=4, color="black")
    ax.set_xlabel("generation n")
    ax.set_ylabel("entropy / -log sidelength")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_continuity(rows: list, control: dict, path) -> str:
    """Dimension shift against perturbation size, with the zero control band."""
    deltas = [r["delta"] for r in rows]
    diffs = [r["diff"] for r in rows]
    sigmas = [r["combined_sigma"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(deltas, diffs, yerr=[2 * s for s in sigmas], fmt="o-", capsize=4)
    band = 2 * control["combined_sigma"]
    ax.axhspan(0, band, color="#cccccc", alpha=0.5, label="control 2 sigma")
    ax.set_xscale("log")
    if all(d > 0 for d in diffs):
        ax.set_yscale("log")
    ax.set_xlabel("perturbation delta")
    ax.set_ylabel("|dimension shift|")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_decay(ks, values, lower, upper, fit, path, ylabel) -> str:
    """Deviation against offset generation with its exponential fit."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if lower is not None:
        yerr = [
            [max(v - lo, 0.0) for v, lo in zip(values, lower)],
            [max(hi - v, 0.0) for v, hi in zip(values, upper)],
        ]
        ax.errorbar(ks, values, yerr=yerr, fmt="o", capsize=4)
    else:
        ax.plot(ks, values, "o")
    if fit is not None and all(v > 0 for v in values):
        slope, intercept = fit
        xs = [ks[0], ks[-1]]
        ax.plot(xs, [math.exp(intercept + slope * x) for x in xs], "--", color="#aa3333",
                label=f"q = {math.exp(slope):.3f}")
        ax.legend()
    ax.set_yscale("log" if all(v > 0 for v in values) else "linear")
    ax.set_xticks(list(ks))
    ax.set_xlabel("offset generation k")
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    return _save(fig, path)


def plot_oracle_cells(words, p_wos, p_oracle, err_wos, err_oracle, path) -> str:
    """Cell-by-cell comparison of the two samplers."""
    xs = range(len(words))
    fig, ax = plt.subplots(figsize=(max(6, len(words) * 0.45), 4))
    ax.errorbar(
        [x - 0.12 for x in xs], p_wos, yerr=err_wos, fmt="o", capsize=3, label="sphere walk"
    )
    ax.errorbar(
        [x + 0.12 for x in xs], p_oracle, yerr=err_oracle, fmt="s", capsize=3,
        label="lattice oracle",
    )
    ax.set_xticks(list(xs))
    ax.set_xticklabels(words, rotation=90 if len(words) > 8 else 0)
    ax.set_xlabel("cylinder")
    ax.set_ylabel("probability")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)
