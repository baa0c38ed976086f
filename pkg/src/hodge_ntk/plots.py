"""Figure rendering for the experiment report path.

Each function takes the result rows an experiment command writes to CSV
and returns a matplotlib Figure; the CSV stays the canonical output and
figures are rendered alongside it.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

VARIANT_ORDER = ("graph", "lower", "upper", "full")
VARIANT_COLORS = {
    "graph": "tab:gray",
    "lower": "tab:blue",
    "upper": "tab:orange",
    "full": "tab:green",
}

LABEL_COLORS = {"exact": "tab:blue", "harmonic": "tab:red", "coexact": "tab:green"}


def _variants_in(rows):
    present = {r["variant"] for r in rows}
    return [v for v in VARIANT_ORDER if v in present] + sorted(present - set(VARIANT_ORDER))


def save_figure(fig, path) -> None:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_triangle_count(rows: list[dict]):
    rmse = [r for r in rows if r["metric"] == "test_rmse"]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for variant in _variants_in(rmse):
        pts = sorted((r["q"], r["value"], r["stderr"]) for r in rmse if r["variant"] == variant)
        q, val, se = zip(*pts)
        label = "graph = lower" if variant == "lower" else variant
        if variant == "graph":
            continue  # identical to lower at edge level; one curve
        ax.errorbar(q, val, yerr=se, marker="o", capsize=3,
                    color=VARIANT_COLORS.get(variant), label=label)
    ax.set_xlabel("triangle density q")
    ax.set_ylabel("test RMSE")
    ax.set_title("Triangle-count prediction")
    ax.grid(alpha=0.3)
    ax.legend()
    return fig


def plot_hodge_recovery(rows: list[dict]):
    components = ("exact", "harmonic", "coexact")
    variants = _variants_in(rows)
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.8 / max(len(variants), 1)
    x = np.arange(len(components))
    for vi, variant in enumerate(variants):
        vals, errs = [], []
        for comp in components:
            match = [r for r in rows if r["variant"] == variant and r["component"] == comp]
            vals.append(match[0]["value"] if match else np.nan)
            errs.append(match[0]["stderr"] if match else 0.0)
        ax.bar(x + vi * width, vals, width, yerr=errs, capsize=3,
               color=VARIANT_COLORS.get(variant), label=variant)
    ax.set_xticks(x + width * (len(variants) - 1) / 2)
    ax.set_xticklabels(components)
    ax.set_ylabel("relative RMSE")
    ax.set_title("Hodge component recovery")
    ax.legend()
    return fig


def plot_spectral(mode_rows: list[dict]):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for label in ("exact", "harmonic", "coexact"):
        pts = [(r["index"], r["eigenvalue"]) for r in mode_rows if r["label"] == label]
        if pts:
            idx, eig = zip(*pts)
            ax1.scatter(idx, eig, s=14, color=LABEL_COLORS[label], label=label)
    ax1.set_yscale("symlog", linthresh=1e-12)
    ax1.set_xlabel("mode index (descending eigenvalue)")
    ax1.set_ylabel("eigenvalue")
    ax1.set_title("Hodge labels across the spectrum")
    ax1.legend()
    residuals = [r["decay_residual"] for r in mode_rows]
    ax2.hist(residuals, bins=30, color="tab:purple")
    ax2.set_xlabel("max |measured - predicted| decay residual")
    ax2.set_ylabel("modes")
    ax2.set_title("Gradient-flow decay check")
    fig.tight_layout()
    return fig


def plot_stability(record_rows: list[dict]):
    fig, (ax1, ax2, ax3) = plt.subplots(1, 3, figsize=(13, 4))
    eps_values = sorted({r["eps"] for r in record_rows})
    lambdas = sorted({r["lam"] for r in record_rows})
    one_lambda = [r for r in record_rows if r["lam"] == lambdas[0]]
    ax1.scatter([r["delta_L"] for r in one_lambda],
                [r["abs_delta_K"] for r in one_lambda], s=14, color="tab:blue")
    ax1.set_xlabel(r"$\|\Delta L_{up}\|_F$")
    ax1.set_ylabel(r"$\|\Delta K\|_F$")
    ax1.set_title("Kernel vs upper-Laplacian change")
    ax1.grid(alpha=0.3)
    for lam in lambdas:
        means = []
        for eps in eps_values:
            cell = [r["delta_y"] for r in record_rows if r["lam"] == lam and r["eps"] == eps]
            means.append(np.mean(cell))
        ax2.plot(eps_values, means, marker="o", label=f"lambda={lam:g}")
    ax2.set_xlabel("flip probability eps")
    ax2.set_ylabel("relative prediction change")
    ax2.set_title("Prediction stability vs eps")
    ax2.legend(fontsize=8)
    ax2.grid(alpha=0.3)
    nz = [r for r in record_rows if r["delta_L"] > 0]
    ax3.scatter([r["delta_L"] / r["lam"] for r in nz],
                [r["delta_y"] for r in nz], s=10, color="tab:green")
    ax3.set_xscale("log")
    ax3.set_xlabel(r"$\|\Delta L_{up}\|_F / \lambda$")
    ax3.set_ylabel("relative prediction change")
    ax3.set_title("1/lambda scaling collapse")
    ax3.grid(alpha=0.3)
    fig.tight_layout()
    return fig


def plot_closure(rows: list[dict]):
    summary = [r for r in rows if r.get("run") == "mean"]
    variants = _variants_in(summary)
    fig, ax = plt.subplots(figsize=(6, 4))
    x = np.arange(len(variants))
    for mi, metric in enumerate(("ap", "f1")):
        vals = [next(r["value"] for r in summary
                     if r["variant"] == v and r["metric"] == metric) for v in variants]
        errs = [next(r["stderr"] for r in summary
                     if r["variant"] == v and r["metric"] == metric) for v in variants]
        ax.bar(x + mi * 0.35, vals, 0.35, yerr=errs, capsize=3,
               label=metric.upper())
    ax.set_xticks(x + 0.175)
    ax.set_xticklabels(variants)
    ax.set_ylabel("score")
    ax.set_title("Triad-closure prediction")
    ax.axhline(0.5, color="gray", linestyle=":", linewidth=1)
    ax.legend()
    return fig


def plot_separation(rows: list[dict]):
    fig, ax = plt.subplots(figsize=(6, 4))
    random_rows = [r for r in rows if r["kind"] == "random"]
    ax.scatter([r["pair"] for r in random_rows],
               [r["rel_frob_full"] for r in random_rows],
               s=16, label="ReLU full", color="tab:green")
    ax.scatter([r["pair"] for r in random_rows],
               [r["rel_frob_linear"] for r in random_rows],
               s=16, label="linear full", color="tab:blue", marker="x")
    ax.axhline(1e-6, color="red", linestyle="--", linewidth=1, label="separation floor")
    ax.set_yscale("log")
    ax.set_xlabel("pair")
    ax.set_ylabel("relative Frobenius kernel difference")
    ax.set_title("Filled-simplex sensitivity")
    ax.legend()
    return fig


def plot_finite_width(rows: list[dict]):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for key in sorted({(r["activation"], r["depth"]) for r in rows}):
        pts = sorted((r["width"], r["rel_error"]) for r in rows
                     if (r["activation"], r["depth"]) == key)
        w, err = zip(*pts)
        ax.plot(w, err, marker="o", label=f"{key[0]} depth {key[1]}")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("width")
    ax.set_ylabel("relative Frobenius error")
    ax.set_title("Finite-width kernel convergence")
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    return fig
