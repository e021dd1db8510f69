"""Render report figures next to the delimited output files."""

import numpy as np
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["solution_path_figure", "error_curves_figure"]


def solution_path_figure(path_result, n_signal, out_path, title=None):
    """Coefficient trajectories against log penalty.

    The first n_signal coordinates (the planted signal in the synthetic
    experiments) are drawn in color; the rest in light gray.
    """
    lambdas = path_result.lambdas()
    coefs = path_result.coefficient_matrix()
    logl = np.log(lambdas)
    fig, ax = plt.subplots(figsize=(6, 4))
    d = coefs.shape[1]
    for j in range(n_signal, d):
        ax.plot(logl, coefs[:, j], color="0.75", lw=0.6)
    for j in range(min(n_signal, d)):
        ax.plot(logl, coefs[:, j], lw=1.5)
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel(r"$\log \lambda$")
    ax.set_ylabel("coefficient estimate")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def error_curves_figure(aggregates, out_path, title=None):
    """Mean l1 and l2 errors versus network size with 1-sd error bars."""
    methods = sorted({a["method"] for a in aggregates})
    fig, axes = plt.subplots(1, 2, figsize=(9, 4), sharex=True)
    for norm, ax in zip(("l1", "l2"), axes):
        for method in methods:
            pts = sorted(
                (a["n"], a[f"mean_{norm}"], a[f"sd_{norm}"])
                for a in aggregates
                if a["method"] == method
            )
            ns = [p[0] for p in pts]
            means = [p[1] for p in pts]
            sds = [p[2] for p in pts]
            ax.errorbar(ns, means, yerr=sds, marker="o", capsize=3, label=method)
        ax.set_xlabel("network size")
        ax.set_ylabel(f"mean {norm} error")
        ax.legend()
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
