"""Figures written next to the text/TSV reports.

Agg backend only; PNGs are saved without the software-version metadata so
that reruns produce identical bytes.
"""

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .corpus import length_stats  # noqa: E402
from .io import write_bytes_atomic  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.titlesize": 11,
    "axes.labelsize": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "savefig.dpi": 100,
}

_PNG_METADATA = {"Software": None}


def _save(fig, path):
    buf = io.BytesIO()
    fig.savefig(buf, format="png", metadata=_PNG_METADATA, bbox_inches="tight")
    plt.close(fig)
    write_bytes_atomic(path, buf.getvalue())


def plot_rouge_report(report, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 3.5))
        metrics = list(report.means)
        stats = ("recall", "precision", "f1")
        width = 0.8 / len(stats)
        for k, stat in enumerate(stats):
            xs = [i + (k - 1) * width for i in range(len(metrics))]
            ys = [100 * report.means[m].get(stat) for m in metrics]
            ax.bar(xs, ys, width=width, label=stat)
        ax.set_xticks(range(len(metrics)))
        ax.set_xticklabels([m.upper() for m in metrics])
        ax.set_ylabel("score (x100)")
        ax.set_ylim(0, 100)
        ax.set_title(f"{report.config.name} preset, {report.n_examples} examples")
        ax.legend(loc="upper right", ncol=3)
        _save(fig, path)


def plot_stats(dataset, path):
    """Document and summary length histograms, one series per split."""
    if not isinstance(dataset, dict):
        dataset = {"all": list(dataset)}
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
        for name, examples in dataset.items():
            per = [length_stats(ex) for ex in examples]
            if not per:
                continue
            axes[0].hist([s["doc_tokens"] for s in per], bins=20, histtype="step", label=name)
            axes[1].hist([s["summary_tokens"] for s in per], bins=20, histtype="step", label=name)
        axes[0].set_xlabel("document tokens")
        axes[1].set_xlabel("summary tokens")
        axes[0].set_ylabel("examples")
        axes[1].legend()
        _save(fig, path)


def plot_threshold_curve(curve, chosen, path):
    finite = [p for p in curve if p.threshold != float("-inf")]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 3.5))
        if finite:
            ax.plot([p.threshold for p in finite], [100 * p.rouge2_f1 for p in finite], marker=".", lw=1)
        no_threshold = [p for p in curve if p.threshold == float("-inf")]
        if no_threshold:
            ax.axhline(100 * no_threshold[0].rouge2_f1, ls="--", color="grey", lw=1, label="no threshold")
        if chosen != float("-inf"):
            ax.axvline(chosen, color="black", lw=1, label=f"chosen {chosen:.4g}")
        ax.set_xlabel("score threshold")
        ax.set_ylabel("mean ROUGE-2 F1 (x100)")
        ax.legend()
        _save(fig, path)
