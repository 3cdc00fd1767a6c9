"""Figure rendering for the report path.

Renders the delimited results to PNG next to the CSVs: secrecy rate and
SOP versus SNR (one line per scheme) and the misclassification web as a
radar chart.  The CSVs stay the canonical output; figures are a viewing
convenience and can be skipped with --no-figures.
"""

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_STYLE = {
    "oracle": dict(color="k", marker="s", linestyle="-"),
    "dnn": dict(color="tab:red", marker="o", linestyle="--"),
    "knn": dict(color="tab:blue", marker="^", linestyle="-."),
    "maxh": dict(color="tab:gray", marker="x", linestyle=":"),
}

_SAVE = dict(dpi=150, metadata={"Software": None})  # no volatile metadata


def _style(scheme):
    return _STYLE.get(scheme, dict(marker="."))


def read_results_csv(path):
    """Rows of the results CSV as dicts, '#' comments skipped."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        body = (line for line in fh if not line.startswith("#"))
        for row in csv.DictReader(body):
            rows.append(row)
    return rows


def plot_rate_vs_snr(rows, path):
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for scheme in dict.fromkeys(r["scheme"] for r in rows):
        pts = sorted(
            (float(r["snr_db"]), float(r["avg_rate"]))
            for r in rows
            if r["scheme"] == scheme
        )
        ax.plot(*zip(*pts), label=scheme, **_style(scheme))
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("average secrecy rate (bits/s/Hz)")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def plot_sop_vs_snr(rows, path):
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for scheme in dict.fromkeys(r["scheme"] for r in rows):
        pts = sorted(
            (float(r["snr_db"]), float(r["sop"]))
            for r in rows
            if r["scheme"] == scheme
        )
        snr = np.array([p[0] for p in pts])
        sop = np.array([p[1] for p in pts])
        sop = np.where(sop > 0, sop, np.nan)  # log axis cannot show exact zeros
        ax.plot(snr, sop, label=scheme, **_style(scheme))
    ax.set_yscale("log")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("secrecy outage probability")
    ax.grid(True, which="both", alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def plot_web(web_rows, path, snr_db=None):
    """Radar chart of per-pair misclassification rates, one polygon per
    scheme.  `web_rows` are dicts with scheme, true_label, pred_label, rate."""
    pairs = sorted(
        {(int(r["true_label"]), int(r["pred_label"])) for r in web_rows}
    )
    if not pairs:
        raise ValueError("no misclassification pairs to plot")
    angles = np.linspace(0.0, 2.0 * np.pi, len(pairs), endpoint=False)
    fig, ax = plt.subplots(figsize=(6.5, 6.5), subplot_kw=dict(projection="polar"))
    for scheme in dict.fromkeys(r["scheme"] for r in web_rows):
        lookup = {
            (int(r["true_label"]), int(r["pred_label"])): float(r["rate"])
            for r in web_rows
            if r["scheme"] == scheme
        }
        values = np.array([lookup.get(p, 0.0) for p in pairs])
        closed = np.concatenate([values, values[:1]])
        ax.plot(
            np.concatenate([angles, angles[:1]]),
            closed,
            label=scheme,
            **{k: v for k, v in _style(scheme).items() if k != "marker"},
        )
    ax.set_xticks(angles)
    ax.set_xticklabels(
        [f"{l}→{lh}" for l, lh in pairs], fontsize=7
    )
    title = "misclassification rate per label pair"
    if snr_db is not None:
        title += f" at {snr_db:g} dB"
    ax.set_title(title)
    ax.legend(loc="upper right", bbox_to_anchor=(1.25, 1.1))
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
