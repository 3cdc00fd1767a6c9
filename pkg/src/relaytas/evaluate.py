"""Scheme scoring on held-out data: average secrecy rate, secrecy outage
probability, oracle-label accuracy, and the misclassification matrix.

A scheme's predictions can be supplied as a precomputed 1-based label
array or as a callable applied to each record's normalized feature vector.
All aggregation runs in a fixed order so reports reproduce bitwise.

Results files are CSV with a header row, preceded by '#' provenance
comment lines (seed, dataset path, model path).
"""

from dataclasses import dataclass

import numpy as np

from .dataset import normalized_features
from .errors import ConfigError, ToolkitError
from .secrecy import combo_rates, secrecy_rate

SCHEMES = ("oracle", "dnn", "knn", "maxh")


@dataclass(frozen=True, eq=False)
class EvalReport:
    scheme: str
    snr_db: float
    avg_secrecy_rate: float
    sop: float
    accuracy: float
    confusion: np.ndarray  # (n_combos, n_combos), rows: oracle label, row-normalized


def scheme_rate(cfg, sample, label, table):
    """Secrecy rate achieved when the scheme picks combination `label`."""
    if not 1 <= label <= table.size:
        raise ValueError(f"label {label} outside 1..{table.size}")
    rates = combo_rates(cfg, np.abs(sample.h) ** 2, np.abs(sample.g) ** 2, table)
    return float(rates[label - 1])


def scheme_rates_batch(cfg, ds, labels, table):
    """Per-record rates for an array of predicted labels."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (ds.count,):
        raise ValueError(f"need {ds.count} labels, got shape {labels.shape}")
    if labels.size and (labels.min() < 1 or labels.max() > table.size):
        raise ValueError(f"labels outside 1..{table.size}")
    h_sq = ds.features[:, :-1] ** 2
    h_norm_sq = (h_sq * table.mask[labels - 1]).sum(axis=1)
    return secrecy_rate(cfg, h_norm_sq, ds.features[:, -1] ** 2).r_s


def sop_estimate(rates, r_t):
    """Fraction of records whose secrecy rate falls strictly below r_t."""
    rates = np.asarray(rates, dtype=float)
    if rates.size == 0:
        raise ValueError("empty rate sequence")
    return float(np.mean(rates < r_t))


def _run_predictor(predictor, t_matrix):
    if isinstance(predictor, np.ndarray):
        return predictor.astype(np.int64)
    labels = np.empty(t_matrix.shape[0], dtype=np.int64)
    for i, row in enumerate(t_matrix):
        try:
            labels[i] = int(predictor(row))
        except Exception as exc:
            raise ToolkitError(f"predictor failed at record {i}: {exc}") from exc
    return labels


def evaluate_scheme(cfg, ds, predictor, table, r_t=2.0, scheme="scheme", snr_db=None):
    """Score one scheme on a test set.

    `predictor` is either an (count,) array of 1-based labels or a callable
    mapping one normalized feature vector to a label.  Accuracy and the
    confusion matrix are against the dataset's oracle labels.
    """
    t = normalized_features(ds)
    predicted = _run_predictor(predictor, t)
    rates = scheme_rates_batch(cfg, ds, predicted, table)
    oracle = ds.labels
    size = table.size
    counts = np.zeros((size, size))
    np.add.at(counts, (oracle - 1, predicted - 1), 1.0)
    row_totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        confusion = np.where(row_totals > 0, counts / row_totals, 0.0)
    if snr_db is None:
        snr_db = 10.0 * np.log10(cfg.p_s) if cfg.p_s > 0 else float("-inf")
    return EvalReport(
        scheme=scheme,
        snr_db=float(snr_db),
        avg_secrecy_rate=float(rates.mean()),
        sop=sop_estimate(rates, r_t),
        accuracy=float(np.mean(predicted == oracle)),
        confusion=confusion,
    )


def maxh_labels(cfg, ds, table):
    """Reference heuristic (not from the modeled selection problem): pick
    the n_t antennas with the largest magnitudes, ignoring the coupling
    through the relay hop."""
    h = ds.features[:, :-1]
    # stable descending sort so equal magnitudes favor lower antenna indices
    top = np.argsort(-h, axis=1, kind="stable")[:, : cfg.n_t]
    top.sort(axis=1)
    lookup = {combo: i + 1 for i, combo in enumerate(table.combos)}
    return np.asarray(
        [lookup[tuple(int(a) + 1 for a in row)] for row in top], dtype=np.int64
    )


def snr_sweep(schemes, grid_db, artifacts, r_t=2.0):
    """Evaluate `schemes` at every grid point, ordered by ascending SNR.

    `artifacts` maps the dB value to {"cfg": SystemConfig, "dataset":
    Dataset, "predictors": {scheme: predictor}}.  A missing point or
    scheme is a configuration error naming the point.
    """
    reports = []
    for snr_db in sorted(grid_db):
        point = artifacts.get(snr_db)
        if point is None:
            raise ConfigError(f"no artifacts for grid point {snr_db:g} dB")
        for key in ("cfg", "dataset", "table", "predictors"):
            if key not in point:
                raise ConfigError(f"grid point {snr_db:g} dB missing {key!r}")
        for scheme in schemes:
            if scheme not in point["predictors"]:
                raise ConfigError(
                    f"no {scheme!r} predictor at grid point {snr_db:g} dB"
                )
            reports.append(
                evaluate_scheme(
                    point["cfg"],
                    point["dataset"],
                    point["predictors"][scheme],
                    point["table"],
                    r_t=r_t,
                    scheme=scheme,
                    snr_db=snr_db,
                )
            )
    return reports


def misclassification_web(report):
    """Off-diagonal confusion entries as {(oracle l, predicted l_hat): rate}."""
    size = report.confusion.shape[0]
    return {
        (l, lh): float(report.confusion[l - 1, lh - 1])
        for l in range(1, size + 1)
        for lh in range(1, size + 1)
        if l != lh
    }


def _write_provenance(fh, provenance):
    for key, value in provenance.items():
        fh.write(f"# {key} {value}\n")


def write_results_csv(reports, path, provenance=None):
    with open(path, "w", encoding="utf-8") as fh:
        _write_provenance(fh, provenance or {})
        fh.write("scheme,snr_db,avg_rate,sop,accuracy\n")
        for r in reports:
            fh.write(
                f"{r.scheme},{r.snr_db:.17g},{r.avg_secrecy_rate:.17g},"
                f"{r.sop:.17g},{r.accuracy:.17g}\n"
            )


def write_confusion_csv(reports, path, provenance=None):
    with open(path, "w", encoding="utf-8") as fh:
        _write_provenance(fh, provenance or {})
        fh.write("scheme,snr_db,true_label,pred_label,rate\n")
        for r in reports:
            size = r.confusion.shape[0]
            for l in range(size):
                for lh in range(size):
                    fh.write(
                        f"{r.scheme},{r.snr_db:.17g},{l + 1},{lh + 1},"
                        f"{r.confusion[l, lh]:.17g}\n"
                    )


def write_web_csv(reports, path, provenance=None):
    with open(path, "w", encoding="utf-8") as fh:
        _write_provenance(fh, provenance or {})
        fh.write("scheme,snr_db,true_label,pred_label,rate\n")
        for r in reports:
            for (l, lh), rate in sorted(misclassification_web(r).items()):
                fh.write(f"{r.scheme},{r.snr_db:.17g},{l},{lh},{rate:.17g}\n")
