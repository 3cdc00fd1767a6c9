"""Command-line pipeline: gen -> train -> eval -> web, plus figure
re-rendering and a wall-clock bench.

Flag defaults reproduce the reference operating point (6 antennas, pick 1,
200k records, batch 128, learning rate 0.01, hidden width 1500, target
rate 2 bits/s/Hz).  A flat key=value config file can pre-set any flag;
explicit flags win over the file, which wins over --preset, which wins
over built-in defaults.  The RELAYTAS_OUT environment variable sets the
default output directory.

Every subcommand is deterministic given its full flag set: identical
invocations write byte-identical datasets, models, and report CSVs
(bench timings excepted).

Exit codes: 0 success, 2 configuration error, 3 file I/O or format error,
4 training divergence.
"""

import argparse
import os
import sys
import time
from dataclasses import asdict
from math import comb
from pathlib import Path

import numpy as np

from . import dataset as ds_mod
from . import evaluate as ev
from . import knn as knn_mod
from . import mlp as mlp_mod
from . import plots
from .channel import SystemConfig
from .errors import (
    ConfigError,
    DataFormatError,
    ModelFormatError,
    ToolkitError,
    TrainingDivergedError,
)
from .secrecy import enumerate_combos, oracle_select_batch

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DIVERGED = 4

_ENV_OUT = "RELAYTAS_OUT"


def _grid(text):
    try:
        values = tuple(sorted({float(v) for v in str(text).split(",") if v != ""}))
    except ValueError as exc:
        raise ConfigError(f"bad SNR grid {text!r}: {exc}") from exc
    if not values:
        raise ConfigError("empty SNR grid")
    return values


def _int_list(text):
    try:
        values = tuple(int(v) for v in str(text).split(",") if v != "")
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}: {exc}") from exc
    if not values or min(values) < 1:
        raise ConfigError(f"need positive integers, got {text!r}")
    return values


def _schemes(text):
    values = tuple(v.strip() for v in str(text).split(",") if v.strip())
    for v in values:
        if v not in ev.SCHEMES:
            raise ConfigError(f"unknown scheme {v!r}, choose from {ev.SCHEMES}")
    if not values:
        raise ConfigError("empty scheme list")
    return values


def _bool(text):
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"bad boolean {text!r}")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise ConfigError(f"need a positive integer, got {text}")
    return value


# name -> (converter, default, flag kind, help); kind "flag" means boolean
_COMMON = {
    "out": (str, None, "value", "output directory (default: $RELAYTAS_OUT or ./out)"),
    "config": (str, None, "value", "flat key=value config file; flags override it"),
}

_SCHEMAS = {
    "gen": {
        **_COMMON,
        "preset": (str, None, "value", "desk (50k/20k records) or paper"),
        "ns": (_positive_int, 6, "value", "total source antennas"),
        "nt": (_positive_int, 1, "value", "antennas selected per transmission"),
        "snr": (_grid, (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0), "value",
                "comma-separated SNR grid in dB (equal node powers)"),
        "count": (_positive_int, 200000, "value", "training records per grid point"),
        "test-count": (_positive_int, 200000, "value", "testing records per grid point"),
        "seed": (int, 1, "value", "base seed; per-file seeds derive from it"),
    },
    "train": {
        **_COMMON,
        "preset": (str, None, "value", "desk (hidden 256) or paper"),
        "snr": (_grid, (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0), "value",
                "grid points whose training sets to fit"),
        "hidden": (_int_list, (1500,), "value", "hidden layer widths, comma separated"),
        "epochs": (_positive_int, 30, "value", "training epochs"),
        "batch-size": (_positive_int, 128, "value", "mini-batch size"),
        "lr": (float, 0.01, "value", "RMSProp learning rate"),
        "decay": (float, 0.9, "value", "RMSProp accumulator decay"),
        "eps": (float, 1e-8, "value", "RMSProp epsilon"),
        "seed": (int, 1, "value", "init and shuffle seed"),
        "mixed": (_bool, False, "flag", "train one model on all grid points pooled"),
    },
    "eval": {
        **_COMMON,
        "preset": (str, None, "value", "desk or paper (k-NN defaults unchanged)"),
        "snr": (_grid, (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0), "value",
                "grid points to score"),
        "schemes": (_schemes, ("oracle", "dnn", "knn", "maxh"), "value",
                    "subset of oracle,dnn,knn,maxh"),
        "rt": (float, 2.0, "value", "target secrecy rate for the outage count"),
        "knn-k": (_positive_int, 5, "value", "k-NN neighbor count"),
        "mixed": (_bool, False, "flag", "score the pooled model at every point"),
        "no-figures": (_bool, False, "flag", "skip PNG rendering"),
    },
    "web": {
        **_COMMON,
        "snr": (float, 15.0, "value", "grid point whose confusion to flatten"),
        "schemes": (_schemes, ("oracle", "dnn", "knn", "maxh"), "value",
                    "schemes to include when present"),
        "no-figures": (_bool, False, "flag", "skip PNG rendering"),
    },
    "plot": {
        **_COMMON,
    },
    "bench": {
        **_COMMON,
        "snr": (float, 15.0, "value", "grid point to time"),
        "schemes": (_schemes, ("oracle", "dnn", "knn", "maxh"), "value",
                    "schemes to time"),
        "knn-k": (_positive_int, 5, "value", "k-NN neighbor count"),
    },
}

_PRESETS = {
    "desk": {"count": 50000, "test_count": 20000, "hidden": (256,), "epochs": 30},
    "paper": {},
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="relaytas",
        description="secrecy-rate simulation and learned antenna selection",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    docs = {
        "gen": "generate labeled train/test datasets per SNR grid point",
        "train": "fit one network per grid point from its training set",
        "eval": "score schemes on the test sets; write CSVs and figures",
        "web": "flatten one grid point's confusion into per-pair rates",
        "plot": "re-render figures from existing CSVs",
        "bench": "wall-clock per-record selection timings (not deterministic)",
    }
    for command, schema in _SCHEMAS.items():
        p = sub.add_parser(command, help=docs[command])
        for name, (conv, default, kind, help_text) in schema.items():
            flag = "--" + name
            shown = default
            if isinstance(default, tuple):
                shown = ",".join(f"{v:g}" if isinstance(v, float) else str(v) for v in default)
            if kind == "flag":
                p.add_argument(flag, dest=name.replace("-", "_"),
                               action="store_const", const=True, default=None,
                               help=f"{help_text} (default: {shown})")
            else:
                p.add_argument(flag, dest=name.replace("-", "_"),
                               type=str, default=None, metavar=name.upper(),
                               help=f"{help_text} (default: {shown})")
    return parser


def _load_config_file(path):
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" in line:
                    key, _, value = line.partition("=")
                else:
                    parts = line.split(None, 1)
                    if len(parts) != 2:
                        raise ConfigError(f"{path}:{lineno}: bad line {raw.strip()!r}")
                    key, value = parts
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return values


def _resolve(args, command):
    """Merge flag > config file > preset > default into a plain namespace."""
    schema = _SCHEMAS[command]
    file_values = {}
    if getattr(args, "config", None):
        file_values = _load_config_file(args.config)
        known = {name.replace("-", "_") for name in schema}
        for key in file_values:
            if key not in known:
                raise ConfigError(
                    f"config key {key!r} unknown to subcommand {command!r}"
                )
    preset_name = getattr(args, "preset", None) or file_values.get("preset")
    preset = {}
    if preset_name is not None:
        if preset_name not in _PRESETS:
            raise ConfigError(f"unknown preset {preset_name!r}")
        preset = _PRESETS[preset_name]

    resolved = argparse.Namespace()
    for name, (conv, default, kind, _) in schema.items():
        dest = name.replace("-", "_")
        value = getattr(args, dest, None)
        if value is not None:
            value = conv(value) if kind == "value" else True
        elif dest in file_values:
            value = conv(file_values[dest])
        elif dest in preset:
            value = preset[dest]
        else:
            value = default
        setattr(resolved, dest, value)
    if resolved.out is None:
        resolved.out = os.environ.get(_ENV_OUT, "out")
    return resolved


def _fmt_snr(snr):
    return f"{snr:g}"


def _paths(out, snr):
    tag = _fmt_snr(snr)
    out = Path(out)
    return {
        "train": out / f"train_{tag}dB.csv",
        "test": out / f"test_{tag}dB.csv",
        "model": out / f"mlp_{tag}dB.bin",
        "trainlog": out / f"trainlog_{tag}dB.csv",
        "web_png": out / f"web_{tag}dB.png",
    }


def _require(path, what, snr):
    if not Path(path).exists():
        raise ConfigError(f"missing {what} for grid point {_fmt_snr(snr)} dB: {path}")
    return path


def cmd_gen(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    table = enumerate_combos(cfg.ns, cfg.nt)
    for i, snr in enumerate(cfg.snr):
        sys_cfg = SystemConfig.equal_power(cfg.ns, cfg.nt, snr)
        paths = _paths(out, snr)
        train = ds_mod.build_dataset(sys_cfg, cfg.count, cfg.seed + 2 * i, table)
        ds_mod.write_dataset(train, paths["train"])
        test = ds_mod.build_dataset(sys_cfg, cfg.test_count, cfg.seed + 2 * i + 1, table)
        ds_mod.write_dataset(test, paths["test"])
        print(
            f"gen {_fmt_snr(snr)} dB: {paths['train']} ({train.count} records), "
            f"{paths['test']} ({test.count} records)"
        )
    return EXIT_OK


def _write_trainlog(path, history, provenance):
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in provenance.items():
            fh.write(f"# {key} {value}\n")
        fh.write("epoch,loss\n")
        for epoch, value in history:
            fh.write(f"{epoch},{value:.17g}\n")


def _train_one(features, labels, dims, tc, model_path, log_path, dataset_note):
    model, history = mlp_mod.train(features, labels, dims, tc)
    meta = {
        "layer_dims": list(dims),
        "train_config": asdict(tc),
        "dataset": dataset_note,
    }
    mlp_mod.save_model(model, model_path, meta=meta)
    _write_trainlog(log_path, history,
                    {"dataset": dataset_note, "seed": tc.seed,
                     "layer_dims": ",".join(map(str, dims))})
    final = history[-1][1] if history else float("nan")
    print(f"train: {model_path} dims={list(dims)} final epoch loss {final:.6f}")


def cmd_train(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    tc = mlp_mod.TrainConfig(
        learning_rate=cfg.lr, batch_size=cfg.batch_size, epochs=cfg.epochs,
        rmsprop_decay=cfg.decay, rmsprop_epsilon=cfg.eps, seed=cfg.seed,
    )
    pooled_feats, pooled_labels, pooled_note = [], [], []
    dims = None
    for snr in cfg.snr:
        paths = _paths(out, snr)
        train_path = _require(paths["train"], "training dataset", snr)
        ds = ds_mod.read_dataset(train_path)
        point_dims = (ds.n_s + 1, *cfg.hidden, comb(ds.n_s, ds.n_t))
        if dims is None:
            dims = point_dims
        elif dims != point_dims:
            raise ConfigError(
                f"grid point {_fmt_snr(snr)} dB implies dims {point_dims}, "
                f"other points implied {dims}"
            )
        features = ds_mod.normalized_features(ds)
        if cfg.mixed:
            pooled_feats.append(features)
            pooled_labels.append(ds.labels)
            pooled_note.append(str(train_path))
        else:
            _train_one(features, ds.labels, point_dims, tc,
                       paths["model"], paths["trainlog"], str(train_path))
    if cfg.mixed:
        _train_one(
            np.concatenate(pooled_feats), np.concatenate(pooled_labels), dims, tc,
            out / "mlp_mixed.bin", out / "trainlog_mixed.csv",
            ";".join(pooled_note),
        )
    return EXIT_OK


def cmd_eval(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    artifacts = {}
    dataset_notes, model_notes, seed_notes = [], [], []
    for snr in cfg.snr:
        paths = _paths(out, snr)
        test_path = _require(paths["test"], "test dataset", snr)
        test = ds_mod.read_dataset(test_path)
        sys_cfg = test.config
        table = enumerate_combos(test.n_s, test.n_t)
        t_matrix = ds_mod.normalized_features(test)
        predictors = {}
        for scheme in cfg.schemes:
            if scheme == "oracle":
                predictors[scheme] = test.labels
            elif scheme == "maxh":
                predictors[scheme] = ev.maxh_labels(sys_cfg, test, table)
            elif scheme == "knn":
                train_path = _require(paths["train"], "k-NN training dataset", snr)
                train = ds_mod.read_dataset(train_path)
                model = knn_mod.knn_fit(
                    ds_mod.normalized_features(train), train.labels, k=cfg.knn_k
                )
                predictors[scheme] = knn_mod.knn_predict_batch(model, t_matrix)
            elif scheme == "dnn":
                model_path = (out / "mlp_mixed.bin") if cfg.mixed else paths["model"]
                _require(model_path, "trained model", snr)
                model, _ = mlp_mod.load_model(model_path)
                mlp_mod.check_model_dims(model, test.n_s + 1, table.size)
                predictors[scheme] = mlp_mod.predict_batch(model, t_matrix)
                model_notes.append(str(model_path))
        artifacts[snr] = {
            "cfg": sys_cfg, "dataset": test, "table": table, "predictors": predictors,
        }
        dataset_notes.append(str(test_path))
        seed_notes.append(str(test.seed))
    reports = ev.snr_sweep(cfg.schemes, cfg.snr, artifacts, r_t=cfg.rt)
    provenance = {
        "schemes": ",".join(cfg.schemes),
        "r_t": f"{cfg.rt:g}",
        "datasets": ";".join(dataset_notes),
        "models": ";".join(model_notes) if model_notes else "none",
        "dataset_seeds": ";".join(seed_notes),
    }
    results_path = out / "results.csv"
    ev.write_results_csv(reports, results_path, provenance)
    ev.write_confusion_csv(reports, out / "confusion.csv", provenance)
    print(f"eval: wrote {results_path} and {out / 'confusion.csv'}")
    for r in reports:
        print(
            f"  {r.scheme:>6} @ {_fmt_snr(r.snr_db):>4} dB: "
            f"rate {r.avg_secrecy_rate:.4f}  sop {r.sop:.4f}  acc {r.accuracy:.4f}"
        )
    if not cfg.no_figures:
        rows = plots.read_results_csv(results_path)
        plots.plot_rate_vs_snr(rows, out / "rate_vs_snr.png")
        plots.plot_sop_vs_snr(rows, out / "sop_vs_snr.png")
        print(f"eval: wrote {out / 'rate_vs_snr.png'} and {out / 'sop_vs_snr.png'}")
    return EXIT_OK


def _read_csv_rows(path, what):
    if not Path(path).exists():
        raise ConfigError(f"missing {what}: {path} (run `relaytas eval` first)")
    return plots.read_results_csv(path)


def cmd_web(cfg):
    out = Path(cfg.out)
    rows = _read_csv_rows(out / "confusion.csv", "confusion input")
    keep = []
    for row in rows:
        if row["scheme"] not in cfg.schemes:
            continue
        if abs(float(row["snr_db"]) - cfg.snr) > 1e-9:
            continue
        if row["true_label"] != row["pred_label"]:
            keep.append(row)
    if not keep:
        raise ConfigError(
            f"confusion input has no rows at {_fmt_snr(cfg.snr)} dB "
            f"for schemes {','.join(cfg.schemes)}"
        )
    web_path = out / "web.csv"
    with open(web_path, "w", encoding="utf-8") as fh:
        fh.write(f"# source {out / 'confusion.csv'}\n")
        fh.write(f"# snr_db {_fmt_snr(cfg.snr)}\n")
        fh.write("scheme,snr_db,true_label,pred_label,rate\n")
        for row in keep:
            fh.write(
                f"{row['scheme']},{row['snr_db']},{row['true_label']},"
                f"{row['pred_label']},{row['rate']}\n"
            )
    per_scheme = len({(r['true_label'], r['pred_label']) for r in keep})
    print(f"web: wrote {web_path} ({per_scheme} pairs per scheme)")
    if not cfg.no_figures:
        png = _paths(out, cfg.snr)["web_png"]
        plots.plot_web(keep, png, snr_db=cfg.snr)
        print(f"web: wrote {png}")
    return EXIT_OK


def cmd_plot(cfg):
    out = Path(cfg.out)
    rows = _read_csv_rows(out / "results.csv", "results input")
    plots.plot_rate_vs_snr(rows, out / "rate_vs_snr.png")
    plots.plot_sop_vs_snr(rows, out / "sop_vs_snr.png")
    print(f"plot: wrote {out / 'rate_vs_snr.png'} and {out / 'sop_vs_snr.png'}")
    web_path = out / "web.csv"
    if web_path.exists():
        web_rows = plots.read_results_csv(web_path)
        if web_rows:
            snr = float(web_rows[0]["snr_db"])
            png = _paths(out, snr)["web_png"]
            plots.plot_web(web_rows, png, snr_db=snr)
            print(f"plot: wrote {png}")
    return EXIT_OK


def cmd_bench(cfg):
    out = Path(cfg.out)
    paths = _paths(out, cfg.snr)
    test = ds_mod.read_dataset(_require(paths["test"], "test dataset", cfg.snr))
    sys_cfg = test.config
    table = enumerate_combos(test.n_s, test.n_t)
    t_matrix = ds_mod.normalized_features(test)
    h_sq = test.features[:, :-1] ** 2
    g_sq = test.features[:, -1] ** 2
    rows = []
    for scheme in cfg.schemes:
        if scheme == "oracle":
            start = time.perf_counter()
            oracle_select_batch(sys_cfg, h_sq, g_sq, table)
            elapsed = time.perf_counter() - start
        elif scheme == "maxh":
            start = time.perf_counter()
            ev.maxh_labels(sys_cfg, test, table)
            elapsed = time.perf_counter() - start
        elif scheme == "knn":
            train = ds_mod.read_dataset(
                _require(paths["train"], "k-NN training dataset", cfg.snr)
            )
            model = knn_mod.knn_fit(
                ds_mod.normalized_features(train), train.labels, k=cfg.knn_k
            )
            start = time.perf_counter()
            knn_mod.knn_predict_batch(model, t_matrix)
            elapsed = time.perf_counter() - start
        elif scheme == "dnn":
            model, _ = mlp_mod.load_model(_require(paths["model"], "trained model", cfg.snr))
            start = time.perf_counter()
            mlp_mod.predict_batch(model, t_matrix)
            elapsed = time.perf_counter() - start
        rows.append((scheme, test.count, elapsed, 1e6 * elapsed / test.count))
    bench_path = out / "bench.csv"
    with open(bench_path, "w", encoding="utf-8") as fh:
        fh.write("# wall-clock timings; machine dependent, not deterministic\n")
        fh.write("scheme,records,total_seconds,per_record_us\n")
        for scheme, count, total, per in rows:
            fh.write(f"{scheme},{count},{total:.6f},{per:.3f}\n")
    for scheme, count, total, per in rows:
        print(f"bench {scheme:>6}: {per:9.3f} us/record over {count} records")
    print(f"bench: wrote {bench_path}")
    return EXIT_OK


_DISPATCH = {
    "gen": cmd_gen,
    "train": cmd_train,
    "eval": cmd_eval,
    "web": cmd_web,
    "plot": cmd_plot,
    "bench": cmd_bench,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args, args.command)
        return _DISPATCH[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TrainingDivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (DataFormatError, ModelFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
