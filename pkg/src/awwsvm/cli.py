"""Command-line entry point: train single models, sweep experiments,
run rank statistics over results, and generate synthetic data.

Configuration precedence is defaults < ``--config`` key=value file < explicit
flags. Every run writes a ``resolved.cfg`` capturing the effective settings;
re-running from that file reproduces the outputs byte for byte. The output
directory comes from ``--out`` or the ``AWWSVM_OUT`` environment variable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from .data import (ParseError, load_libsvm, save_libsvm, split, synth_two_gaussians)
from .metrics import confusion, report
from .model import save_model
from .objective import ObjectiveConfig, WeightMode
from .stats import friedman, nemenyi_cd, nemenyi_q, pairwise_significance, rank_rows
from .trainer import (Optimizer, RESULTS_COLUMNS, TrainConfig, TrainingError,
                      run_experiment, train)
from .presets import PRESETS, preset_config
from .weighting import NoiseMode


class CliError(Exception):
    """Usage or configuration problem; maps to exit code 2."""


# key -> (parser, default); flat schema shared by config files and flags
def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


CONFIG_SCHEMA: dict[str, tuple] = {
    "data": (str, None),
    "test_data": (str, None),
    "split": (float, 0.2),
    "optimizer": (str, "sgd"),
    "adaptive": (_parse_bool, False),
    "weight_mode": (str, "regularizer"),
    "noise_mode": (str, "signed"),
    "sigma": (float, 1.0),
    "c": (float, 1.0),
    "alpha0": (float, 1.0),
    "tau": (float, 10.0),
    "mu": (float, 0.1),
    "lambda": (float, 0.2),
    "eps_h": (float, 1.0),
    "outer_iters": (int, 10),
    "inner_iters": (int, 10),
    "batch_size": (int, 64),
    "seed": (int, 0),
    "jobs": (int, 1),
    "out": (str, None),
}


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file; '#' comments and blank lines are ignored."""
    values: dict = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CliError(f"config file not found: {path}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, raw = body.partition("=")
        if not sep:
            raise CliError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key = key.strip()
        if key not in CONFIG_SCHEMA:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        parse = CONFIG_SCHEMA[key][0]
        try:
            values[key] = parse(raw.strip())
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: {exc}") from None
    return values


def resolve_config(file_values: dict, flag_values: dict) -> dict:
    resolved = {k: default for k, (_, default) in CONFIG_SCHEMA.items()}
    resolved.update(file_values)
    resolved.update({k: v for k, v in flag_values.items() if v is not None})
    return resolved


def format_config(cfg: dict) -> str:
    lines = []
    for key in sorted(cfg):
        v = cfg[key]
        if v is None:
            continue
        if isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, float):
            v = repr(v)
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"


def build_train_config(cfg: dict) -> TrainConfig:
    try:
        optimizer = Optimizer(cfg["optimizer"])
    except ValueError:
        raise CliError(f"unknown optimizer {cfg['optimizer']!r} "
                       f"(choose from {[o.value for o in Optimizer]})") from None
    try:
        mode = WeightMode(cfg["weight_mode"])
    except ValueError:
        raise CliError(f"unknown weight mode {cfg['weight_mode']!r}") from None
    try:
        noise = NoiseMode(cfg["noise_mode"])
    except ValueError:
        raise CliError(f"unknown noise mode {cfg['noise_mode']!r}") from None
    try:
        return TrainConfig(
            optimizer=optimizer,
            adaptive=cfg["adaptive"],
            outer_iters=cfg["outer_iters"],
            inner_iters=cfg["inner_iters"],
            batch_size=cfg["batch_size"],
            objective=ObjectiveConfig(C=cfg["c"], weight_mode=mode),
            sigma=cfg["sigma"],
            alpha0=cfg["alpha0"],
            tau=cfg["tau"],
            mu=cfg["mu"],
            damping=cfg["lambda"],
            eps_h=cfg["eps_h"],
            noise_mode=noise,
            seed=cfg["seed"],
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _out_dir(cfg_out, default: str) -> Path:
    out = cfg_out or os.environ.get("AWWSVM_OUT") or default
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_dataset(path: str):
    if not Path(path).exists():
        raise CliError(f"dataset file not found: {path}")
    try:
        return load_libsvm(path)
    except ParseError as exc:
        raise CliError(f"{path}: {exc}") from None


def _print_report(rep, cm, verbose: bool) -> None:
    print("final evaluation:")
    for name in ("accuracy", "precision", "recall", "specificity", "sensitivity", "f1", "gmean"):
        print(f"  {name:<12} {getattr(rep, name):.4f}")
    if rep.degenerate:
        print(f"  degenerate 0/0 ratios reported as 0: {sorted(rep.degenerate)}")
    if verbose:
        print(f"  counts: tp={cm.tp} fn={cm.fn} fp={cm.fp} tn={cm.tn}")
        den = cm.tp + cm.fp
        variant = cm.tp / den if den else 0.0
        print(f"  sensitivity (tp/(tp+fp) variant): {variant:.4f}")


def cmd_train(args) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    flag_values = {k: getattr(args, k.replace("-", "_"), None) for k in CONFIG_SCHEMA}
    flag_values["lambda"] = getattr(args, "lambda_", None)
    cfg = resolve_config(file_values, flag_values)
    if not cfg["data"]:
        raise CliError("no dataset given: use --data or a config file")
    train_cfg = build_train_config(cfg)

    ds = _load_dataset(cfg["data"])
    if cfg["test_data"]:
        train_ds, eval_ds = ds, _load_dataset(cfg["test_data"])
    else:
        train_ds, eval_ds = split(ds, cfg["split"], cfg["seed"])

    out = _out_dir(cfg["out"], "awwsvm-run")
    (out / "resolved.cfg").write_text(format_config(cfg), encoding="utf-8")

    try:
        model, history = train(train_ds, eval_ds, train_cfg)
    except TrainingError as exc:
        raise CliError(f"training aborted: {exc}") from None

    save_model(model, str(out / "model.txt"))
    name = Path(cfg["data"]).stem
    buf = io.StringIO()
    buf.write(",".join(RESULTS_COLUMNS) + "\n")
    for i, rec in enumerate(history.records, start=1):
        rep = rec.test_report
        cells = [name, train_cfg.method_name, str(cfg["seed"]), str(i),
                 f"{rep.accuracy:.6f}", f"{rep.precision:.6f}", f"{rep.recall:.6f}",
                 f"{rep.specificity:.6f}", f"{rep.f1:.6f}", f"{rep.gmean:.6f}",
                 f"{rec.train_loss:.6f}", str(rec.n_noise)]
        buf.write(",".join(cells) + "\n")
    (out / "history.csv").write_text(buf.getvalue(), encoding="utf-8")

    if args.verbose:
        wbuf = ["outer_iter,alpha_min,alpha_mean,alpha_max,n_noise"]
        wbuf += [f"{i},{r.alpha_min:.6f},{r.alpha_mean:.6f},{r.alpha_max:.6f},{r.n_noise}"
                 for i, r in enumerate(history.records, start=1)]
        (out / "weights.csv").write_text("\n".join(wbuf) + "\n", encoding="utf-8")

    cm = confusion(model, eval_ds)
    _print_report(report(cm), cm, args.verbose)
    print(f"wrote {out / 'model.txt'}, {out / 'history.csv'}, {out / 'resolved.cfg'}")
    return 0


def _coerce(key: str, value):
    """Cast a JSON manifest value to the schema type for ``key``."""
    parse = CONFIG_SCHEMA[key][0]
    if isinstance(value, str):
        return parse(value)
    if parse is _parse_bool:
        return bool(value)
    if parse is int:
        return int(value)
    if parse is float:
        return float(value)
    return value


def _manifest_dataset(entry: dict, seed: int):
    name = entry.get("name") or Path(entry["path"]).stem
    ds = _load_dataset(entry["path"])
    if entry.get("test_path"):
        return name, ds, _load_dataset(entry["test_path"])
    frac = float(entry.get("split", 0.2))
    tr, ev = split(ds, frac, seed)
    return name, tr, ev


def cmd_experiment(args) -> int:
    try:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliError(f"manifest not found: {args.manifest}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.manifest}: invalid JSON: {exc}") from None

    out = _out_dir(args.out, "awwsvm-experiment")
    seeds = [int(s) for s in manifest.get("seeds", [0])]
    shared = dict(manifest.get("train", {}))
    dataset_entries = manifest.get("datasets", [])
    method_entries = manifest.get("methods", [])

    (out / "resolved-manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    if not dataset_entries or not method_entries:
        (out / "results.csv").write_text(",".join(RESULTS_COLUMNS) + "\n", encoding="utf-8")
        print(f"empty manifest: wrote header-only {out / 'results.csv'}")
        return 0

    all_rows: list[dict] = []
    failures = []
    for seed in seeds:
        datasets = []
        for entry in dataset_entries:
            datasets.append(_manifest_dataset(entry, seed))
        for (name, tr, ev), entry in zip(datasets, dataset_entries):
            methods = []
            for m in method_entries:
                merged = dict(shared)
                merged.update(m)
                values = {k: default for k, (_, default) in CONFIG_SCHEMA.items()}
                for k, v in merged.items():
                    if k in CONFIG_SCHEMA:
                        values[k] = _coerce(k, v)
                cfg = build_train_config(values)
                if merged.get("preset") and name.lower() in PRESETS:
                    cfg = preset_config(name, cfg.optimizer, cfg.adaptive, base=cfg)
                methods.append(cfg)
            res = run_experiment([(name, tr, ev)], methods, [seed], jobs=args.jobs)
            all_rows.extend(res.rows)
            failures.extend(res.failures)

    from .trainer import ExperimentResults
    merged = ExperimentResults(rows=all_rows, failures=failures)
    (out / "results.csv").write_text(merged.to_csv(), encoding="utf-8")

    summary = merged.summary()
    if summary:
        cols = ["dataset", "method", "n_seeds", "accuracy", "precision", "recall",
                "specificity", "f1", "gmean"]
        sbuf = [",".join(cols)]
        for entry in summary:
            sbuf.append(",".join(f"{entry[c]:.6f}" if isinstance(entry[c], float) else str(entry[c])
                                 for c in cols))
        (out / "summary.csv").write_text("\n".join(sbuf) + "\n", encoding="utf-8")

    _print_summary(all_rows)

    if failures:
        lines = [f"{f.dataset},{f.method},{f.seed},{f.error}" for f in failures]
        (out / "failures.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"{len(failures)} cell(s) failed; see {out / 'failures.txt'}", file=sys.stderr)
        return 1
    print(f"wrote {out / 'results.csv'}")
    return 0


def _print_summary(rows: list[dict]) -> None:
    """Mean final accuracy per (dataset, method); best per dataset marked *."""
    finals = [r for r in rows if r["outer_iter"] == "final"]
    if not finals:
        return
    datasets, methods = [], []
    acc: dict[tuple[str, str], list[float]] = {}
    for r in finals:
        if r["dataset"] not in datasets:
            datasets.append(r["dataset"])
        if r["method"] not in methods:
            methods.append(r["method"])
        acc.setdefault((r["dataset"], r["method"]), []).append(r["accuracy"])
    width = max(len(d) for d in datasets) + 2
    print("mean final accuracy over seeds:")
    print(" " * width + "  ".join(f"{m:>12}" for m in methods))
    for d in datasets:
        means = {m: float(np.mean(acc[(d, m)])) for m in methods if (d, m) in acc}
        best = max(means.values(), default=float("nan"))
        cells = []
        for m in methods:
            if m in means:
                mark = "*" if means[m] == best else " "
                cells.append(f"{means[m]:>11.4f}{mark}")
            else:
                cells.append(f"{'-':>12}")
        print(f"{d:<{width}}" + "  ".join(cells))


def cmd_stats(args) -> int:
    path = Path(args.results)
    if not path.exists():
        raise CliError(f"results file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    finals = [r for r in rows if r.get("outer_iter") == "final"]
    if not finals:
        raise CliError("results contain no 'final' rows")
    metric = args.metric
    if metric not in RESULTS_COLUMNS[4:10]:
        raise CliError(f"unknown metric {metric!r}; choose from {RESULTS_COLUMNS[4:10]}")

    datasets, methods = [], []
    cells: dict[tuple[str, str], list[float]] = {}
    for r in finals:
        d, m = r["dataset"], r["method"]
        if d not in datasets:
            datasets.append(d)
        if m not in methods:
            methods.append(m)
        cells.setdefault((d, m), []).append(float(r[metric]))
    if len(methods) < 2 or len(datasets) < 2:
        raise CliError(f"need at least 2 methods and 2 datasets, "
                       f"got {len(methods)} and {len(datasets)}")
    values = np.empty((len(datasets), len(methods)))
    for i, d in enumerate(datasets):
        for j, m in enumerate(methods):
            if (d, m) not in cells:
                raise CliError(f"missing cell: dataset {d!r}, method {m!r}")
            values[i, j] = float(np.mean(cells[(d, m)]))

    rt = rank_rows(values, higher_is_better=True)
    chi2, p = friedman(rt)
    q = args.q if args.q is not None else nemenyi_q(len(methods), args.alpha)
    cd = nemenyi_cd(len(methods), len(datasets), q)
    sig = pairwise_significance(rt, cd)

    out = _out_dir(args.out, "awwsvm-stats")
    lines = [f"metric: {metric}",
             f"datasets: {len(datasets)}  methods: {len(methods)}",
             f"friedman chi2 = {chi2:.4f}   p = {p:.6g}",
             f"critical difference (q={q:.3f}, alpha={args.alpha}) = {cd:.4f}",
             "mean ranks (1 = best):"]
    order = np.argsort(rt.mean_ranks)
    for j in order:
        lines.append(f"  {methods[j]:<16} {rt.mean_ranks[j]:.4f}")
    lines.append("significant pairs (|rank diff| > CD):")
    any_sig = False
    for i in range(len(methods)):
        for j in range(i + 1, len(methods)):
            if sig[i, j]:
                any_sig = True
                diff = abs(rt.mean_ranks[i] - rt.mean_ranks[j])
                lines.append(f"  {methods[i]} vs {methods[j]}  (diff {diff:.4f})")
    if not any_sig:
        lines.append("  none")
    text = "\n".join(lines) + "\n"
    (out / "stats_report.txt").write_text(text, encoding="utf-8")
    print(text, end="")

    rank_buf = ["method,mean_rank,cd"]
    rank_buf += [f"{methods[j]},{rt.mean_ranks[j]:.6f},{cd:.6f}" for j in range(len(methods))]
    (out / "mean_ranks.csv").write_text("\n".join(rank_buf) + "\n", encoding="utf-8")

    sig_buf = ["method," + ",".join(methods)]
    for i, m in enumerate(methods):
        sig_buf.append(m + "," + ",".join(str(bool(sig[i, j])).lower() for j in range(len(methods))))
    (out / "significance.csv").write_text("\n".join(sig_buf) + "\n", encoding="utf-8")
    print(f"wrote {out / 'stats_report.txt'}, {out / 'mean_ranks.csv'}, {out / 'significance.csv'}")
    return 0


def cmd_synth(args) -> int:
    try:
        ds = synth_two_gaussians(args.n_pos, args.n_neg, args.separation, args.flip, args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    save_libsvm(ds, str(out))
    print(f"wrote {len(ds)} samples to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="awwsvm",
                                     description="Adaptive-weight soft-margin SVM toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train one model and evaluate it")
    p_train.add_argument("--config", help="key=value config file")
    p_train.add_argument("--data")
    p_train.add_argument("--test-data", dest="test_data")
    p_train.add_argument("--split", type=float)
    p_train.add_argument("--optimizer", choices=[o.value for o in Optimizer])
    p_train.add_argument("--adaptive", action=argparse.BooleanOptionalAction, default=None)
    p_train.add_argument("--weight-mode", dest="weight_mode",
                         choices=[m.value for m in WeightMode])
    p_train.add_argument("--noise-mode", dest="noise_mode",
                         choices=[m.value for m in NoiseMode])
    p_train.add_argument("--sigma", type=float)
    p_train.add_argument("--c", type=float)
    p_train.add_argument("--alpha0", type=float)
    p_train.add_argument("--tau", type=float)
    p_train.add_argument("--mu", type=float)
    p_train.add_argument("--lambda", dest="lambda_", type=float)
    p_train.add_argument("--eps-h", dest="eps_h", type=float)
    p_train.add_argument("--outer-iters", dest="outer_iters", type=int)
    p_train.add_argument("--inner-iters", dest="inner_iters", type=int)
    p_train.add_argument("--batch-size", dest="batch_size", type=int)
    p_train.add_argument("--seed", type=int)
    p_train.add_argument("--jobs", type=int)
    p_train.add_argument("--out")
    p_train.add_argument("-v", "--verbose", action="store_true")
    p_train.set_defaults(func=cmd_train)

    p_exp = sub.add_parser("experiment", help="sweep datasets x methods x seeds")
    p_exp.add_argument("--manifest", required=True, help="JSON manifest")
    p_exp.add_argument("--jobs", type=int, default=1)
    p_exp.add_argument("--out")
    p_exp.set_defaults(func=cmd_experiment)

    p_stats = sub.add_parser("stats", help="rank statistics over a results CSV")
    p_stats.add_argument("--results", required=True)
    p_stats.add_argument("--metric", default="accuracy")
    p_stats.add_argument("--alpha", type=float, default=0.05)
    p_stats.add_argument("--q", type=float, default=None,
                         help="override the critical value q_alpha")
    p_stats.add_argument("--out")
    p_stats.set_defaults(func=cmd_stats)

    p_synth = sub.add_parser("synth", help="generate a two-Gaussian dataset")
    p_synth.add_argument("--n-pos", dest="n_pos", type=int, required=True)
    p_synth.add_argument("--n-neg", dest="n_neg", type=int, required=True)
    p_synth.add_argument("--separation", type=float, default=3.0)
    p_synth.add_argument("--flip", type=float, default=0.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
