"""Command-line entry points.

Exit codes: 0 success, 1 usage error, 2 config error, 3 runtime or
numeric error.
"""
import argparse
import csv
import math
import os
import sys

import numpy as np

from . import config as config_mod
from . import io
from .data import generate_blobs
from .errors import ConfigError, NctError
from .noise import corrupt, expected_noise_fraction, NoiseSpec
from .probe import probe_model
from .trainer import inference_mode, summarize, train

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

KIND_ALIASES = {
    "sym-incl": "symmetric_inclusive",
    "sym-excl": "symmetric_exclusive",
    "pair": "pair_flip",
}
METRICS_FILE = "metrics.jsonl"
RESOLVED_CONFIG = "config.resolved"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="nctlab", description="Noisy-label training laboratory.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a Gaussian-blobs dataset CSV")
    g.add_argument("--n", type=int, default=2000)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--classes", type=int, default=2)
    g.add_argument("--separation", type=float, default=3.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    c = sub.add_parser("corrupt", help="corrupt the labels of a clean dataset CSV")
    c.add_argument("--input", required=True)
    c.add_argument("--output", help="defaults to rewriting --input in place")
    c.add_argument("--kind", required=True, choices=sorted(KIND_ALIASES))
    c.add_argument("--rate", type=float, required=True)
    c.add_argument("--seed", type=int, default=0)

    t = sub.add_parser("train", help="run the configured method")
    t.add_argument("--config", required=True)

    pr = sub.add_parser("probe", help="random-label probe on a trained model")
    pr.add_argument("--config", required=True)
    pr.add_argument("--model", required=True)

    r = sub.add_parser("report", help="tabulate Best/Last accuracy across run directories")
    r.add_argument("--runs", required=True)
    r.add_argument("--out", help="CSV path; stdout when omitted")
    return p


def cmd_generate(args):
    ds = generate_blobs(args.n, args.d, args.classes, args.separation, args.seed)
    io.save_csv(ds, args.out)
    print(f"wrote {len(ds)} samples ({args.classes} classes, d={args.d}) to {args.out}")


def cmd_corrupt(args):
    kind = KIND_ALIASES[args.kind]
    with open(args.input, encoding="utf-8") as f:
        original = f.read()
    ds = io.load_csv(args.input)
    noisy = corrupt(ds, NoiseSpec(kind, args.rate, args.seed))
    realized = noisy.noise_rate()
    n = len(ds)
    expected = expected_noise_fraction(kind, args.rate, ds.num_classes)
    sd = math.sqrt(expected * (1 - expected) / n) if n else 0.0
    footer = (
        f"# corrupt kind={kind} rate={args.rate!r} seed={args.seed} "
        f"realized={realized!r} expected={expected!r} binomial_sd={sd!r}\n"
    )
    body = original if np.array_equal(noisy.labels, ds.labels) else io.dumps_csv(noisy)
    if not body.endswith("\n"):
        body += "\n"
    with open(args.output or args.input, "w", encoding="utf-8", newline="") as f:
        f.write(body + footer)
    print(f"realized noise rate {realized:.6f} (expected {expected:.6f}, sd {sd:.6f}, n={n})")


def run_training(cfg):
    """Train from a resolved config dict; writes metrics, models and the
    materialized config into ``output_dir``.  Returns the summary record."""
    tcfg = config_mod.train_config(cfg)
    spec = config_mod.noise_spec(cfg)
    ds = io.load_csv(cfg["dataset_path"])
    test = io.load_csv(cfg["test_path"], num_classes=ds.num_classes)
    if spec is not None:
        ds = corrupt(ds, spec)
    out = cfg["output_dir"]
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, RESOLVED_CONFIG), "w", encoding="utf-8") as f:
        f.write(config_mod.materialize(cfg))
    metrics_path = os.path.join(out, METRICS_FILE)
    with open(metrics_path, "w", encoding="utf-8"):
        pass

    models, metrics = train(ds, test, tcfg, callback=lambda m: io.append_records(metrics_path, [m.to_record()]))
    summary = {
        "record_type": "summary",
        "method": tcfg.method,
        "inference": inference_mode(tcfg.method),
        "epochs": tcfg.schedule.total_epochs,
        "train_noise_rate": ds.noise_rate(),
        **summarize(metrics),
    }
    io.append_records(metrics_path, [summary])
    for k, model in enumerate(models, start=1):
        io.save_model(model, os.path.join(out, f"model{k}.bin"))
    return summary


def cmd_train(args):
    cfg = config_mod.load_config(args.config)
    summary = run_training(cfg)
    print(
        f"{summary['method']}: best {summary['best_test_acc']} (epoch {summary['best_epoch']}), "
        f"last {summary['last_test_acc']}"
    )


def cmd_probe(args):
    cfg = config_mod.load_config(args.config)
    pcfg = config_mod.probe_config(cfg)
    if not os.path.isfile(args.model):
        raise ConfigError(f"model file not found: {args.model}")
    model = io.load_model(args.model)
    ds = io.load_csv(cfg["dataset_path"])
    record = probe_model(model, ds, pcfg)
    record["model"] = os.path.basename(args.model)
    os.makedirs(cfg["output_dir"], exist_ok=True)
    io.append_records(os.path.join(cfg["output_dir"], METRICS_FILE), [record])
    print(f"probe training error {record['train_error']:.4f} on {record['num_samples']} samples")


REPORT_COLUMNS = (
    "run",
    "method",
    "best_test_acc",
    "best_epoch",
    "last_test_acc",
    "best_minus_last",
    "last_minus_standard",
    "probe_train_error",
)


def collect_runs(runs_dir):
    rows = []
    for name in sorted(os.listdir(runs_dir)):
        path = os.path.join(runs_dir, name, METRICS_FILE)
        if not os.path.isfile(path):
            continue
        records = io.read_records(path)
        summaries = [r for r in records if r.get("record_type") == "summary"]
        if not summaries:
            continue
        s = summaries[-1]
        probes = [r for r in records if r.get("record_type") == "probe"]
        rows.append(
            {
                "run": name,
                "method": s["method"],
                "best_test_acc": s["best_test_acc"],
                "best_epoch": s["best_epoch"],
                "last_test_acc": s["last_test_acc"],
                "best_minus_last": s["best_test_acc"] - s["last_test_acc"],
                "probe_train_error": probes[-1]["train_error"] if probes else None,
            }
        )
    standard = [r["last_test_acc"] for r in rows if r["method"] == "standard"]
    for r in rows:
        r["last_minus_standard"] = r["last_test_acc"] - standard[0] if len(standard) == 1 else None
    return rows


def cmd_report(args):
    if not os.path.isdir(args.runs):
        raise ConfigError(f"not a directory: {args.runs}")
    rows = collect_runs(args.runs)
    handle = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(handle, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: "" if r[k] is None else r[k] for k in REPORT_COLUMNS})
    finally:
        if args.out:
            handle.close()


COMMANDS = {
    "generate": cmd_generate,
    "corrupt": cmd_corrupt,
    "train": cmd_train,
    "probe": cmd_probe,
    "report": cmd_report,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NctError, OSError, ValueError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
