"""Command line entry point: ``lognnet <command> [options]``.

Tabular output is CSV with a header row, written to stdout or ``--out``.
Commands that write files also write ``<file>.manifest.json`` recording the
resolved configuration.  Exit codes: 0 success, 1 domain or I/O error,
2 usage error.
"""
import argparse
import csv
import datetime as dt
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .bench import bench_grid, pin_to_one_core, ratio_report
from .chaos import FORMS, ReservoirParams, bifurcation, lyapunov
from .errors import LogNNetError
from .mnist_io import default_data_dir, load_mnist
from .network import (NetworkConfig, evaluate, load_model, memory_report, model_to_text,
                      parse_shape, save_model, sweep_r, train)
from .tpattern import builtin_pattern, save_pattern


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def emit_csv(rows, header, destination=None):
    """Write header and rows as CSV to a path, or stdout when None/'-'."""
    if destination in (None, "-"):
        _write_csv(sys.stdout, header, rows)
        return
    try:
        with open(destination, "w", newline="") as fh:
            _write_csv(fh, header, rows)
    except OSError as exc:
        raise OSError(f"cannot write {destination}: {exc.strerror or exc}") from exc


def _write_csv(fh, header, rows):
    writer = csv.writer(fh, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError("row length does not match header")
        writer.writerow([_fmt(v) for v in row])


def write_manifest(output, args, config=None, started=None, extra=None):
    manifest = {
        "command": args.command,
        "argv": sys.argv[1:],
        "arguments": {k: v for k, v in vars(args).items() if k != "func"},
        "config": config.to_dict() if config is not None else None,
        "seed": getattr(args, "seed", None),
        "backend": kernels.BACKEND,
        "version": __version__,
        "started": started,
        "finished": dt.datetime.now(dt.timezone.utc).isoformat(),
        "outputs": [str(output)],
    }
    if extra:
        manifest.update(extra)
    path = Path(str(output) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return path


def r_grid(start, stop, step):
    if step <= 0:
        raise LogNNetError("--step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    if n < 1:
        raise LogNNetError("empty r grid")
    return [round(start + k * step, 12) for k in range(n)]


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _pattern(text):
    return int(text) if text.isdigit() else text


def _config(args, algorithm=None):
    P, shape = parse_shape(args.shape)
    params = ReservoirParams(args.r, args.A, args.B, P, args.form)
    return NetworkConfig(params=params, pattern=args.pattern, classifier_shape=shape,
                         learning_rate=args.lr, epochs=args.epochs, seed=args.seed,
                         algorithm=algorithm or args.algorithm, loss=args.loss)


def _data(args):
    train_set, test_set = load_mnist(args.data_dir)
    if getattr(args, "train_limit", None):
        train_set = train_set.subset(args.train_limit)
    if getattr(args, "test_limit", None):
        test_set = test_set.subset(args.test_limit)
    return train_set, test_set


def _now():
    return dt.datetime.now(dt.timezone.utc).isoformat()


# --- commands ---------------------------------------------------------------

def cmd_train(args):
    started = _now()
    config = _config(args)
    train_set, test_set = _data(args)
    log = (lambda e, a: print(f"epoch {e}: {a:.2f}%", file=sys.stderr)) if args.verbose else None
    model = train(config, train_set, test_set, progress=log)
    if args.model:
        save_model(model, args.model)
        write_manifest(args.model, args, config, started)
    rows = list(enumerate(model.training_history, start=1))
    emit_csv(rows, ["epoch", "accuracy"], args.out)
    if args.out not in (None, "-"):
        write_manifest(args.out, args, config, started)


def cmd_eval(args):
    started = _now()
    model = load_model(args.model)
    _, test_set = _data(args)
    algorithm = args.algorithm or model.config.algorithm
    acc = evaluate(model, test_set, algorithm, threads=args.threads)
    emit_csv([(algorithm, len(test_set), acc)], ["algorithm", "images", "accuracy"], args.out)
    if args.out not in (None, "-"):
        write_manifest(args.out, args, model.config, started)


def cmd_sweep(args):
    started = _now()
    config = _config(args)
    grid = _floats(args.r_grid) if args.r_grid else r_grid(args.r_from, args.r_to, args.step)
    train_set, test_set = _data(args)
    rows = sweep_r(config, grid, train_set, test_set, threads=args.threads,
                   lyapunov_samples=args.lyapunov_samples)
    emit_csv(rows, ["r", "accuracy", "lyapunov"], args.out)
    if args.out not in (None, "-"):
        write_manifest(args.out, args, config, started)


def cmd_memory(args):
    P, shape = parse_shape(args.shape)
    config = NetworkConfig(params=ReservoirParams(P=P), classifier_shape=shape,
                           algorithm=args.algorithm)
    report = memory_report(config)
    if args.breakdown:
        rows = report.rows() + [("total", report.stored_elements, report.bytes)]
        emit_csv(rows, ["array", "elements", "bytes"], args.out)
    else:
        print(report.bytes)


def cmd_lyapunov(args):
    started = _now()
    grid = r_grid(args.r_from, args.r_to, args.step)
    rows = [(r, lyapunov(r, args.x0, args.transient, args.samples, args.form)) for r in grid]
    emit_csv(rows, ["r", "lyapunov"], args.out)
    if args.out not in (None, "-"):
        write_manifest(args.out, args, started=started)


def cmd_bifurcation(args):
    started = _now()
    grid = r_grid(args.r_from, args.r_to, args.step)
    rows = bifurcation(grid, args.transient, args.samples, args.x0, args.form)
    emit_csv(rows, ["r", "x"], args.out)
    if args.out not in (None, "-"):
        write_manifest(args.out, args, started=started)


def cmd_bench(args):
    started = _now()
    cpu = pin_to_one_core()
    train_set, test_set = load_mnist(args.data_dir)
    base = ReservoirParams(args.r, args.A, args.B, 1, args.form)
    reports = bench_grid(_ints(args.p_grid), train_set, test_set.images[:args.samples],
                         repetitions=args.repetitions, base_params=base, seed=args.seed)
    header, rows = ratio_report(reports)
    emit_csv(rows, header, args.out)
    if args.out not in (None, "-"):
        write_manifest(args.out, args, started=started, extra={"cpu": cpu})


def cmd_pattern_export(args):
    save_pattern(builtin_pattern(args.id), args.out)


def cmd_model_text(args):
    text = model_to_text(load_model(args.model))
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)


# --- parser -----------------------------------------------------------------

def _add_reservoir(p):
    p.add_argument("--r", type=float, default=1.885, help="map parameter (default 1.885)")
    p.add_argument("--A", type=float, default=0.3, help="seed amplitude (default 0.3)")
    p.add_argument("--B", type=float, default=5.9, help="seed period divisor (default 5.9)")
    p.add_argument("--form", choices=sorted(FORMS), default="shifted")


def _add_network(p):
    _add_reservoir(p)
    p.add_argument("--shape", default="784:25:10", help="784:P[:H]:10")
    p.add_argument("--pattern", type=_pattern, default=3, help="1, 2, 3 or a pattern file")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--lr", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--loss", choices=["mse", "ce"], default="mse")
    p.add_argument("--algorithm", type=int, choices=[1, 2, 3], default=2)


def _add_data(p, limits=True):
    p.add_argument("--data-dir", default=None,
                   help="directory with the MNIST IDX files (default $LOGNNET_DATA or ./data/mnist)")
    if limits:
        p.add_argument("--train-limit", type=int, default=None)
        p.add_argument("--test-limit", type=int, default=None)


def _add_out(p):
    p.add_argument("--out", default=None, help="output file (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="lognnet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("train", help="train a model; prints per-epoch test accuracy")
    _add_network(p)
    _add_data(p)
    _add_out(p)
    p.add_argument("--model", default=None, help="write the trained model here")
    p.add_argument("--verbose", "-v", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="test-set accuracy of a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--algorithm", type=int, choices=[1, 2, 3], default=None)
    p.add_argument("--threads", type=int, default=1)
    _add_data(p)
    _add_out(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep-r", help="accuracy and Lyapunov exponent over an r grid")
    _add_network(p)
    _add_data(p)
    _add_out(p)
    p.add_argument("--r-from", type=float, default=0.5)
    p.add_argument("--r-to", type=float, default=2.0)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--r-grid", default=None, help="comma-separated r values (overrides range)")
    p.add_argument("--lyapunov-samples", type=int, default=100_000)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("memory", help="weight memory in bytes (4 bytes per element)")
    p.add_argument("--shape", default="784:25:10")
    p.add_argument("--algorithm", type=int, choices=[1, 2, 3], default=2)
    p.add_argument("--breakdown", action="store_true", help="CSV per stored array")
    _add_out(p)
    p.set_defaults(func=cmd_memory)

    for name, func, samples, helptext in (
            ("lyapunov", cmd_lyapunov, 100_000, "Lyapunov exponent over an r grid"),
            ("bifurcation", cmd_bifurcation, 200, "bifurcation diagram points")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--r-from", type=float, default=0.1)
        p.add_argument("--r-to", type=float, default=2.0)
        p.add_argument("--step", type=float, default=0.01)
        p.add_argument("--x0", type=float, default=0.1)
        p.add_argument("--transient", type=int, default=1000)
        p.add_argument("--samples", type=int, default=samples)
        p.add_argument("--form", choices=sorted(FORMS), default="shifted")
        _add_out(p)
        p.set_defaults(func=func)

    p = sub.add_parser("bench", help="per-image time of algorithms 1-3")
    _add_reservoir(p)
    p.add_argument("--p-grid", default="25,45,75,100")
    p.add_argument("--samples", type=int, default=50, help="test images to time")
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    _add_data(p, limits=False)
    _add_out(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("pattern", help="T-pattern utilities")
    psub = p.add_subparsers(dest="pattern_command", metavar="subcommand")
    psub.required = True
    pe = psub.add_parser("export", help="write a builtin pattern as text")
    pe.add_argument("--id", type=int, required=True, choices=[1, 2, 3])
    pe.add_argument("--out", required=True)
    pe.set_defaults(func=cmd_pattern_export)

    p = sub.add_parser("model-text", help="dump a saved model as text")
    p.add_argument("--model", required=True)
    _add_out(p)
    p.set_defaults(func=cmd_model_text)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "data_dir", None) is None and hasattr(args, "data_dir"):
        args.data_dir = str(default_data_dir())
    try:
        args.func(args)
    except (LogNNetError, OSError, ValueError) as exc:
        print(f"lognnet: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
