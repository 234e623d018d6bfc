"""Command-line entry point: ``tsdlearn {generate,train,sweep,classify}``.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import intervals
from .config import ConfigError, dump_experiment, load_experiment, load_sweep
from .report import write_result
from .spikes import write_trains
from .srm import InputDrive, simulate, write_potential_csv
from .sweep import run_sweep, write_report
from .trainer import draw_patterns, initial_network, train

log = logging.getLogger("tsdlearn")

OUT_ENV = "TSDLEARN_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _out_dir(args) -> Path:
    out = args.out or os.environ.get(OUT_ENV) or "tsdlearn-out"
    path = Path(out)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from exc
    if not os.access(path, os.W_OK):
        raise ConfigError(f"output directory {path} is not writable")
    return path


def _experiment(args):
    if not args.config:
        raise ConfigError("--config is required")
    cfg = load_experiment(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def cmd_generate(args) -> int:
    cfg = _experiment(args)
    out = _out_dir(args)
    inputs, desired = draw_patterns(cfg)
    write_trains(out / "inputs.txt", inputs)
    write_trains(out / "desired.txt", [desired])
    counts = [s.count for s in inputs]
    manifest = dump_experiment(cfg) + (
        "[fixture]\n"
        f"input_spikes_total = {sum(counts)}\n"
        f"input_spikes_mean = {sum(counts) / len(counts):.6g}\n"
        f"desired_spikes = {desired.count}\n")
    (out / "manifest.ini").write_text(manifest, encoding="utf-8")
    print(f"wrote {len(inputs)} input trains and 1 desired train to {out}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _experiment(args)
    out = _out_dir(args)
    result = train(cfg)
    write_result(out, result)
    print(f"{cfg.rule.name}: best C = {result.best_c:.4f} at epoch {result.best_epoch} "
          f"({len(result.records)} epochs); results in {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if not args.config:
        raise ConfigError("--config is required")
    spec = load_sweep(args.config)
    if args.seed is not None:
        spec = replace(spec, base=replace(spec.base, seed=args.seed))
    out = _out_dir(args)
    cells = run_sweep(spec, jobs=max(1, args.jobs))
    write_report(out, spec, cells)
    for c in cells:
        print(f"{c.algorithm:>10} {spec.axis}={c.value:g}: lr={c.tuned_lr:.4g} "
              f"mean C={c.mean_c:.3f} median C={c.median_c:.3f} epoch={c.mean_epoch:.0f}")
    return EXIT_OK


def cmd_classify(args) -> int:
    """Simulate the untrained network once and dump the interval tags."""
    cfg = _experiment(args)
    out = _out_dir(args)
    inputs, desired = draw_patterns(cfg)
    drive = InputDrive(inputs, cfg.grid, cfg.srm)
    net, _ = initial_network(cfg, drive, desired)
    trace = simulate(net, drive, cfg.grid, record_potential=True)
    actual = trace.output
    atis = intervals.classify_atis(actual, desired)
    labels = {i: intervals.label_input_spikes(s, actual, desired) for i, s in enumerate(inputs)}
    intervals.write_classification_csv(out / "classify.csv", atis, labels)
    write_trains(out / "actual.txt", [actual])
    write_potential_csv(out / "potential.csv", trace, cfg.grid)
    n_gati = sum(t.kind is intervals.IntervalKind.GATI for t in atis)
    print(f"{actual.count} actual / {desired.count} desired spikes; "
          f"{n_gati} GATI, {len(atis) - n_gati} SATI; results in {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsdlearn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, help_ in (
        ("generate", cmd_generate, "write seeded input/desired spike train fixtures"),
        ("train", cmd_train, "train one network and write epoch CSV, weights and C plot"),
        ("sweep", cmd_sweep, "compare algorithms over train length or input rate"),
        ("classify", cmd_classify, "dump interval classification of an untrained run"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="INI config file")
        p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./tsdlearn-out)")
        p.add_argument("--seed", type=int, help="override the config seed")
        if name == "sweep":
            p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        log.debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
