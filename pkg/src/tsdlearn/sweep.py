"""Algorithm comparison sweeps over train length or input rate."""

from __future__ import annotations

import csv
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .config import SweepSpec, build_rule
from .svg import line_chart
from .trainer import ExperimentConfig, train, tune_lr

log = logging.getLogger(__name__)

# Tuned learning rates reported for the duration sweep at 100 Hz; used only
# to centre the search grid. Keys are train lengths in ms.
REFERENCE_LR = {
    "tsd": {200: 0.0019, 400: 0.0010, 600: 0.00075, 800: 0.0006, 1000: 0.00055, 1200: 0.0005},
    "resume": {200: 0.0022, 400: 0.0014, 600: 0.0010, 800: 0.0008, 1000: 0.0006, 1200: 0.0005},
}


def lr_center(rule: str, duration: float, input_rate: float) -> float:
    """Power-law fit of the reference rates, evaluated at the equivalent
    train length duration * input_rate / 100 Hz."""
    table = REFERENCE_LR.get(rule, REFERENCE_LR["tsd"])
    x = np.log(np.array(sorted(table), dtype=float))
    y = np.log(np.array([table[k] for k in sorted(table)]))
    slope, icpt = np.polyfit(x, y, 1)
    load = max(duration * input_rate / 100.0, 1e-3)
    return float(np.exp(icpt + slope * np.log(load)))


def lr_grid(center: float, points_per_decade: int = 8, decades: float = 2.0) -> list[float]:
    half = int(round(points_per_decade * decades / 2))
    return [float(center * 10 ** (k / points_per_decade)) for k in range(-half, half + 1)]


def default_max_epochs(duration: float) -> int:
    return 2000 if duration <= 200 else 3000


@dataclass(frozen=True)
class CellResult:
    algorithm: str
    value: float
    tuned_lr: float
    best_cs: tuple[float, ...]
    best_epochs: tuple[int, ...]
    initial_cs: tuple[float, ...] = ()

    @property
    def mean_c(self) -> float:
        return float(np.mean(self.best_cs))

    @property
    def median_c(self) -> float:
        return float(statistics.median(self.best_cs))

    @property
    def mean_epoch(self) -> float:
        return float(np.mean(self.best_epochs))


def cell_config(spec: SweepSpec, algorithm: str, value: float,
                max_epochs: Optional[int] = None) -> ExperimentConfig:
    cfg = spec.base
    if spec.axis == "duration":
        cfg = replace(cfg, duration=float(value))
    else:
        cfg = replace(cfg, input_rate=float(value))
        if spec.preset == "common":
            cfg = replace(cfg, desired_rate=float(value))
    epochs = max_epochs or spec.max_epochs or default_max_epochs(cfg.duration)
    return replace(cfg, rule=build_rule(algorithm, spec.rule_options), max_epochs=epochs)


def run_cell(spec: SweepSpec, algorithm: str, value: float,
             max_epochs: Optional[int] = None) -> CellResult:
    """Tune the learning rate on the base seed, then train ``repeats`` seeds
    (base, base+1, ...) at that rate."""
    cfg = cell_config(spec, algorithm, value, max_epochs)
    grid = list(spec.lr_grid) if spec.lr_grid else lr_grid(
        lr_center(algorithm, cfg.duration, cfg.input_rate),
        spec.lr_points_per_decade, spec.lr_decades)
    lr, first = tune_lr(cfg, grid)
    results = [first]
    for r in range(1, spec.repeats):
        results.append(train(replace(cfg, eta=lr, seed=cfg.seed + r)))
    log.info("%s @ %g: lr=%g mean C=%.4f", algorithm, value, lr,
             np.mean([x.best_c for x in results]))
    return CellResult(algorithm, float(value), lr, tuple(x.best_c for x in results),
                      tuple(x.best_epoch for x in results),
                      tuple(x.records[0].c_value for x in results))


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1, max_epochs: Optional[int] = None) -> list[CellResult]:
    cells = [(spec, a, v, max_epochs) for a in spec.algorithms for v in spec.values]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_cell_args, cells))
    return [run_cell(*c) for c in cells]


def _g(x: float) -> str:
    return f"{x:.12g}"


def write_report(out_dir, spec: SweepSpec, cells: list[CellResult]) -> dict[str, Path]:
    """``sweep_report.csv`` (one row per algorithm and axis value),
    ``sweep_table.csv`` (algorithm rows, LR/C/Epoch per axis value) and
    ``sweep.svg``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"report": out / "sweep_report.csv", "table": out / "sweep_table.csv",
             "plot": out / "sweep.svg"}
    with open(paths["report"], "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["algorithm", spec.axis, "tuned_lr", "mean_c", "median_c", "mean_epoch", "repeats"])
        for c in cells:
            wr.writerow([c.algorithm, _g(c.value), _g(c.tuned_lr), _g(c.mean_c), _g(c.median_c),
                         _g(c.mean_epoch), len(c.best_cs)])
    by_key = {(c.algorithm, c.value): c for c in cells}
    values = [float(v) for v in spec.values]
    with open(paths["table"], "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        head = ["algorithm"]
        for v in values:
            head += [f"{v:g}_lr", f"{v:g}_c", f"{v:g}_epoch"]
        wr.writerow(head)
        for a in spec.algorithms:
            row = [a]
            for v in values:
                c = by_key[(a, v)]
                row += [_g(c.tuned_lr), f"{c.mean_c:.3f}", f"{c.mean_epoch:.0f}"]
            wr.writerow(row)
    series = [(a, values, [by_key[(a, v)].mean_c for v in values]) for a in spec.algorithms]
    unit = "ms" if spec.axis == "duration" else "Hz"
    paths["plot"].write_text(line_chart(series, title=f"Mean best C vs {spec.axis}",
                                        xlabel=f"{spec.axis} ({unit})", ylabel="mean best C",
                                        y_range=(0.0, 1.0)), encoding="utf-8")
    return paths
