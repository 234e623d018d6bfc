"""Writers for experiment results: epoch CSV, final weights, C-vs-epoch SVG."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .config import dump_experiment
from .svg import line_chart
from .trainer import ExperimentResult

EPOCH_COLUMNS = ("epoch", "c", "n_actual", "weight_l2", "weight_delta_l1")


def _g(x: float) -> str:
    return f"{x:.12g}"


def epoch_csv(result: ExperimentResult) -> str:
    """Epoch table preceded by ``#`` lines echoing the config and summary."""
    buf = io.StringIO()
    for line in dump_experiment(result.config).splitlines():
        buf.write(f"# {line}\n" if line else "#\n")
    buf.write(f"# best_c = {_g(result.best_c)}\n")
    buf.write(f"# best_epoch = {result.best_epoch}\n")
    buf.write(f"# converged = {str(result.converged).lower()}\n")
    buf.write(f"# weight_range = {_g(result.weight_range[0])}, {_g(result.weight_range[1])}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(EPOCH_COLUMNS)
    for r in result.records:
        wr.writerow([r.epoch, _g(r.c_value), r.n_actual_spikes, _g(r.weight_l2), _g(r.weight_delta_l1)])
    return buf.getvalue()


def read_epoch_csv(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        rows = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(rows))


def c_curve_svg(result: ExperimentResult) -> str:
    xs = [r.epoch for r in result.records]
    ys = [r.c_value for r in result.records]
    return line_chart([(result.config.rule.name, xs, ys)],
                      title=f"C per epoch ({result.config.rule.name}, eta={result.config.eta:g})",
                      xlabel="epoch", ylabel="C", y_range=(0.0, 1.0),
                      markers=[(result.best_epoch, result.best_c,
                                f"best {result.best_c:.3f} @ {result.best_epoch}")])


def write_result(out_dir, result: ExperimentResult) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"epochs": out / "epochs.csv", "weights": out / "weights.csv",
             "plot": out / "c_curve.svg"}
    paths["epochs"].write_text(epoch_csv(result), encoding="utf-8")
    with open(paths["weights"], "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["synapse", "weight"])
        for i, w in enumerate(result.final_weights):
            wr.writerow([i, _g(w)])
    paths["plot"].write_text(c_curve_svg(result), encoding="utf-8")
    return paths
