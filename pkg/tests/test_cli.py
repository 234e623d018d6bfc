import csv
import math

import pytest

from tsdlearn.cli import main
from tsdlearn.config import ConfigError, dump_experiment, load_experiment, load_sweep
from tsdlearn.report import read_epoch_csv
from tsdlearn.spikes import read_trains
from tsdlearn.trainer import ExperimentConfig

BASE = """\
[experiment]
n_inputs = 20
duration = 60
input_rate = 100
desired_rate = 100
eta = 0.01
max_epochs = {epochs}
seed = 3
"""


def write(tmp_path, text, name="cfg.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_generate_is_byte_identical(tmp_path):
    cfg = write(tmp_path, BASE.format(epochs=5))
    assert main(["generate", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    assert main(["generate", "--config", cfg, "--out", str(tmp_path / "b")]) == 0
    for name in ("inputs.txt", "desired.txt", "manifest.ini"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    inputs = read_trains(tmp_path / "a" / "inputs.txt")
    assert len(inputs) == 20
    # 20 trains * 60 ms * 100 Hz: expect 120 spikes, allow 5 sd
    total = sum(s.count for s in inputs)
    assert abs(total - 120) < 5 * math.sqrt(120)
    manifest = (tmp_path / "a" / "manifest.ini").read_text()
    assert f"input_spikes_total = {total}" in manifest


def test_generate_rate_zero_gives_empty_lines(tmp_path):
    cfg = write(tmp_path, BASE.format(epochs=5).replace("input_rate = 100", "input_rate = 0")
                .replace("desired_rate = 100", "desired_rate = 0"))
    assert main(["generate", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    lines = (tmp_path / "o" / "inputs.txt").read_text().split("\n")
    assert lines[:20] == [""] * 20
    assert all(s.count == 0 for s in read_trains(tmp_path / "o" / "inputs.txt"))


def test_train_one_epoch(tmp_path):
    cfg = write(tmp_path, BASE.format(epochs=1))
    assert main(["train", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    rows = read_epoch_csv(tmp_path / "o" / "epochs.csv")
    assert len(rows) == 1
    assert list(rows[0]) == ["epoch", "c", "n_actual", "weight_l2", "weight_delta_l1"]
    assert (tmp_path / "o" / "c_curve.svg").read_text().startswith("<svg")
    weights = list(csv.DictReader(open(tmp_path / "o" / "weights.csv")))
    assert len(weights) == 20


def test_train_eta_zero_flat_and_reproducible(tmp_path, monkeypatch):
    cfg = write(tmp_path, BASE.format(epochs=4).replace("eta = 0.01", "eta = 0"))
    monkeypatch.setenv("TSDLEARN_OUT", str(tmp_path / "env"))
    assert main(["train", "--config", cfg]) == 0
    rows = read_epoch_csv(tmp_path / "env" / "epochs.csv")
    assert len({r["c"] for r in rows}) == 1
    first = (tmp_path / "env" / "epochs.csv").read_bytes()
    assert main(["train", "--config", cfg]) == 0
    assert (tmp_path / "env" / "epochs.csv").read_bytes() == first


def test_seed_override_changes_output(tmp_path):
    cfg = write(tmp_path, BASE.format(epochs=5))
    main(["generate", "--config", cfg, "--out", str(tmp_path / "a")])
    main(["generate", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "4"])
    assert (tmp_path / "a" / "inputs.txt").read_bytes() != (tmp_path / "b" / "inputs.txt").read_bytes()


def test_sweep_single_cell(tmp_path):
    text = BASE.format(epochs=5) + "\n[sweep]\naxis = duration\nvalues = 60\nalgorithms = tsd\n" \
                                   "repeats = 1\nlr_grid = 0.01, 0.02\n"
    cfg = write(tmp_path, text)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    rows = list(csv.DictReader(open(tmp_path / "o" / "sweep_report.csv")))
    assert len(rows) == 1
    assert rows[0]["algorithm"] == "tsd" and rows[0]["repeats"] == "1"
    assert all(math.isfinite(float(rows[0][k])) for k in ("tuned_lr", "mean_c", "median_c", "mean_epoch"))
    table = list(csv.reader(open(tmp_path / "o" / "sweep_table.csv")))
    assert table[0] == ["algorithm", "60_lr", "60_c", "60_epoch"]
    assert (tmp_path / "o" / "sweep.svg").exists()


def test_sweep_unknown_algorithm_exits_2(tmp_path, capsys):
    text = BASE.format(epochs=5) + "\n[sweep]\nvalues = 60\nalgorithms = tsd, hebb\n"
    cfg = write(tmp_path, text)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "hebb" in err and "offline-wh" in err


def test_classify_outputs(tmp_path):
    cfg = write(tmp_path, BASE.format(epochs=5))
    assert main(["classify", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    rows = list(csv.DictReader(open(tmp_path / "o" / "classify.csv")))
    tags = {r["tag"] for r in rows}
    assert tags <= {"GATI", "SATI", "FITI", "MITI", "LITI"}
    assert rows and [float(r["time"]) for r in rows] == sorted(float(r["time"]) for r in rows)
    assert (tmp_path / "o" / "potential.csv").exists()


@pytest.mark.parametrize("text", [
    "[experiment]\nduration = abc\n",
    "[experiment]\nbogus = 1\n",
    "[experiment]\npreset = weird\n",
    "[rule]\nname = nope\n",
    "[neuron]\ntau_psp = -1\n",
    "[experiment]\nweight_init = 1\n",
])
def test_bad_config_exits_2(tmp_path, text):
    cfg = write(tmp_path, text)
    assert main(["train", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_missing_config_exits_2(tmp_path):
    assert main(["train", "--out", str(tmp_path)]) == 2
    assert main(["train", "--config", str(tmp_path / "none.ini"), "--out", str(tmp_path)]) == 2


def test_unwritable_output_exits_2(tmp_path):
    cfg = write(tmp_path, BASE.format(epochs=1))
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["generate", "--config", cfg, "--out", str(blocker / "sub")]) == 2


def test_dump_round_trip(tmp_path):
    for rule in ("tsd", "offline-wh", "resume", "stdp", "tstdp"):
        cfg = write(tmp_path, BASE.format(epochs=7) + f"[rule]\nname = {rule}\n")
        a = load_experiment(cfg)
        b = load_experiment(write(tmp_path, dump_experiment(a), "dump.ini"))
        assert a == b


def test_preset_sets_rates(tmp_path):
    cfg = load_experiment(write(tmp_path, "[experiment]\npreset = different\n"))
    assert (cfg.input_rate, cfg.desired_rate) == (20.0, 100.0)
    assert load_experiment(write(tmp_path, "")) == ExperimentConfig()


def test_sweep_spec_validation(tmp_path):
    with pytest.raises(ConfigError):
        load_sweep(write(tmp_path, "[sweep]\nvalues =\nalgorithms = tsd\n"))
    with pytest.raises(ConfigError):
        load_sweep(write(tmp_path, "[sweep]\nvalues = 200\nalgorithms = tsd\nrepeats = 0\n"))
    with pytest.raises(ConfigError):
        load_sweep(write(tmp_path, "[sweep]\naxis = weight\nvalues = 200\nalgorithms = tsd\n"))
    with pytest.raises(ConfigError):
        load_sweep(write(tmp_path, "[experiment]\n"))
