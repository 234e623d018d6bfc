import csv

import numpy as np
import pytest

from tsdlearn.intervals import (
    IntervalKind,
    classify_atis,
    dti_index,
    label_input_spikes,
    resolve_prev_boundary,
    select_window,
    triple_units,
    window_stream,
    write_classification_csv,
)
from tsdlearn.spikes import SpikeTrain

from oracles import brute_atis, brute_labels, brute_prev, brute_stream, five_case_prev

G, S = IntervalKind.GATI, IntervalKind.SATI
F, M, L = IntervalKind.FITI, IntervalKind.MITI, IntervalKind.LITI


def st(*ts):
    return SpikeTrain(list(ts))


def test_atis_general_and_special():
    tags = classify_atis(st(5, 12, 25, 28), st(10, 20, 30, 40))
    assert [t.kind for t in tags] == [G, S, S, G]
    assert [(t.start, t.end) for t in tags] == [(0, 5), (5, 12), (12, 25), (25, 28)]


def test_spike_on_desired_closes_its_dti():
    assert dti_index(10.0, st(10, 20)) == 0
    assert dti_index(10.1, st(10, 20)) == 1
    assert [t.kind for t in classify_atis(st(5, 10), st(10, 20))] == [G, G]


def test_input_labels_within_one_dti():
    labels = label_input_spikes(st(11, 15, 19), st(13, 17), st(10, 20))
    assert [k for _, k in labels] == [F, M, L]


def test_input_labels_without_actual_spikes_are_first():
    labels = label_input_spikes(st(1, 2, 3), SpikeTrain(), st(5))
    assert [k for _, k in labels] == [F, F, F]


def test_inputs_after_last_output_are_skipped():
    assert [t for t, _ in label_input_spikes(st(1, 8), st(4), st(5))] == [1.0]
    assert label_input_spikes(st(1), SpikeTrain(), SpikeTrain()) == []


@pytest.mark.parametrize("desired, actual, t_cur, expected", [
    (st(10, 30), st(15, 25), 25.0, 15.0),
    (st(10), st(5), 5.0, 0.0),
    (st(10, 30), SpikeTrain(), 30.0, 10.0),
])
def test_prev_boundary(desired, actual, t_cur, expected):
    assert resolve_prev_boundary(t_cur, actual, desired) == expected


def test_labels_dti_without_actual_and_no_inputs():
    assert [k for _, k in label_input_spikes(st(12, 14), st(5), st(10, 20))] == [F, F]
    assert label_input_spikes(SpikeTrain(), st(5), st(10)) == []


def test_prev_boundary_requires_output_time():
    with pytest.raises(ValueError):
        resolve_prev_boundary(7.0, st(5), st(10))


def test_window_is_half_open():
    inp = st(10, 12, 15, 20, 21)
    assert select_window(10.0, 20.0, inp) == [12.0, 15.0, 20.0]
    assert select_window(0.0, 10.0, inp) == [10.0]
    assert select_window(0.0, 5.0, st(0, 3), first=True) == [0.0, 3.0]
    assert select_window(0.0, 5.0, st(0, 3)) == [3.0]
    with pytest.raises(ValueError):
        select_window(5.0, 5.0, inp)


def test_stream_signs_and_windows():
    steps = window_stream(st(1, 6, 11, 16), actual=st(5, 15), desired=st(10, 15))
    assert [(s.t_cur, s.sign, s.t_prev) for s in steps] == [(5, -1, 0), (10, 1, 5), (15, 0, 10)]
    assert [s.window for s in steps] == [[1.0], [6.0], [11.0]]
    units = triple_units(st(1, 6, 11, 16), st(5, 15), st(10, 15))
    assert [(u.t_prev, u.t_in, u.t_cur, u.sign) for u in units] == [
        (0, 1, 5, -1), (5, 6, 10, 1), (10, 11, 15, 0)]


# --- brute-force equivalence on integer ticks -----------------------------


def random_ticks(rng, n_ticks, p):
    return sorted(np.flatnonzero(rng.random(n_ticks + 1) < p).tolist())


def to_train(ticks):
    return SpikeTrain.from_ticks(ticks, 0.1)


def check_instance(rng):
    n_ticks = int(rng.integers(10, 501))  # T <= 50 ms
    a = random_ticks(rng, n_ticks, rng.uniform(0, 0.05))
    d = random_ticks(rng, n_ticks, rng.uniform(0, 0.05))
    inp = random_ticks(rng, n_ticks, rng.uniform(0, 0.1))
    A, D, I = to_train(a), to_train(d), to_train(inp)

    assert [t.kind for t in classify_atis(A, D)] == brute_atis(a, d)
    got = [(round(t * 10), k) for t, k in label_input_spikes(I, A, D)]
    assert got == brute_labels(inp, a, d)
    for t in set(a) | set(d):
        got_prev = round(resolve_prev_boundary(t / 10, A, D) * 10)
        assert got_prev == brute_prev(t, a, d) == five_case_prev(t, a, d)

    steps = window_stream(I, A, D)
    got_steps = [(round(s.t_cur * 10), s.sign, round(s.t_prev * 10), [round(x * 10) for x in s.window])
                 for s in steps]
    assert got_steps == brute_stream(inp, a, d)

    # every input spike up to the last output event is used exactly once
    used = [x for s in got_steps for x in s[3]]
    last = max(a + d, default=-1)
    assert sorted(used) == [x for x in inp if x <= last]
    assert len(set(used)) == len(used)


def test_brute_force_equivalence_sample():
    rng = np.random.default_rng(123)
    for _ in range(500):
        check_instance(rng)


def test_classification_csv(tmp_path):
    atis = classify_atis(st(5, 12), st(10))
    labels = {10: label_input_spikes(st(3, 11), st(5, 12), st(10)),
              2: label_input_spikes(st(3), st(5, 12), st(10))}
    path = tmp_path / "c.csv"
    write_classification_csv(path, atis, labels)
    rows = list(csv.DictReader(open(path)))
    assert [(r["time"], r["tag"], r["synapse"]) for r in rows] == [
        ("3.0", "FITI", "2"), ("3.0", "FITI", "10"), ("5.0", "GATI", ""),
        ("11.0", "FITI", "10"), ("12.0", "SATI", "")]
    assert rows[2]["interval_start"] == "0.0" and rows[2]["interval_end"] == "5.0"
