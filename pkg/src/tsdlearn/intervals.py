"""Interval taxonomy over desired/actual/input trains and the pair-spike
window selection used by the online rules.

A desired time interval (DTI) runs between consecutive desired spikes, the
first one starting at 0. A time ``t`` belongs to DTI number ``#{t_d < t}``,
so a spike sitting exactly on a desired spike closes that DTI. Actual time
intervals (ATIs) are split the same way on the actual train; an ATI is
general (GATI) when both its endpoints share a DTI and special (SATI)
otherwise.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .spikes import SpikeTrain

__all__ = [
    "IntervalKind",
    "IntervalTag",
    "TripleUnit",
    "OutputStep",
    "dti_index",
    "classify_atis",
    "label_input_spikes",
    "resolve_prev_boundary",
    "select_window",
    "window_stream",
    "triple_units",
    "write_classification_csv",
]

_TOL = 1e-9


class IntervalKind(str, Enum):
    DTI = "DTI"
    ATI = "ATI"
    GATI = "GATI"
    SATI = "SATI"
    FITI = "FITI"
    MITI = "MITI"
    LITI = "LITI"


class IntervalTag(NamedTuple):
    start: float
    end: float
    kind: IntervalKind


@dataclass(frozen=True)
class TripleUnit:
    """Previous output boundary, an input spike, and the output event it
    is paired with. ``sign`` is +1 for a desired-only event, -1 for an
    actual-only event, 0 when both coincide."""

    t_prev: float
    t_in: float
    t_cur: float
    sign: int


class OutputStep(NamedTuple):
    t_cur: float
    sign: int
    t_prev: float
    window: list


def dti_index(t: float, desired: SpikeTrain) -> int:
    return int(np.searchsorted(desired.times, t - _TOL, side="left"))


def classify_atis(actual: SpikeTrain, desired: SpikeTrain) -> list[IntervalTag]:
    tags = []
    prev = 0.0
    for t in actual.times:
        same = dti_index(prev, desired) == dti_index(t, desired)
        tags.append(IntervalTag(float(prev), float(t),
                                IntervalKind.GATI if same else IntervalKind.SATI))
        prev = t
    return tags


def label_input_spikes(input: SpikeTrain, actual: SpikeTrain,
                       desired: SpikeTrain) -> list[tuple[float, IntervalKind]]:
    """Tag each input spike FITI/MITI/LITI relative to the actual spikes of
    its DTI. A DTI without actual spikes tags everything FITI. Input spikes
    later than every output spike are left out."""
    if not input.count:
        return []
    ends = [x.times[-1] for x in (actual, desired) if x.count]
    if not ends:
        return []
    horizon = max(ends)
    a_dti = np.array([dti_index(t, desired) for t in actual.times], dtype=int)
    out = []
    for t in input.times:
        if t > horizon + _TOL:
            break
        mine = actual.times[a_dti == dti_index(t, desired)]
        if not mine.size or t <= mine[0] + _TOL:
            kind = IntervalKind.FITI
        elif t <= mine[-1] + _TOL:
            kind = IntervalKind.MITI
        else:
            kind = IntervalKind.LITI
        out.append((float(t), kind))
    return out


def _latest_before(train: SpikeTrain, t: float):
    i = int(np.searchsorted(train.times, t - _TOL, side="left"))
    return float(train.times[i - 1]) if i > 0 else None


def resolve_prev_boundary(t_cur: float, actual: SpikeTrain, desired: SpikeTrain) -> float:
    """Latest output spike of either train strictly before ``t_cur``, else 0."""
    if not (actual.contains(t_cur) or desired.contains(t_cur)):
        raise ValueError(f"t_cur={t_cur} is not an actual or desired spike time")
    cands = [x for x in (_latest_before(actual, t_cur), _latest_before(desired, t_cur))
             if x is not None]
    return max(cands) if cands else 0.0


def select_window(t_prev: float, t_cur: float, input: SpikeTrain,
                  first: bool = False) -> list[float]:
    """Input spikes in the half-open window (t_prev, t_cur]. The first
    window of an epoch is closed, [0, t_cur], so a spike at t = 0 is used."""
    if first:
        t_prev = -1.0
    if not t_prev < t_cur:
        raise ValueError("t_prev must precede t_cur")
    ts = input.times
    lo = np.searchsorted(ts, t_prev + _TOL, side="left")
    hi = np.searchsorted(ts, t_cur + _TOL, side="left")
    return ts[lo:hi].tolist()


def window_stream(input: SpikeTrain, actual: SpikeTrain, desired: SpikeTrain) -> list[OutputStep]:
    """One step per output event (union of both trains, in time order)."""
    events = np.union1d(np.round(actual.times, 9), np.round(desired.times, 9))
    steps = []
    prev = 0.0
    for i, t in enumerate(events):
        a, d = actual.contains(t), desired.contains(t)
        sign = 0 if (a and d) else (1 if d else -1)
        window = select_window(prev, t, input, first=(i == 0))
        steps.append(OutputStep(float(t), sign, prev, window))
        prev = float(t)
    return steps


def triple_units(input: SpikeTrain, actual: SpikeTrain, desired: SpikeTrain) -> list[TripleUnit]:
    return [TripleUnit(st.t_prev, t_in, st.t_cur, st.sign)
            for st in window_stream(input, actual, desired) for t_in in st.window]


def write_classification_csv(path, atis: list[IntervalTag],
                             labels: dict[int, list[tuple[float, IntervalKind]]]) -> None:
    """CSV of ATI tags (keyed by the interval end) and per-synapse input
    spike labels, sorted by time."""
    rows = [(tag.end, tag.kind.value, "", f"{tag.start:.1f}", f"{tag.end:.1f}") for tag in atis]
    for syn, items in labels.items():
        rows += [(t, kind.value, str(syn), "", "") for t, kind in items]
    rows.sort(key=lambda r: (r[0], int(r[2]) if r[2] else -1))
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["time", "tag", "synapse", "interval_start", "interval_end"])
        for t, *rest in rows:
            wr.writerow([f"{t:.1f}", *rest])
