"""Spike Response Model output neuron driven by a layer of input trains.

Membrane potential at grid time t::

    u(t) = sum_i w_i sum_f eps(t - t_i^f) + sum_g rho(t - t_out^g)

    eps(s) = (s / tau) exp(1 - s / tau)               s > 0   (unit peak at s = tau)
    rho(s) = -refr_scale * threshold * exp(-s / tau_R)  s > 0

The neuron fires when u(t) >= threshold and at least ``t_abs`` has elapsed
since its last spike.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .spikes import SpikeTrain, TimeGrid

__all__ = [
    "SrmParams",
    "Network",
    "OutputEvent",
    "SimTrace",
    "InputDrive",
    "psp_kernel",
    "refractory_kernel",
    "simulate",
    "potential_at",
    "write_potential_csv",
]


@dataclass(frozen=True)
class SrmParams:
    tau_psp: float = 7.0
    tau_refr: float = 80.0
    t_abs: float = 1.0
    threshold: float = 1.0
    refr_scale: float = 2.0

    def __post_init__(self):
        for name in ("tau_psp", "tau_refr", "t_abs", "threshold", "refr_scale"):
            if not getattr(self, name) > 0:
                raise ValueError(f"SrmParams.{name} must be positive")


def psp_kernel(s, tau: float):
    s = np.asarray(s, dtype=float)
    pos = np.maximum(s, 0.0)
    out = np.where(s > 0, (pos / tau) * np.exp(1.0 - pos / tau), 0.0)
    return float(out) if out.ndim == 0 else out


def refractory_kernel(s, p: SrmParams):
    s = np.asarray(s, dtype=float)
    pos = np.maximum(s, 0.0)
    out = np.where(s > 0, -p.refr_scale * p.threshold * np.exp(-pos / p.tau_refr), 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass
class Network:
    """Input layer fully connected to one SRM output neuron.

    ``weights`` (mV) is a mutable float array; online learning rules update
    it in place between ticks. ``w_min``/``w_max`` are an optional clamp
    applied by :meth:`clamp`.
    """

    weights: np.ndarray
    params: SrmParams = field(default_factory=SrmParams)
    w_min: Optional[float] = None
    w_max: Optional[float] = None

    def __post_init__(self):
        self.weights = np.array(self.weights, dtype=float).ravel()
        if self.weights.size < 1:
            raise ValueError("network needs at least one input")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")

    @property
    def n_inputs(self) -> int:
        return int(self.weights.size)

    def clamp(self) -> None:
        if self.w_min is not None or self.w_max is not None:
            np.clip(self.weights, self.w_min, self.w_max, out=self.weights)

    def copy(self) -> "Network":
        return Network(self.weights.copy(), self.params, self.w_min, self.w_max)


@dataclass(frozen=True)
class OutputEvent:
    """A tick holding an actual and/or desired output spike."""

    tick: int
    time: float
    actual: bool
    desired: bool


@dataclass
class SimTrace:
    output: SpikeTrain
    potential: Optional[np.ndarray] = None


class InputDrive:
    """Input trains pre-convolved with the PSP kernel on a fixed grid.

    ``psp[k, i]`` is sum_f eps(k*dt - t_i^f). Building this once lets many
    epochs over the same inputs reuse it.
    """

    def __init__(self, inputs: Sequence[SpikeTrain], grid: TimeGrid, params: SrmParams):
        self.grid = grid
        self.params = params
        self.trains = list(inputs)
        n, K = len(self.trains), grid.n_ticks
        eps = psp_kernel(np.arange(K + 1) * grid.dt, params.tau_psp)
        by_syn = np.zeros((n, K + 1))
        ticks_all, syn_all = [], []
        self.ticks = []
        for i, s in enumerate(self.trains):
            grid.check(s)
            ticks = grid.to_ticks(s.times)
            self.ticks.append(ticks)
            for tk in ticks:
                by_syn[i, tk:] += eps[:K + 1 - tk]
            ticks_all.append(ticks)
            syn_all.append(np.full(ticks.size, i, dtype=np.int64))
        self.psp = np.ascontiguousarray(by_syn.T)
        flat_t = np.concatenate(ticks_all) if ticks_all else np.empty(0, np.int64)
        flat_s = np.concatenate(syn_all) if syn_all else np.empty(0, np.int64)
        order = np.argsort(flat_t, kind="stable")
        # every input spike, sorted by time, with its synapse index
        self.spike_ticks = flat_t[order]
        self.spike_syn = flat_s[order]

    @property
    def n_inputs(self) -> int:
        return len(self.trains)


_CHUNK = 200

HookFn = Callable[[OutputEvent, Network], None]


def simulate(net: Network, inputs: Union[Sequence[SpikeTrain], InputDrive], grid: TimeGrid,
             online_hook: Optional[HookFn] = None, desired: Optional[SpikeTrain] = None,
             record_potential: bool = False) -> SimTrace:
    """Run the output neuron over the grid.

    If ``online_hook`` is given it is called as ``hook(event, net)`` at every
    tick with an actual spike or a spike of ``desired``; changes it makes to
    ``net.weights`` take effect from the next tick on.
    """
    drive = inputs if isinstance(inputs, InputDrive) else InputDrive(inputs, grid, net.params)
    if drive.n_inputs != net.n_inputs:
        raise ValueError(f"network has {net.n_inputs} inputs but {drive.n_inputs} trains were given")
    if drive.grid != grid:
        raise ValueError("input drive was built for a different grid")
    p = net.params
    K, dt = grid.n_ticks, grid.dt
    abs_ticks = int(np.ceil(p.t_abs / dt - 1e-9))
    refr_decay = dt / p.tau_refr
    refr_amp = -p.refr_scale * p.threshold

    if desired is not None:
        grid.check(desired)
        dticks = grid.to_ticks(desired.times)
    else:
        dticks = np.empty(0, dtype=np.int64)
    if online_hook is None:
        dticks = np.empty(0, dtype=np.int64)
    nd = dticks.size

    potential = np.empty(K + 1) if record_potential else None
    out_ticks: list[int] = []
    # refractory sum at the last output spike: sum_g exp(-(last - g) dt / tau_R)
    refr_sum = 0.0
    psp = drive.psp
    k, di = 0, 0
    while k <= K:
        while di < nd and dticks[di] < k:
            di += 1
        end = int(dticks[di]) if di < nd else K
        fired = False
        s = k
        while s <= end:
            e = min(end, s + _CHUNK - 1)
            u = psp[s:e + 1] @ net.weights
            if out_ticks:
                last = out_ticks[-1]
                lags = np.arange(s - last, e + 1 - last)
                u += refr_amp * refr_sum * np.exp(-lags * refr_decay)
                ok = (u >= p.threshold) & (lags >= abs_ticks)
            else:
                ok = u >= p.threshold
            hits = np.flatnonzero(ok)
            if hits.size:
                fired = True
                ev = s + int(hits[0])
                if potential is not None:
                    potential[s:ev + 1] = u[:ev - s + 1]
                break
            if potential is not None:
                potential[s:e + 1] = u
            s = e + 1
        if not fired:
            ev = end
        if fired:
            if out_ticks:
                refr_sum = 1.0 + refr_sum * np.exp(-(ev - out_ticks[-1]) * refr_decay)
            else:
                refr_sum = 1.0
            out_ticks.append(ev)
        is_desired = di < nd and dticks[di] == ev
        if online_hook is not None and (fired or is_desired):
            online_hook(OutputEvent(ev, round(ev * dt, 10), fired, bool(is_desired)), net)
        k = ev + 1
    return SimTrace(SpikeTrain.from_ticks(out_ticks, dt), potential)


def potential_at(net: Network, inputs: Sequence[SpikeTrain], t: float,
                 past_outputs: SpikeTrain) -> float:
    """Membrane potential at time ``t`` given an output history, by direct
    summation of the kernels."""
    p = net.params
    u = 0.0
    for w, s in zip(net.weights, inputs):
        if s.count:
            u += w * float(np.sum(psp_kernel(t - s.times, p.tau_psp)))
    if past_outputs.count:
        u += float(np.sum(refractory_kernel(t - past_outputs.times, p)))
    return u


def write_potential_csv(path, trace: SimTrace, grid: TimeGrid) -> None:
    if trace.potential is None:
        raise ValueError("trace has no recorded potential")
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["tick", "mV"])
        for k, v in enumerate(trace.potential):
            wr.writerow([k, f"{v:.9g}"])
