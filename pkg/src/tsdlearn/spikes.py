"""Spike trains on a discrete time grid, kernels, Poisson sources and the
correlation measure C used to score learning."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TimeGrid",
    "SpikeTrain",
    "KernelSpec",
    "KERNEL_SHAPES",
    "kernel_eval",
    "generate_poisson_train",
    "filter_train",
    "correlation_c",
    "format_train",
    "parse_train",
    "write_trains",
    "read_trains",
]

_GRID_TOL = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    """Simulation grid: step ``dt`` and horizon ``T`` in ms."""

    dt: float = 0.1
    T: float = 200.0

    def __post_init__(self):
        if not self.dt > 0 or not self.T > 0:
            raise ValueError(f"dt and T must be positive, got dt={self.dt}, T={self.T}")
        ratio = self.T / self.dt
        if abs(ratio - round(ratio)) > _GRID_TOL:
            raise ValueError(f"T={self.T} is not a multiple of dt={self.dt}")

    @property
    def n_ticks(self) -> int:
        """Number of steps T/dt (the grid has n_ticks + 1 points)."""
        return int(round(self.T / self.dt))

    def times(self) -> np.ndarray:
        return np.arange(self.n_ticks + 1) * self.dt

    def to_ticks(self, times) -> np.ndarray:
        t = np.asarray(times, dtype=float) / self.dt
        ticks = np.rint(t)
        if t.size and np.max(np.abs(t - ticks)) > _GRID_TOL:
            raise ValueError("spike times are not on the grid")
        return ticks.astype(np.int64)

    def tick_of(self, t: float) -> int:
        return int(self.to_ticks([t])[0])

    def check(self, train: "SpikeTrain") -> None:
        ticks = self.to_ticks(train.times)
        if ticks.size and (ticks[0] < 0 or ticks[-1] > self.n_ticks):
            raise ValueError(f"spike train extends outside [0, {self.T}]")


class SpikeTrain:
    """Strictly increasing spike times in ms.

    Instances are immutable: ``times`` is a read-only float array.
    """

    __slots__ = ("_times",)

    def __init__(self, times: Iterable[float] = ()):
        arr = np.array(list(times) if not isinstance(times, np.ndarray) else times,
                       dtype=float).ravel()
        if arr.size:
            if not np.all(np.isfinite(arr)):
                raise ValueError("spike times must be finite")
            if arr[0] < 0:
                raise ValueError("spike times must be non-negative")
            if np.any(np.diff(arr) <= 0):
                raise ValueError("spike times must be strictly increasing")
        arr.setflags(write=False)
        self._times = arr

    @classmethod
    def from_ticks(cls, ticks, dt: float) -> "SpikeTrain":
        ticks = np.asarray(ticks, dtype=np.int64)
        return cls(np.round(ticks * dt, 10))

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def count(self) -> int:
        return int(self._times.size)

    def __len__(self) -> int:
        return self.count

    def __iter__(self):
        return iter(self._times.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpikeTrain):
            return NotImplemented
        return self._times.shape == other._times.shape and bool(
            np.all(np.abs(self._times - other._times) < 1e-9))

    def __hash__(self):
        return hash(tuple(np.round(self._times, 6).tolist()))

    def __repr__(self) -> str:
        return f"SpikeTrain({self._times.tolist()})"

    def contains(self, t: float, tol: float = 1e-9) -> bool:
        i = np.searchsorted(self._times, t - tol)
        return bool(i < self._times.size and abs(self._times[i] - t) <= tol)


KERNEL_SHAPES = ("laplace", "exponential", "alpha", "gaussian")


@dataclass(frozen=True)
class KernelSpec:
    """Causal learning kernel. ``tau`` in ms."""

    shape: str = "laplace"
    tau: float = 7.0

    def __post_init__(self):
        if self.shape not in KERNEL_SHAPES:
            raise ValueError(f"unknown kernel shape {self.shape!r}; expected one of {KERNEL_SHAPES}")
        if not self.tau > 0:
            raise ValueError("kernel tau must be positive")


def kernel_eval(k: KernelSpec, s):
    """Evaluate kernel ``k`` at lag ``s`` (ms); scalar or array.

    All shapes are causal (zero for s < 0). Laplace and exponential are
    both exp(-s/tau) on s >= 0; alpha is (s/tau) exp(1 - s/tau) with unit
    peak at s = tau; gaussian is the causal half exp(-s^2 / (2 tau^2)).
    """
    s_arr = np.asarray(s, dtype=float)
    pos = np.maximum(s_arr, 0.0)
    if k.shape in ("laplace", "exponential"):
        val = np.exp(-pos / k.tau)
    elif k.shape == "alpha":
        val = (pos / k.tau) * np.exp(1.0 - pos / k.tau)
    else:
        val = np.exp(-pos * pos / (2.0 * k.tau * k.tau))
    out = np.where(s_arr >= 0, val, 0.0)
    return float(out) if out.ndim == 0 else out


def generate_poisson_train(rate: float, grid: TimeGrid, seed: int) -> SpikeTrain:
    """Bernoulli-per-tick Poisson train: each grid point fires with
    probability rate*dt/1000, independently."""
    if rate < 0:
        raise ValueError("rate must be non-negative")
    p = rate * grid.dt / 1000.0
    if p > 1:
        raise ValueError(f"rate {rate} Hz too high for dt={grid.dt} ms (p={p:.3g} > 1)")
    if p == 0:
        return SpikeTrain()
    rng = np.random.default_rng(seed)
    ticks = np.flatnonzero(rng.random(grid.n_ticks + 1) < p)
    return SpikeTrain.from_ticks(ticks, grid.dt)


def filter_train(s: SpikeTrain, sigma: float, grid: TimeGrid) -> np.ndarray:
    """Gaussian-smoothed train sampled on every grid point.

    Each spike contributes exp(-(t - t_f)^2 / (2 sigma^2)), cut off beyond
    4 sigma.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    n = grid.n_ticks + 1
    out = np.zeros(n)
    if not s.count:
        return out
    half = int(math.ceil(4.0 * sigma / grid.dt))
    offsets = np.arange(-half, half + 1)
    bump = np.exp(-((offsets * grid.dt) ** 2) / (2.0 * sigma * sigma))
    for tick in grid.to_ticks(s.times):
        lo, hi = tick - half, tick + half + 1
        a, b = max(lo, 0), min(hi, n)
        out[a:b] += bump[a - lo:b - lo]
    return out


def correlation_c(actual: SpikeTrain, desired: SpikeTrain, sigma: float = 2.0,
                  grid: TimeGrid | None = None) -> float:
    """Cosine similarity of the Gaussian-filtered trains.

    Two empty trains score 1; exactly one empty train scores 0.
    """
    if grid is None:
        raise ValueError("a TimeGrid is required")
    if actual.count == 0 and desired.count == 0:
        return 1.0
    if actual.count == 0 or desired.count == 0:
        return 0.0
    va = filter_train(actual, sigma, grid)
    vd = filter_train(desired, sigma, grid)
    c = float(va @ vd) / (float(np.linalg.norm(va)) * float(np.linalg.norm(vd)))
    return min(max(c, 0.0), 1.0)


def format_train(s: SpikeTrain) -> str:
    return ",".join(f"{t:.1f}" for t in s.times)


def parse_train(line: str) -> SpikeTrain:
    line = line.strip()
    if not line:
        return SpikeTrain()
    return SpikeTrain(float(x) for x in line.split(","))


def write_trains(path, trains: Sequence[SpikeTrain]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in trains:
            fh.write(format_train(s) + "\n")


def read_trains(path) -> list[SpikeTrain]:
    with open(path, encoding="utf-8") as fh:
        return [parse_train(line) for line in fh.read().splitlines()]
