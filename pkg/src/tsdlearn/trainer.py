"""Epoch loop, best-C bookkeeping and learning-rate search."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .rules import RuleConfig, TsdRule
from .spikes import SpikeTrain, TimeGrid, correlation_c, generate_poisson_train
from .srm import InputDrive, Network, OutputEvent, SrmParams, simulate

__all__ = [
    "ExperimentConfig",
    "EpochRecord",
    "BestTracker",
    "ExperimentResult",
    "draw_patterns",
    "calibrate_weight_range",
    "initial_network",
    "run_epoch",
    "train",
    "tune_lr",
]

log = logging.getLogger(__name__)

MIN_AVG_GAIN = 1e-5
CONVERGED_TOL = 1e-9


@dataclass(frozen=True)
class ExperimentConfig:
    n_inputs: int = 200
    duration: float = 200.0
    input_rate: float = 100.0
    desired_rate: float = 100.0
    rule: RuleConfig = field(default_factory=TsdRule)
    eta: float = 0.001
    max_epochs: int = 1500
    seed: int = 0
    weight_init: Optional[tuple[float, float]] = None
    sigma_c: float = 2.0
    dt: float = 0.1
    srm: SrmParams = field(default_factory=SrmParams)
    desired_min_isi: float = 1.0
    w_min: Optional[float] = None
    w_max: Optional[float] = None

    def __post_init__(self):
        if self.n_inputs < 1:
            raise ValueError("n_inputs must be >= 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.weight_init is not None and self.weight_init[0] > self.weight_init[1]:
            raise ValueError("weight_init low must not exceed high")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(self.dt, self.duration)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    c_value: float
    n_actual_spikes: int
    weight_l2: float
    weight_delta_l1: float


class BestTracker:
    """Keeps the best C. A later epoch replaces it only if its C is higher
    and the average gain per epoch since the current best exceeds 1e-5."""

    def __init__(self):
        self.best_c: Optional[float] = None
        self.best_epoch: Optional[int] = None

    def update(self, epoch: int, c: float) -> bool:
        if self.best_c is None:
            self.best_c, self.best_epoch = c, epoch
            return True
        if c > self.best_c and (c - self.best_c) / (epoch - self.best_epoch) > MIN_AVG_GAIN:
            self.best_c, self.best_epoch = c, epoch
            return True
        return False


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[EpochRecord]
    best_c: float
    best_epoch: int
    converged: bool
    final_weights: np.ndarray
    weight_range: tuple[float, float]


def _thin(ticks: np.ndarray, min_gap: int) -> np.ndarray:
    if min_gap <= 0 or ticks.size < 2:
        return ticks
    kept = [ticks[0]]
    for t in ticks[1:]:
        if t - kept[-1] >= min_gap:
            kept.append(t)
    return np.asarray(kept, dtype=np.int64)


def draw_patterns(cfg: ExperimentConfig) -> tuple[list[SpikeTrain], SpikeTrain]:
    """Seeded input trains and desired train for one experiment."""
    grid = cfg.grid
    seeds = np.random.SeedSequence(cfg.seed).generate_state(cfg.n_inputs + 1)
    inputs = [generate_poisson_train(cfg.input_rate, grid, int(s)) for s in seeds[:-1]]
    desired = generate_poisson_train(cfg.desired_rate, grid, int(seeds[-1]))
    if cfg.desired_min_isi > 0 and desired.count:
        gap = int(round(cfg.desired_min_isi / grid.dt))
        desired = SpikeTrain.from_ticks(_thin(grid.to_ticks(desired.times), gap), grid.dt)
    return inputs, desired


def _unit_weights(cfg: ExperimentConfig) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
    return rng.random(cfg.n_inputs)


def calibrate_weight_range(cfg: ExperimentConfig, drive: InputDrive, target: int,
                           iters: int = 30) -> tuple[float, float]:
    """Find ``high`` so that weights uniform on (0, high) make the untrained
    neuron emit about ``target`` spikes; bisection on a log scale."""
    u = _unit_weights(cfg)
    grid = cfg.grid
    target = max(int(target), 1)

    def count(high):
        return simulate(Network(u * high, cfg.srm), drive, grid).output.count

    lo, hi = 1e-6, 1.0
    while count(hi) < target and hi < 1e6:
        lo, hi = hi, hi * 10
    for _ in range(iters):
        mid = np.sqrt(lo * hi)
        if count(mid) >= target:
            hi = mid
        else:
            lo = mid
    return 0.0, float(hi)


class _OnlineLearner:
    def __init__(self, rule, drive: InputDrive, events: Optional[list]):
        self.rule = rule
        self.drive = drive
        self.last_tick = None  # no output event yet this epoch
        self.events = events

    def __call__(self, ev: OutputEvent, net: Network) -> None:
        sign = 0 if (ev.actual and ev.desired) else (1 if ev.desired else -1)
        t_prev = self.last_tick
        if self.events is not None:
            dt = self.drive.grid.dt
            self.events.append((ev.time, sign, round((t_prev or 0) * dt, 10)))
        if sign:
            net.weights += self.rule.event_deltas(self.drive, ev.tick, sign, t_prev)
            net.clamp()
        self.last_tick = ev.tick


def run_epoch(net: Network, inputs, desired: SpikeTrain, rule: RuleConfig, grid: TimeGrid,
              events: Optional[list] = None) -> tuple[SpikeTrain, np.ndarray]:
    """One pass over the pattern, updating ``net.weights`` in place.

    Online rules adjust weights at each output event tick; the offline rule
    applies its accumulated delta after the pass. Returns the actual train
    and a copy of the final weights.
    """
    drive = inputs if isinstance(inputs, InputDrive) else InputDrive(inputs, grid, net.params)
    if rule.online:
        hook = _OnlineLearner(rule, drive, events)
        actual = simulate(net, drive, grid, online_hook=hook, desired=desired).output
    else:
        actual = simulate(net, drive, grid).output
        net.weights += rule.epoch_deltas(drive, actual, desired)
        net.clamp()
    return actual, net.weights.copy()


def initial_network(cfg: ExperimentConfig, drive: InputDrive,
                    desired: SpikeTrain) -> tuple[Network, tuple[float, float]]:
    """Seeded uniform weights, on ``cfg.weight_init`` or a calibrated range."""
    if cfg.weight_init is None:
        w_range = calibrate_weight_range(cfg, drive, desired.count)
    else:
        w_range = (float(cfg.weight_init[0]), float(cfg.weight_init[1]))
    weights = w_range[0] + (w_range[1] - w_range[0]) * _unit_weights(cfg)
    return Network(weights, cfg.srm, cfg.w_min, cfg.w_max), w_range


def train(cfg: ExperimentConfig) -> ExperimentResult:
    grid = cfg.grid
    inputs, desired = draw_patterns(cfg)
    drive = InputDrive(inputs, grid, cfg.srm)
    net, w_range = initial_network(cfg, drive, desired)
    rule = cfg.rule.with_eta(cfg.eta)

    records: list[EpochRecord] = []
    best = BestTracker()
    for epoch in range(1, cfg.max_epochs + 1):
        before = net.weights.copy()
        actual, after = run_epoch(net, drive, desired, rule, grid)
        c = correlation_c(actual, desired, cfg.sigma_c, grid)
        records.append(EpochRecord(epoch, c, actual.count, float(np.linalg.norm(after)),
                                   float(np.sum(np.abs(after - before)))))
        best.update(epoch, c)
        if c >= 1.0 - CONVERGED_TOL:
            break
    log.debug("seed=%d eta=%g best_c=%.4f at %d", cfg.seed, cfg.eta, best.best_c, best.best_epoch)
    return ExperimentResult(cfg, records, best.best_c, best.best_epoch,
                            best.best_c >= 1.0 - CONVERGED_TOL, net.weights.copy(), w_range)


def tune_lr(cfg: ExperimentConfig, lr_grid: Sequence[float]) -> tuple[float, ExperimentResult]:
    """Train once per learning rate; keep the highest best C (ties go to
    the smaller rate)."""
    if not len(lr_grid):
        raise ValueError("lr_grid must not be empty")
    best_lr, best_res = None, None
    for lr in sorted(lr_grid):
        res = train(replace(cfg, eta=float(lr)))
        if best_res is None or res.best_c > best_res.best_c:
            best_lr, best_res = float(lr), res
    return best_lr, best_res
