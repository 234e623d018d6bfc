"""Weight-update rules.

Scalar functions (``tsd_update``, ``offline_wh_epoch``, ``stdp_pair``,
``tstdp_triplet``, ``resume_update``) work on spike times in ms. The
``*Rule`` classes wrap them for the trainer: they compute a whole
per-synapse delta vector from an :class:`~tsdlearn.srm.InputDrive` at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, Optional, Sequence, Union

import numpy as np

from .spikes import KernelSpec, SpikeTrain, kernel_eval

__all__ = [
    "TsdParams",
    "StdpParams",
    "TstdpParams",
    "ResumeParams",
    "alpha_sign",
    "tsd_update",
    "offline_wh_epoch",
    "stdp_pair",
    "tstdp_triplet",
    "resume_update",
    "TsdRule",
    "OfflineWhRule",
    "ResumeRule",
    "StdpRule",
    "TstdpRule",
    "RuleConfig",
    "RULES",
    "make_rule",
]

_TOL = 1e-9


@dataclass(frozen=True)
class TsdParams:
    eta: float = 0.001
    kernel: KernelSpec = field(default_factory=KernelSpec)
    tau_y: float = 7.0  # dimensionless: scales the previous gap t_in - t_prev
    denom_floor: float = 0.1

    def __post_init__(self):
        if not self.tau_y > 0:
            raise ValueError("tau_y must be positive")
        if not self.denom_floor > 0:
            raise ValueError("denom_floor must be positive")


@dataclass(frozen=True)
class StdpParams:
    a_plus: float = 1.0
    a_minus: float = 1.0
    tau_plus: float = 7.0
    tau_minus: float = 7.0

    def __post_init__(self):
        if not (self.tau_plus > 0 and self.tau_minus > 0):
            raise ValueError("STDP time constants must be positive")


@dataclass(frozen=True)
class TstdpParams:
    pair: StdpParams = field(default_factory=StdpParams)
    a2_plus: float = 0.0
    a2_minus: float = 0.0
    a3_plus: float = 1.0
    a3_minus: float = 0.0
    tau_y: float = 7.0  # ms

    def __post_init__(self):
        if not self.tau_y > 0:
            raise ValueError("tau_y must be positive")


@dataclass(frozen=True)
class ResumeParams:
    eta: float = 0.001
    a_non_hebbian: float = 0.0
    tau_learn: float = 7.0

    def __post_init__(self):
        if not self.tau_learn > 0:
            raise ValueError("tau_learn must be positive")


def alpha_sign(t: float, desired: SpikeTrain, actual: SpikeTrain) -> int:
    in_d, in_a = desired.contains(t), actual.contains(t)
    if not (in_d or in_a):
        raise ValueError(f"t={t} is not a desired or actual spike time")
    if in_d and in_a:
        return 0
    return 1 if in_d else -1


def _triplet_factor(lag, gap, tau_y, floor):
    return np.exp(-lag / (tau_y * np.maximum(gap, floor)))


def tsd_update(t_cur: float, sign: int, t_prev: float, window_inputs: Sequence[float],
               p: TsdParams) -> float:
    """Triple-spike-driven delta for one synapse at one output event.

    Each input spike t_in in (t_prev, t_cur] contributes
    kernel(t_cur - t_in) * exp(-(t_cur - t_in) / (tau_y * (t_in - t_prev))).
    """
    t_in = np.asarray(window_inputs, dtype=float)
    if not t_in.size:
        return 0.0
    lo_ok = t_in >= -_TOL if t_prev == 0 else t_in > t_prev + _TOL
    if not np.all(lo_ok) or np.any(t_in > t_cur + _TOL):
        raise ValueError("window input outside (t_prev, t_cur]")
    lag = np.maximum(t_cur - t_in, 0.0)
    vals = kernel_eval(p.kernel, lag) * _triplet_factor(lag, t_in - t_prev, p.tau_y, p.denom_floor)
    return float(p.eta * sign * np.sum(vals))


def _first_at_or_after(train_times: np.ndarray, t: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(train_times, t - _TOL, side="left")
    out = np.full(t.shape, np.inf)
    ok = idx < train_times.size
    out[ok] = train_times[idx[ok]]
    return out


def _offline_terms(t_in: np.ndarray, actual: SpikeTrain, desired: SpikeTrain,
                   kernel: KernelSpec) -> np.ndarray:
    td = _first_at_or_after(desired.times, t_in)
    ta = _first_at_or_after(actual.times, t_in)
    # partners sit at or after t_in by construction; clamp away roundoff
    kd = np.where(np.isfinite(td), kernel_eval(kernel, np.where(np.isfinite(td), np.maximum(td - t_in, 0.0), 0.0)), 0.0)
    ka = np.where(np.isfinite(ta), kernel_eval(kernel, np.where(np.isfinite(ta), np.maximum(ta - t_in, 0.0), 0.0)), 0.0)
    return kd - ka


def offline_wh_epoch(input: SpikeTrain, actual: SpikeTrain, desired: SpikeTrain,
                     kernel: KernelSpec, eta: float) -> float:
    """Widrow-Hoff style delta for one synapse from complete trains.

    Every input spike is paired with the first desired and the first actual
    spike at or after it; a missing partner counts as infinitely far away.
    """
    if not input.count:
        return 0.0
    return float(eta * np.sum(_offline_terms(input.times, actual, desired, kernel)))


def stdp_pair(delta_t: float, p: StdpParams) -> float:
    """Pair STDP with delta_t = t_post - t_pre; depression is negative."""
    if delta_t > 0:
        return p.a_plus * math.exp(-delta_t / p.tau_plus)
    return -p.a_minus * math.exp(delta_t / p.tau_minus)


def tstdp_triplet(dt1: float, dt2_or_dt3: float, branch: str, p: TstdpParams) -> float:
    """Triplet STDP. ``dt1`` is the pre/post lag; ``dt2_or_dt3`` is the
    post-post gap (potentiation) or pre-pre gap (depression)."""
    if dt2_or_dt3 < 0:
        raise ValueError("triplet gap must be non-negative")
    if branch == "potentiation":
        pair = p.pair.a_plus * math.exp(-dt1 / p.pair.tau_plus)
        return pair * (p.a2_plus + p.a3_plus * math.exp(-dt2_or_dt3 / p.tau_y))
    if branch == "depression":
        pair = -p.pair.a_minus * math.exp(-abs(dt1) / p.pair.tau_minus)
        return pair * (p.a2_minus + p.a3_minus * math.exp(-dt2_or_dt3 / p.tau_y))
    raise ValueError(f"unknown branch {branch!r}")


def resume_update(t_cur: float, sign: int, input: SpikeTrain, p: ResumeParams) -> float:
    """ReSuMe delta: sign * eta * (a + sum over t_in <= t_cur of exp(-(t_cur - t_in)/tau))."""
    ts = input.times[input.times <= t_cur + _TOL]
    hebb = float(np.sum(np.exp(-(t_cur - ts) / p.tau_learn))) if ts.size else 0.0
    return sign * p.eta * (p.a_non_hebbian + hebb)


# --- vectorised rules used by the trainer ---------------------------------


def _window(drive, t_prev_tick: Optional[int], t_cur_tick: int):
    # the first event of an epoch also takes input spikes at t = 0
    if t_prev_tick is None:
        return _window(drive, -1, t_cur_tick)
    lo = np.searchsorted(drive.spike_ticks, t_prev_tick, side="right")
    hi = np.searchsorted(drive.spike_ticks, t_cur_tick, side="right")
    return drive.spike_ticks[lo:hi], drive.spike_syn[lo:hi]


def _per_synapse(drive, syn, vals) -> np.ndarray:
    return np.bincount(syn, weights=vals, minlength=drive.n_inputs)


@dataclass(frozen=True)
class TsdRule:
    name: ClassVar[str] = "tsd"
    online: ClassVar[bool] = True
    params: TsdParams = field(default_factory=TsdParams)

    @property
    def eta(self) -> float:
        return self.params.eta

    def with_eta(self, eta: float) -> "TsdRule":
        return TsdRule(TsdParams(eta, self.params.kernel, self.params.tau_y, self.params.denom_floor))

    def event_deltas(self, drive, t_cur: int, sign: int, t_prev: Optional[int]) -> np.ndarray:
        p = self.params
        ticks, syn = _window(drive, t_prev, t_cur)
        dt = drive.grid.dt
        lag = (t_cur - ticks) * dt
        vals = kernel_eval(p.kernel, lag) * _triplet_factor(lag, (ticks - (t_prev or 0)) * dt,
                                                            p.tau_y, p.denom_floor)
        return p.eta * sign * _per_synapse(drive, syn, vals)


@dataclass(frozen=True)
class OfflineWhRule:
    name: ClassVar[str] = "offline-wh"
    online: ClassVar[bool] = False
    kernel: KernelSpec = field(default_factory=KernelSpec)
    eta: float = 0.001

    def with_eta(self, eta: float) -> "OfflineWhRule":
        return OfflineWhRule(self.kernel, eta)

    def epoch_deltas(self, drive, actual: SpikeTrain, desired: SpikeTrain) -> np.ndarray:
        t_in = np.round(drive.spike_ticks * drive.grid.dt, 10)
        terms = _offline_terms(t_in, actual, desired, self.kernel)
        return self.eta * _per_synapse(drive, drive.spike_syn, terms)


@dataclass(frozen=True)
class ResumeRule:
    name: ClassVar[str] = "resume"
    online: ClassVar[bool] = True
    params: ResumeParams = field(default_factory=ResumeParams)

    @property
    def eta(self) -> float:
        return self.params.eta

    def with_eta(self, eta: float) -> "ResumeRule":
        return ResumeRule(ResumeParams(eta, self.params.a_non_hebbian, self.params.tau_learn))

    def event_deltas(self, drive, t_cur: int, sign: int, t_prev: Optional[int]) -> np.ndarray:
        p = self.params
        hi = np.searchsorted(drive.spike_ticks, t_cur, side="right")
        lag = (t_cur - drive.spike_ticks[:hi]) * drive.grid.dt
        hebb = _per_synapse(drive, drive.spike_syn[:hi], np.exp(-lag / p.tau_learn))
        return sign * p.eta * (p.a_non_hebbian + hebb)


@dataclass(frozen=True)
class StdpRule:
    """Supervised pair STDP: each windowed input spike contributes
    ``stdp_pair(t_cur - t_in)``, signed by the event."""

    name: ClassVar[str] = "stdp"
    online: ClassVar[bool] = True
    params: StdpParams = field(default_factory=StdpParams)
    eta: float = 0.001

    def with_eta(self, eta: float) -> "StdpRule":
        return StdpRule(self.params, eta)

    def event_deltas(self, drive, t_cur: int, sign: int, t_prev: Optional[int]) -> np.ndarray:
        p = self.params
        ticks, syn = _window(drive, t_prev, t_cur)
        lag = (t_cur - ticks) * drive.grid.dt
        vals = np.where(lag > 0, p.a_plus * np.exp(-lag / p.tau_plus), -p.a_minus)
        return self.eta * sign * _per_synapse(drive, syn, vals)


@dataclass(frozen=True)
class TstdpRule:
    """Supervised triplet STDP: potentiation branch over the window, with the
    post-post gap taken as t_cur - t_prev."""

    name: ClassVar[str] = "tstdp"
    online: ClassVar[bool] = True
    params: TstdpParams = field(default_factory=TstdpParams)
    eta: float = 0.001

    def with_eta(self, eta: float) -> "TstdpRule":
        return TstdpRule(self.params, eta)

    def event_deltas(self, drive, t_cur: int, sign: int, t_prev: Optional[int]) -> np.ndarray:
        p = self.params
        ticks, syn = _window(drive, t_prev, t_cur)
        dt = drive.grid.dt
        lag = (t_cur - ticks) * dt
        gap = (t_cur - (t_prev or 0)) * dt
        vals = p.pair.a_plus * np.exp(-lag / p.pair.tau_plus) * (
            p.a2_plus + p.a3_plus * math.exp(-gap / p.tau_y))
        return self.eta * sign * _per_synapse(drive, syn, vals)


RuleConfig = Union[TsdRule, OfflineWhRule, ResumeRule, StdpRule, TstdpRule]
RULES = {cls.name: cls for cls in (TsdRule, OfflineWhRule, ResumeRule, StdpRule, TstdpRule)}


def make_rule(name: str, eta: float | None = None, **kw) -> RuleConfig:
    """Build a rule by identifier with default parameters.

    Keyword overrides: ``tau_plus``, ``tau_y``, ``kernel`` (shape name),
    ``a_non_hebbian``, ``tau_learn``, ``a_plus``, ``a_minus``, ``tau_minus``,
    ``a2_plus``, ``a3_plus``.
    """
    if name not in RULES:
        raise ValueError(f"unknown rule {name!r}; valid: {', '.join(RULES)}")
    kernel = KernelSpec(kw.pop("kernel", "laplace"), kw.pop("tau_plus", 7.0))
    if name == "tsd":
        rule = TsdRule(TsdParams(kernel=kernel, tau_y=kw.pop("tau_y", 7.0),
                                 denom_floor=kw.pop("denom_floor", 0.1)))
    elif name == "offline-wh":
        rule = OfflineWhRule(kernel)
    elif name == "resume":
        rule = ResumeRule(ResumeParams(a_non_hebbian=kw.pop("a_non_hebbian", 0.0),
                                       tau_learn=kw.pop("tau_learn", 7.0)))
    else:
        pair = StdpParams(kw.pop("a_plus", 1.0), kw.pop("a_minus", 1.0),
                          kernel.tau, kw.pop("tau_minus", 7.0))
        if name == "stdp":
            rule = StdpRule(pair)
        else:
            rule = TstdpRule(TstdpParams(pair, a2_plus=kw.pop("a2_plus", 0.0),
                                         a3_plus=kw.pop("a3_plus", 1.0),
                                         tau_y=kw.pop("tau_y", 7.0)))
    if kw:
        raise KeyError(f"unused rule options for {name!r}: {sorted(kw)}")
    return rule.with_eta(eta) if eta is not None else rule
