"""INI configuration files for experiments and sweeps.

Experiment file sections (all keys optional; defaults shown in README)::

    [experiment]  n_inputs, duration, dt, input_rate, desired_rate, preset,
                  desired_min_isi, eta, max_epochs, seed, weight_init,
                  sigma_c, w_min, w_max
    [neuron]      tau_psp, tau_refr, t_abs, threshold, refr_scale
    [rule]        name, kernel, tau_plus, tau_y, denom_floor,
                  a_non_hebbian, tau_learn, a_plus, a_minus, tau_minus,
                  a2_plus, a3_plus

A sweep file adds a ``[sweep]`` section: axis, values, algorithms, repeats,
lr_grid (optional explicit list), lr_points_per_decade, lr_decades,
max_epochs (default 2000 for cells up to 200 ms, else 3000). With
``preset = common`` an input-rate sweep moves the desired rate along with
the input rate; otherwise only the input rate changes.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from typing import Optional

from .rules import RULES, make_rule
from .srm import SrmParams
from .trainer import ExperimentConfig

__all__ = [
    "ConfigError",
    "PRESETS",
    "SweepSpec",
    "load_experiment",
    "load_sweep",
    "parse_experiment",
    "dump_experiment",
    "apply_preset",
]


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


# Reference rates: "common" drives inputs and target at the same rate,
# "different" keeps the target at 100 Hz and lowers the input rate.
PRESETS = {
    "common": {"input_rate": 100.0, "desired_rate": 100.0},
    "different": {"input_rate": 20.0, "desired_rate": 100.0},
}

_RULE_KEYS = {
    "tsd": ("kernel", "tau_plus", "tau_y", "denom_floor"),
    "offline-wh": ("kernel", "tau_plus"),
    "resume": ("a_non_hebbian", "tau_learn"),
    "stdp": ("tau_plus", "a_plus", "a_minus", "tau_minus"),
    "tstdp": ("tau_plus", "a_plus", "a_minus", "tau_minus", "a2_plus", "a3_plus", "tau_y"),
}


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple[float, ...]
    algorithms: tuple[str, ...]
    repeats: int = 10
    base: ExperimentConfig = field(default_factory=ExperimentConfig)
    preset: Optional[str] = None
    rule_options: dict = field(default_factory=dict)
    lr_grid: Optional[tuple[float, ...]] = None
    lr_points_per_decade: int = 8
    lr_decades: float = 2.0
    max_epochs: Optional[int] = None

    def __post_init__(self):
        if self.axis not in ("duration", "input_rate"):
            raise ConfigError(f"sweep axis must be 'duration' or 'input_rate', got {self.axis!r}")
        if not self.values:
            raise ConfigError("sweep needs at least one axis value")
        if not self.algorithms:
            raise ConfigError("sweep needs at least one algorithm")
        bad = [a for a in self.algorithms if a not in RULES]
        if bad:
            raise ConfigError(f"unknown algorithm(s) {bad}; valid ids: {', '.join(RULES)}")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; expected one of {sorted(PRESETS)}")


def apply_preset(cfg: ExperimentConfig, preset: str) -> ExperimentConfig:
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
    return replace(cfg, **PRESETS[preset])


def _read(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return cp


def _num(section, key, conv=float):
    raw = section.get(key)
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section.name}] {key} = {raw!r} is not a valid {conv.__name__}") from exc


def _opt_float(section, key):
    raw = section.get(key, "").strip()
    return None if raw in ("", "none") else _num(section, key)


def parse_experiment(cp: configparser.ConfigParser) -> tuple[ExperimentConfig, dict]:
    """Build an ExperimentConfig; also returns the raw rule options."""
    kw: dict = {}
    if cp.has_section("experiment"):
        sec = cp["experiment"]
        known = {f.name for f in fields(ExperimentConfig)} | {"preset"}
        unknown = set(sec) - known
        if unknown:
            raise ConfigError(f"unknown [experiment] keys: {sorted(unknown)}")
        if "preset" in sec:
            preset = sec["preset"].strip()
            if preset not in PRESETS:
                raise ConfigError(f"unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
            kw.update(PRESETS[preset])
        for key in ("n_inputs", "max_epochs", "seed"):
            if key in sec:
                kw[key] = _num(sec, key, int)
        for key in ("duration", "dt", "input_rate", "desired_rate", "desired_min_isi", "eta", "sigma_c"):
            if key in sec:
                kw[key] = _num(sec, key)
        for key in ("w_min", "w_max"):
            if key in sec:
                kw[key] = _opt_float(sec, key)
        if "weight_init" in sec:
            raw = sec["weight_init"].strip()
            if raw not in ("", "auto"):
                try:
                    lo, hi = (float(x) for x in raw.split(","))
                except ValueError as exc:
                    raise ConfigError(f"weight_init must be 'auto' or 'low, high', got {raw!r}") from exc
                kw["weight_init"] = (lo, hi)
    if cp.has_section("neuron"):
        sec = cp["neuron"]
        names = {f.name for f in fields(SrmParams)}
        unknown = set(sec) - names
        if unknown:
            raise ConfigError(f"unknown [neuron] keys: {sorted(unknown)}")
        try:
            kw["srm"] = SrmParams(**{k: _num(sec, k) for k in sec})
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    rule_opts: dict = {}
    name = "tsd"
    if cp.has_section("rule"):
        sec = cp["rule"]
        name = sec.get("name", "tsd").strip()
        if name not in RULES:
            raise ConfigError(f"unknown rule {name!r}; valid ids: {', '.join(RULES)}")
        all_keys = set().union(*_RULE_KEYS.values()) | {"name"}
        unknown = set(sec) - all_keys
        if unknown:
            raise ConfigError(f"unknown [rule] keys: {sorted(unknown)}")
        rule_opts = {k: (sec[k].strip() if k == "kernel" else _num(sec, k))
                     for k in sec if k != "name"}
    try:
        kw["rule"] = build_rule(name, rule_opts)
        cfg = ExperimentConfig(**kw)
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg, rule_opts


def build_rule(name: str, options: dict):
    """Rule ``name`` with whichever of ``options`` apply to it."""
    return make_rule(name, **{k: v for k, v in options.items() if k in _RULE_KEYS[name]})


def load_experiment(path) -> ExperimentConfig:
    return parse_experiment(_read(path))[0]


def _list(section, key, conv):
    raw = section.get(key, "")
    items = [x.strip() for x in raw.split(",") if x.strip()]
    try:
        return tuple(conv(x) for x in items)
    except ValueError as exc:
        raise ConfigError(f"[sweep] {key} = {raw!r}: {exc}") from exc


def load_sweep(path) -> SweepSpec:
    cp = _read(path)
    if not cp.has_section("sweep"):
        raise ConfigError(f"{path}: missing [sweep] section")
    base, rule_opts = parse_experiment(cp)
    sec = cp["sweep"]
    preset = cp.get("experiment", "preset", fallback="").strip() or None
    lr_grid = _list(sec, "lr_grid", float) or None
    return SweepSpec(
        axis=sec.get("axis", "duration").strip(),
        values=_list(sec, "values", float),
        algorithms=_list(sec, "algorithms", str),
        repeats=_num(sec, "repeats", int) if "repeats" in sec else 10,
        base=base,
        preset=preset,
        rule_options=rule_opts,
        lr_grid=lr_grid,
        lr_points_per_decade=_num(sec, "lr_points_per_decade", int) if "lr_points_per_decade" in sec else 8,
        lr_decades=_num(sec, "lr_decades") if "lr_decades" in sec else 2.0,
        max_epochs=_num(sec, "max_epochs", int) if "max_epochs" in sec else None,
    )


def dump_experiment(cfg: ExperimentConfig) -> str:
    """INI text that ``load_experiment`` reads back to an equal config."""
    cp = configparser.ConfigParser()
    wi = "auto" if cfg.weight_init is None else f"{cfg.weight_init[0]!r}, {cfg.weight_init[1]!r}"
    cp["experiment"] = {
        "n_inputs": str(cfg.n_inputs), "duration": repr(cfg.duration), "dt": repr(cfg.dt),
        "input_rate": repr(cfg.input_rate), "desired_rate": repr(cfg.desired_rate),
        "desired_min_isi": repr(cfg.desired_min_isi), "eta": repr(cfg.eta),
        "max_epochs": str(cfg.max_epochs), "seed": str(cfg.seed), "weight_init": wi,
        "sigma_c": repr(cfg.sigma_c),
        "w_min": "none" if cfg.w_min is None else repr(cfg.w_min),
        "w_max": "none" if cfg.w_max is None else repr(cfg.w_max),
    }
    cp["neuron"] = {f.name: repr(getattr(cfg.srm, f.name)) for f in fields(SrmParams)}
    cp["rule"] = {"name": cfg.rule.name, **_rule_dump(cfg.rule)}
    lines = []
    for sec in cp.sections():
        lines.append(f"[{sec}]")
        lines.extend(f"{k} = {v}" for k, v in cp[sec].items())
        lines.append("")
    return "\n".join(lines)


def _rule_dump(rule) -> dict:
    name = rule.name
    if name == "tsd":
        p = rule.params
        return {"kernel": p.kernel.shape, "tau_plus": repr(p.kernel.tau),
                "tau_y": repr(p.tau_y), "denom_floor": repr(p.denom_floor)}
    if name == "offline-wh":
        return {"kernel": rule.kernel.shape, "tau_plus": repr(rule.kernel.tau)}
    if name == "resume":
        return {"a_non_hebbian": repr(rule.params.a_non_hebbian),
                "tau_learn": repr(rule.params.tau_learn)}
    pair = rule.params if name == "stdp" else rule.params.pair
    out = {"tau_plus": repr(pair.tau_plus), "a_plus": repr(pair.a_plus),
           "a_minus": repr(pair.a_minus), "tau_minus": repr(pair.tau_minus)}
    if name == "tstdp":
        out.update(a2_plus=repr(rule.params.a2_plus), a3_plus=repr(rule.params.a3_plus),
                   tau_y=repr(rule.params.tau_y))
    return out
