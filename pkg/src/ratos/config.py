"""Experiment config files: line-oriented ``key = value`` sections.

Human units at the boundary, converted here (and only here) to internal SI:
microseconds, milliwatts, MHz (as rate/2pi), kHz, and centimeters in the
medium section.  ``#`` starts a comment.  Unknown sections or keys are
rejected with the offending line number, as are keys that do not apply to
the configured experiment kind.

Sections and keys (* = required):

    [medium]    length(cm)=5, od_1*, od_2*, gamma_e1(MHz)=3, gamma_e2(MHz)=3,
                gamma_gs(kHz)=1, g_ratio=1, delta_1(MHz)=0, delta_2(MHz)=0,
                delta_2ph(kHz)=0
    [signal]    center(us)*, fwhm(us)=0.4, peak(MHz)=0.02
    [control.pump]     k(MHz per sqrt mW)=1, power(mW), schedule(DSL)
    [control.retrieve] k(MHz per sqrt mW)=1, power(mW), schedule(DSL)
    [grid]      t_start(us)=0, t_end(us)*, n_t=4096, n_z=128, scheme=4
    [experiment] kind*, engine=polariton, loss=off, eit_filter=off,
                plus kind-specific keys:
                  ratos:          delta_t(us)*, pump_off(us), rise(us), fall(us)
                  storage:        dark_time(us)*, retrieve_channel=1,
                                  pump_off(us), rise(us), fall(us)
                  cross_retrieval: like storage with retrieve_channel=2
                  beamsplitter:   retrieve_on(us), rise(us), p_ret(mW list)
                  eit_slowlight, cw_fwm: no extra keys

Explicit ``schedule`` expressions are accepted only for the eit_slowlight
and cw_fwm kinds (the other kinds construct their schedules from the scalar
parameters above); ``power`` and ``schedule`` are mutually exclusive within
a control section.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import schedule as scheddsl
from .errors import ConfigError, DomainError, ScheduleSyntaxError
from .model import MediumParams, PowerMap, TimeGrid
from .protocols import EXPERIMENT_KINDS, ExperimentSpec

__all__ = ["ConfigDoc", "load_config", "parse_config", "SWEEPABLE_HINT"]

_US = 1e-6
_MHZ = 2 * np.pi * 1e6
_KHZ = 2 * np.pi * 1e3

_SECTIONS = ("medium", "signal", "control.pump", "control.retrieve", "grid", "experiment")

# key -> (kind, required) where kind tags the converter
_SCHEMA = {
    "medium.length": ("float", False),
    "medium.od_1": ("float", True),
    "medium.od_2": ("float", True),
    "medium.gamma_e1": ("float", False),
    "medium.gamma_e2": ("float", False),
    "medium.gamma_gs": ("float", False),
    "medium.g_ratio": ("float", False),
    "medium.delta_1": ("float", False),
    "medium.delta_2": ("float", False),
    "medium.delta_2ph": ("float", False),
    "signal.center": ("float", True),
    "signal.fwhm": ("float", False),
    "signal.peak": ("float", False),
    "control.pump.k": ("float", False),
    "control.pump.power": ("float", False),
    "control.pump.schedule": ("schedule", False),
    "control.retrieve.k": ("float", False),
    "control.retrieve.power": ("float", False),
    "control.retrieve.schedule": ("schedule", False),
    "grid.t_start": ("float", False),
    "grid.t_end": ("float", True),
    "grid.n_t": ("int", False),
    "grid.n_z": ("int", False),
    "grid.scheme": ("int", False),
    "experiment.kind": ("str", True),
    "experiment.engine": ("str", False),
    "experiment.loss": ("onoff", False),
    "experiment.eit_filter": ("str", False),
    "experiment.delta_t": ("float", False),
    "experiment.pump_off": ("float", False),
    "experiment.rise": ("float", False),
    "experiment.fall": ("float", False),
    "experiment.dark_time": ("float", False),
    "experiment.retrieve_channel": ("int", False),
    "experiment.retrieve_on": ("float", False),
    "experiment.p_ret": ("floatlist", False),
}

_KIND_KEYS = {
    "eit_slowlight": set(),
    "storage": {"dark_time", "retrieve_channel", "pump_off", "rise", "fall"},
    "cross_retrieval": {"dark_time", "retrieve_channel", "pump_off", "rise", "fall"},
    "ratos": {"delta_t", "pump_off", "rise", "fall"},
    "beamsplitter": {"retrieve_on", "rise", "p_ret"},
    "cw_fwm": set(),
}
_COMMON_EXPERIMENT_KEYS = {"kind", "engine", "loss", "eit_filter"}

SWEEPABLE_HINT = "numeric keys such as control.retrieve.power or experiment.delta_t"


@dataclass(frozen=True)
class ConfigDoc:
    """Parsed config: resolved surface entries plus the validated spec."""

    entries: dict
    spec: ExperimentSpec


def _convert(full_key: str, raw: str, line: int):
    kind = _SCHEMA[full_key][0]
    if kind == "str":
        return raw
    if kind == "onoff":
        low = raw.lower()
        if low in ("on", "true", "yes", "1"):
            return True
        if low in ("off", "false", "no", "0"):
            return False
        raise ConfigError(f"key {full_key} expects on/off, got {raw!r}", line)
    if kind == "schedule":
        try:
            return scheddsl.parse_schedule(raw)
        except (ScheduleSyntaxError, DomainError) as exc:
            raise ConfigError(f"invalid schedule for {full_key}: {exc}", line) from exc
    if kind == "floatlist":
        try:
            vals = tuple(float(v) for v in raw.split(","))
        except ValueError:
            raise ConfigError(f"key {full_key} expects a comma-separated number list", line)
        return vals
    try:
        if kind == "int":
            return int(raw)
        val = float(raw)
    except ValueError:
        raise ConfigError(f"key {full_key} expects a number, got {raw!r}", line)
    if not math.isfinite(val):
        raise ConfigError(f"key {full_key} must be finite", line)
    return val


def _scan(text: str):
    """Yield (section.key, raw value, line number) entries."""
    section = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("unterminated section header", lineno)
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(
                    f"unknown section [{section}] (expected one of "
                    f"{', '.join(_SECTIONS)})",
                    lineno,
                )
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        if section is None:
            raise ConfigError("key outside of any [section]", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        yield f"{section}.{key}", value, lineno


def load_config(text: str, overrides: dict | None = None) -> ConfigDoc:
    """Parse config text (plus optional ``section.key -> value`` overrides)."""
    raw: dict = {}
    lines: dict = {}
    for full_key, value, lineno in _scan(text):
        if full_key not in _SCHEMA:
            raise ConfigError(f"unknown key {full_key}", lineno)
        if full_key in raw:
            raise ConfigError(f"duplicate key {full_key}", lineno)
        raw[full_key] = value
        lines[full_key] = lineno
    for full_key, value in (overrides or {}).items():
        if full_key not in _SCHEMA:
            raise ConfigError(f"unknown key {full_key} (sweepable: {SWEEPABLE_HINT})")
        raw[full_key] = str(value)
        lines[full_key] = 0

    for full_key, (_, required) in _SCHEMA.items():
        if required and full_key not in raw:
            section, key = full_key.rsplit(".", 1)
            raise ConfigError(f"missing key [{section}].{key}")

    vals = {k: _convert(k, v, lines[k]) for k, v in raw.items()}

    kind = vals["experiment.kind"]
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(
            f"unknown experiment kind {kind!r} (expected one of {', '.join(EXPERIMENT_KINDS)})",
            lines["experiment.kind"],
        )
    allowed = _COMMON_EXPERIMENT_KEYS | _KIND_KEYS[kind]
    for full_key in vals:
        section, key = full_key.rsplit(".", 1)
        if section == "experiment" and key not in allowed:
            raise ConfigError(
                f"key [experiment].{key} does not apply to kind {kind!r}", lines[full_key]
            )
        if key == "schedule" and kind not in ("eit_slowlight", "cw_fwm"):
            raise ConfigError(
                f"key [{section}].schedule does not apply to kind {kind!r} "
                "(schedules are built from the kind parameters)",
                lines[full_key],
            )
    for chan in ("control.pump", "control.retrieve"):
        if f"{chan}.power" in vals and f"{chan}.schedule" in vals:
            raise ConfigError(
                f"[{chan}] power and schedule are mutually exclusive", lines[f"{chan}.power"]
            )

    spec = _build_spec(kind, vals)
    entries = dict(sorted(raw.items()))
    return ConfigDoc(entries=entries, spec=spec)


def _build_spec(kind: str, v: dict) -> ExperimentSpec:
    def get(key, default=None):
        return v.get(key, default)

    medium = MediumParams(
        length_L=get("medium.length", 5.0) * 1e-2,
        od_1=v["medium.od_1"],
        od_2=v["medium.od_2"],
        gamma_e1=get("medium.gamma_e1", 3.0) * _MHZ,
        gamma_e2=get("medium.gamma_e2", 3.0) * _MHZ,
        gamma_gs=get("medium.gamma_gs", 1.0) * _KHZ,
        g_ratio=get("medium.g_ratio", 1.0),
        delta_1=get("medium.delta_1", 0.0) * _MHZ,
        delta_2=get("medium.delta_2", 0.0) * _MHZ,
        delta_2ph=get("medium.delta_2ph", 0.0) * _KHZ,
    )
    pmap = PowerMap(
        k_pump=get("control.pump.k", 1.0) * _MHZ,
        k_retrieve=get("control.retrieve.k", 1.0) * _MHZ,
    )
    grid = TimeGrid(
        get("grid.t_start", 0.0) * _US,
        v["grid.t_end"] * _US,
        get("grid.n_t", 4096),
    )

    pump_schedule = get("control.pump.schedule")
    if pump_schedule is None and "control.pump.power" in v:
        pump_power = v["control.pump.power"]
    elif pump_schedule is None:
        raise ConfigError("missing key [control.pump].power (or schedule)")
    else:
        pump_power = 0.0

    def time_key(key):
        val = get(f"experiment.{key}")
        return None if val is None else val * _US

    try:
        spec = ExperimentSpec(
            kind=kind,
            engine=get("experiment.engine", "polariton"),
            medium=medium,
            power_map=pmap,
            signal_center=v["signal.center"] * _US,
            signal_fwhm=get("signal.fwhm", 0.4) * _US,
            signal_peak=get("signal.peak", 0.02) * _MHZ,
            grid=grid,
            n_z=get("grid.n_z", 128),
            scheme=get("grid.scheme", 4),
            pump_power=pump_power,
            retrieve_power=get("control.retrieve.power"),
            rise=get("experiment.rise", 0.2) * _US,
            fall=get("experiment.fall", 0.2) * _US,
            pump_off=time_key("pump_off"),
            delta_t=time_key("delta_t"),
            dark_time=time_key("dark_time"),
            retrieve_channel=get("experiment.retrieve_channel"),
            retrieve_on=time_key("retrieve_on"),
            p_ret=get("experiment.p_ret"),
            loss=get("experiment.loss", False),
            eit_filter=get("experiment.eit_filter", "off"),
            pump_schedule=pump_schedule,
            retrieve_schedule=get("control.retrieve.schedule"),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    return spec


def parse_config(text: str) -> ExperimentSpec:
    """Parse config text into a validated experiment spec."""
    return load_config(text).spec
