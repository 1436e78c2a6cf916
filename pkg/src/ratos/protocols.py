"""Experiment builders mirroring each measurement protocol.

Each experiment kind assembles control schedules from scalar parameters
(through the same primitives the schedule DSL exposes) and runs the chosen
engine:

* ``eit_slowlight``  - pump on, retrieve off: plain slow light
* ``storage``        - pump off after entry, retrieve later on channel 1
* ``cross_retrieval``- store on channel 1, retrieve on channel 2
* ``ratos``          - pump ramps off mid-transit, retrieve ramps on at
  ``pump_off + delta_t``; ``delta_t > 0`` leaves a dark (storage-like) gap,
  ``delta_t <= 0`` overlaps the ramps (adiabatic handover)
* ``beamsplitter``   - pump stays on, retrieve ramps on mid-transit; sweeps
  a retrieve-power list and reports the output energy-ratio series
* ``cw_fwm``         - all three fields CW; steady-state mixing response

Energy normalizations use the slowed-down-pulse reference: the same
experiment with the retrieve off and ground-state decoherence disabled
(entry losses divide out; decoherence shows up as reduced normalized
energy).
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import analysis, mbsolver, polariton, schedule as scheddsl
from .errors import ContainmentWarning, DomainError, ProtocolError
from .model import (
    ControlSchedule,
    MediumParams,
    PowerMap,
    PulseEnvelope,
    TimeGrid,
    Waveform,
    gaussian_pulse,
    power_to_rabi,
)

__all__ = ["ExperimentSpec", "ExperimentResult", "run", "sweep_delay", "EXPERIMENT_KINDS"]

EXPERIMENT_KINDS = (
    "eit_slowlight",
    "storage",
    "cross_retrieval",
    "ratos",
    "beamsplitter",
    "cw_fwm",
)

_US = 1e-6


def _default_grid() -> TimeGrid:
    return TimeGrid(0.0, 12e-6, 4096)


@dataclass(frozen=True)
class ExperimentSpec:
    """Fully validated description of one experiment run."""

    kind: str
    engine: str = "polariton"
    medium: MediumParams = field(default_factory=MediumParams)
    power_map: PowerMap = field(default_factory=PowerMap)

    # input pulse (seconds / rad/s); for cw_fwm the peak is the CW amplitude
    signal_center: float = 2.2e-6
    signal_fwhm: float = 0.4e-6
    signal_peak: float = 2 * np.pi * 0.02e6

    grid: TimeGrid = field(default_factory=_default_grid)
    n_z: int = 128
    scheme: int = 4

    pump_power: float = 4.0  # mW
    retrieve_power: float | None = None  # mW
    rise: float = 0.2e-6  # retrieve turn-on edge (s)
    fall: float = 0.2e-6  # pump turn-off edge (s)

    pump_off: float | None = None  # s; ratos/storage/cross
    delta_t: float | None = None  # s; ratos only
    dark_time: float | None = None  # s; storage/cross
    retrieve_channel: int | None = None  # storage/cross
    retrieve_on: float | None = None  # s; beamsplitter
    p_ret: tuple | None = None  # mW list; beamsplitter sweep

    loss: bool = False
    eit_filter: str = "off"  # off | control-squared | lineshape

    # explicit DSL schedules (eit_slowlight and cw_fwm only)
    pump_schedule: scheddsl.ScheduleExpr | None = None
    retrieve_schedule: scheddsl.ScheduleExpr | None = None

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise DomainError(f"unknown experiment kind {self.kind!r}")
        if self.engine not in ("polariton", "mb"):
            raise DomainError(f"engine must be 'polariton' or 'mb', got {self.engine!r}")
        if self.kind == "cw_fwm" and self.engine != "mb":
            raise DomainError("cw_fwm requires the mb engine")
        if self.pump_power < 0:
            raise DomainError("pump_power must be >= 0")
        if self.retrieve_power is not None and self.retrieve_power < 0:
            raise DomainError("retrieve_power must be >= 0")
        if self.rise <= 0 or self.fall <= 0:
            raise DomainError("ramp edges must be > 0")

        need = {
            "eit_slowlight": (),
            "storage": ("dark_time",),
            "cross_retrieval": ("dark_time",),
            "ratos": ("delta_t",),
            "beamsplitter": (),
            "cw_fwm": (),
        }[self.kind]
        for name in need:
            if getattr(self, name) is None:
                raise DomainError(f"kind {self.kind!r} requires parameter {name!r}")
        if self.kind in ("storage", "cross_retrieval", "ratos", "beamsplitter", "cw_fwm"):
            if self.retrieve_power is None and self.p_ret is None:
                raise DomainError(f"kind {self.kind!r} requires a retrieve power")
        if self.kind in ("storage", "cross_retrieval") and self.dark_time < 0:
            raise DomainError("dark_time must be >= 0")
        if self.p_ret is not None:
            object.__setattr__(self, "p_ret", tuple(float(p) for p in self.p_ret))
            if self.kind != "beamsplitter":
                raise DomainError("p_ret sweep list applies to the beamsplitter kind only")
            if any(p < 0 for p in self.p_ret):
                raise DomainError("p_ret values must be >= 0")
        if self.retrieve_channel is not None and self.retrieve_channel not in (1, 2):
            raise DomainError("retrieve_channel must be 1 or 2")
        if self.eit_filter not in ("off", "control-squared", "lineshape"):
            raise DomainError(f"unknown eit_filter {self.eit_filter!r}")
        if self.pump_schedule is not None and self.kind not in ("eit_slowlight", "cw_fwm"):
            raise DomainError("explicit schedules apply to eit_slowlight/cw_fwm only")

    # derived timing defaults -------------------------------------------------
    @property
    def pump_off_time(self) -> float:
        """Pump turn-off ramp center; defaults to just after full entry."""
        if self.pump_off is not None:
            return self.pump_off
        return self.signal_center + 1.25 * self.signal_fwhm

    @property
    def retrieve_on_time(self) -> float:
        if self.kind == "ratos":
            return self.pump_off_time + self.delta_t
        if self.kind in ("storage", "cross_retrieval"):
            return self.pump_off_time + self.dark_time
        if self.kind == "beamsplitter":
            if self.retrieve_on is not None:
                return self.retrieve_on
            return self.signal_center + 2.0 * self.signal_fwhm
        raise DomainError(f"kind {self.kind!r} has no retrieve turn-on time")

    @property
    def channel(self) -> int:
        if self.retrieve_channel is not None:
            return self.retrieve_channel
        return 2 if self.kind == "cross_retrieval" else 1


@dataclass(frozen=True)
class ExperimentResult:
    """Waveform plus derived scalars (recomputable via :mod:`ratos.analysis`)."""

    waveform: Waveform
    scalars: dict
    report: mbsolver.AdiabaticityReport | None = None
    series: tuple | None = None  # beamsplitter: one scalar map per p_ret


def _expr_const(p_mw: float) -> scheddsl.ScheduleExpr:
    return scheddsl.ScheduleExpr((scheddsl.ConstTerm(p_mw),))


def build_schedules(spec: ExperimentSpec, p_ret: float | None = None):
    """Pump/retrieve power schedules for one run (DSL expressions)."""
    if p_ret is None:
        p_ret = spec.retrieve_power
    p_p = spec.pump_power
    rise_us = spec.rise / _US
    fall_us = spec.fall / _US
    kind = spec.kind

    if kind in ("eit_slowlight", "cw_fwm"):
        pump = spec.pump_schedule or _expr_const(p_p)
        if spec.retrieve_schedule is not None:
            ret = spec.retrieve_schedule
        else:
            ret = _expr_const(p_ret if (p_ret and kind == "cw_fwm") else 0.0)
        return pump, ret

    t_off_us = spec.pump_off_time / _US
    t_on_us = spec.retrieve_on_time / _US

    if kind == "beamsplitter":
        pump = _expr_const(p_p)
        ret = scheddsl.ScheduleExpr((scheddsl.RampOnTerm(t_on_us, rise_us, p_ret),))
        return pump, ret

    # storage-family kinds switch the pump off
    pump_terms = [scheddsl.ConstTerm(p_p), scheddsl.RampOffTerm(t_off_us, fall_us, p_p)]
    if kind == "ratos" or spec.channel == 2:
        ret = scheddsl.ScheduleExpr((scheddsl.RampOnTerm(t_on_us, rise_us, p_ret),))
    else:
        pump_terms.append(scheddsl.RampOnTerm(t_on_us, rise_us, p_ret))
        ret = _expr_const(0.0)
    return scheddsl.ScheduleExpr(tuple(pump_terms)), ret


def _control_schedule(spec: ExperimentSpec, p_ret: float | None = None) -> ControlSchedule:
    pump, ret = build_schedules(spec, p_ret)
    return scheddsl.build_control_schedule(pump, ret, spec.power_map)


def _loss_model(spec: ExperimentSpec) -> polariton.LossModel | None:
    if not spec.loss and spec.eit_filter == "off":
        return None
    mode = spec.eit_filter
    return polariton.LossModel(enabled=True, eit_width_mode=mode)


def _pulse(spec: ExperimentSpec) -> PulseEnvelope:
    return gaussian_pulse(spec.signal_center, spec.signal_fwhm, spec.signal_peak, spec.grid)


def _engine_run(spec: ExperimentSpec, sched: ControlSchedule):
    """One engine invocation: returns (Waveform, report-or-None)."""
    pulse = _pulse(spec)
    medium = spec.medium
    if not spec.loss:
        medium = dataclasses.replace(medium, gamma_gs=0.0)
    if spec.engine == "mb":
        grid = mbsolver.SolverGrid(spec.n_z, spec.grid, spec.scheme)
        waveform, report = mbsolver.integrate(pulse, sched, medium, grid)
        return waveform, report
    waveform = polariton.transport(pulse, sched, medium, _loss_model(spec))
    return waveform, None


def _channel_scalars(waveform: Waveform, prefix: str, channel: int, scalars: dict):
    samples = waveform.e1 if channel == 1 else waveform.e2
    energy = waveform.energy(channel)
    scalars[f"{prefix}_energy"] = energy
    total = waveform.energy(1) + waveform.energy(2)
    if energy > 1e-12 * max(total, 1e-300):
        m = analysis.metrics(samples, waveform.grid)
        scalars[f"{prefix}_peak"] = m.peak_power
        scalars[f"{prefix}_fwhm"] = m.fwhm
        scalars[f"{prefix}_arrival"] = m.arrival_time


def slowed_reference(spec: ExperimentSpec) -> float:
    """Slowed-down-pulse reference energy: retrieve off, decoherence off."""
    ref = dataclasses.replace(
        spec,
        kind="eit_slowlight",
        retrieve_power=None,
        p_ret=None,
        delta_t=None,
        dark_time=None,
        retrieve_channel=None,
        retrieve_on=None,
        loss=False,
        pump_schedule=_expr_const(spec.pump_power),
        retrieve_schedule=None,
    )
    waveform, _ = _engine_run(ref, _control_schedule(ref))
    return waveform.energy(1) + waveform.energy(2)


def _single_run(spec: ExperimentSpec, p_ret: float | None, baseline: float | None):
    sched = _control_schedule(spec, p_ret)
    waveform, report = _engine_run(spec, sched)
    scalars: dict = {}
    _channel_scalars(waveform, "e1", 1, scalars)
    _channel_scalars(waveform, "e2", 2, scalars)
    e1, e2 = scalars["e1_energy"], scalars["e2_energy"]
    scalars["total_energy"] = e1 + e2
    if e1 > 0:
        scalars["energy_ratio"] = e2 / e1
    if baseline is not None and baseline > 0:
        scalars["baseline_energy"] = baseline
        scalars["e1_energy_norm"] = e1 / baseline
        scalars["e2_energy_norm"] = e2 / baseline
        scalars["total_energy_norm"] = (e1 + e2) / baseline
    return waveform, scalars, report


def run(spec: ExperimentSpec) -> ExperimentResult:
    """Run one experiment; deterministic for a fixed spec and engine."""
    if spec.kind == "cw_fwm":
        return _run_cw_fwm(spec)

    if spec.kind == "ratos":
        _check_ratos_validity(spec)

    baseline = None
    if spec.kind != "eit_slowlight":
        baseline = slowed_reference(spec)

    if spec.kind == "beamsplitter" and spec.p_ret is not None:
        series = []
        last = None
        for p in spec.p_ret:
            waveform, scalars, report = _single_run(spec, p, baseline)
            scalars["p_ret"] = p
            series.append(scalars)
            last = (waveform, scalars, report)
        waveform, scalars, report = last
        return ExperimentResult(waveform, scalars, report, tuple(series))

    waveform, scalars, report = _single_run(spec, None, baseline)
    return ExperimentResult(waveform, scalars, report)


def _run_cw_fwm(spec: ExperimentSpec) -> ExperimentResult:
    om1 = power_to_rabi(spec.pump_power, spec.power_map, "pump")
    om2 = power_to_rabi(spec.retrieve_power or 0.0, spec.power_map, "retrieve")
    medium = spec.medium
    if not spec.loss:
        medium = dataclasses.replace(medium, gamma_gs=0.0)
    e1, e2 = mbsolver.cw_response(om1, om2, medium, spec.signal_peak)
    n = spec.grid.n_t
    waveform = Waveform(spec.grid, np.full(n, e1, dtype=complex), np.full(n, e2, dtype=complex))
    scalars = {
        "e1_out_abs": abs(e1),
        "e2_out_abs": abs(e2),
        "e1_out_re": e1.real,
        "e1_out_im": e1.imag,
        "e2_out_re": e2.real,
        "e2_out_im": e2.imag,
        "fwm_conversion": abs(e2) / abs(e1) if abs(e1) > 0 else float("inf"),
    }
    return ExperimentResult(waveform, scalars)


def _check_ratos_validity(spec: ExperimentSpec):
    """The pulse must still be inside the cell when the pump switches off."""
    om_p = power_to_rabi(spec.pump_power, spec.power_map, "pump")
    v1 = polariton.group_velocity(om_p, 0.0, spec.medium)
    if v1 <= 0:
        raise ProtocolError("pump power is zero; nothing enters the cell")
    delay = spec.medium.length_L / v1
    if spec.signal_center + delay < spec.pump_off_time:
        raise ProtocolError(
            "pulse escapes the cell before the pump switches off "
            f"(center exits at {(spec.signal_center + delay) * 1e6:.2f} us, pump off "
            f"{spec.pump_off_time * 1e6:.2f} us)"
        )
    leading_exit = spec.signal_center - 1.5 * spec.signal_fwhm + delay
    if leading_exit < spec.pump_off_time + spec.fall:
        warnings.warn(
            "leading edge of the pulse exits during the pump turn-off",
            ContainmentWarning,
            stacklevel=3,
        )


def sweep_delay(spec: ExperimentSpec, delta_ts) -> list:
    """Arrival time of the converted-pulse peak for each pump-retrieve delay.

    Returns (delta_t, arrival_time) pairs.  For negative delays (retrieve on
    before the pump switches off) the arrival is set by the pulse's own
    propagation; for positive delays retrieval releases stored light, so the
    arrival tracks the retrieve turn-on time one-for-one.
    """
    if spec.kind != "ratos":
        raise DomainError("sweep_delay expects a ratos spec")
    dts = [float(d) for d in delta_ts]
    if not any(d < 0 for d in dts) or not any(d > 0 for d in dts):
        raise DomainError("delta_ts must span negative and positive values")
    out = []
    for d in dts:
        result = run(dataclasses.replace(spec, delta_t=d))
        out.append((d, result.scalars["e2_arrival"]))
    return out
