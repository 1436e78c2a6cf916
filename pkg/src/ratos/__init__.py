"""1-D double-lambda EIT simulator.

Two engines share one set of domain types: an analytic dark-state-polariton
engine (:mod:`ratos.polariton`) and a first-principles weak-probe
Maxwell-Bloch solver (:mod:`ratos.mbsolver`).  Experiment protocols
(:mod:`ratos.protocols`) build control schedules for slow light, light
storage, cross-retrieval, adiabatic frequency conversion (RATOS), optically
controlled beam splitting, and CW four-wave mixing; :mod:`ratos.analysis`
provides the pulse metrics and least-squares fits the protocols report.
"""

from .analysis import FitResult, PulseMetrics, linear_fit, metrics, ratos_energy_fit
from .config import ConfigDoc, load_config, parse_config
from .io import emit_csv, emit_summary, read_csv
from .mbsolver import (
    AdiabaticityReport,
    AtomicState,
    SolverGrid,
    convergence_check,
    cw_response,
    cw_steady_state,
    integrate,
    storage_roundtrip,
)
from .model import (
    C_LIGHT,
    ControlSchedule,
    MediumParams,
    PowerMap,
    PulseEnvelope,
    TimeGrid,
    Waveform,
    default_medium,
    gaussian_pulse,
    power_to_rabi,
)
from .polariton import (
    LossModel,
    PolaritonState,
    composition,
    group_velocity,
    predict_ratos_energy,
    predict_splitting,
    transport,
)
from .protocols import EXPERIMENT_KINDS, ExperimentResult, ExperimentSpec, run, sweep_delay
from .schedule import ScheduleExpr, build_control_schedule, parse_schedule, pretty_print

__version__ = "0.1.0"

__all__ = [
    "AdiabaticityReport",
    "AtomicState",
    "C_LIGHT",
    "ConfigDoc",
    "ControlSchedule",
    "EXPERIMENT_KINDS",
    "ExperimentResult",
    "ExperimentSpec",
    "FitResult",
    "LossModel",
    "MediumParams",
    "PolaritonState",
    "PowerMap",
    "PulseEnvelope",
    "PulseMetrics",
    "ScheduleExpr",
    "SolverGrid",
    "TimeGrid",
    "Waveform",
    "build_control_schedule",
    "composition",
    "convergence_check",
    "cw_response",
    "cw_steady_state",
    "default_medium",
    "emit_csv",
    "emit_summary",
    "gaussian_pulse",
    "group_velocity",
    "integrate",
    "linear_fit",
    "load_config",
    "metrics",
    "parse_config",
    "parse_schedule",
    "power_to_rabi",
    "predict_ratos_energy",
    "predict_splitting",
    "pretty_print",
    "ratos_energy_fit",
    "read_csv",
    "run",
    "storage_roundtrip",
    "sweep_delay",
    "transport",
    "__version__",
]
