"""Domain types shared by both engines.

Internal unit conventions (used everywhere past the config boundary):

* time in seconds, rates and Rabi frequencies in rad/s, position in meters
* signal envelopes carry Rabi-frequency units (rad/s), so the propagation
  equations need no extra constants
* laser powers stay in mW; the ``PowerMap`` coefficients ``k`` convert a
  power ``P`` to a control Rabi frequency ``Omega = k * sqrt(P)``

The atomic medium is parameterized by resonant optical depths rather than
atom density: ``od`` is the only combination the 1-D dynamics observably
depend on.  The collective coupling of transition ``j`` is derived, never
stored::

    G_j = sqrt(od_j * gamma_e_j * c / (2 * length_L))      [rad/s]

which fixes the controls-off CW intensity transmission to ``exp(-od_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.constants import c as C_LIGHT

from .errors import DomainError, ResolutionError

__all__ = [
    "C_LIGHT",
    "MediumParams",
    "PowerMap",
    "TimeGrid",
    "ControlSchedule",
    "PulseEnvelope",
    "Waveform",
    "power_to_rabi",
    "gaussian_pulse",
    "default_medium",
]


@dataclass(frozen=True)
class MediumParams:
    """Atomic-medium constants for the double-lambda cell.

    Parameters
    ----------
    length_L : float
        Cell length (m).
    od_1, od_2 : float
        Resonant intensity optical depths of signal transitions 1 and 2.
    gamma_e1, gamma_e2 : float
        Optical-coherence decay rates (rad/s).
    gamma_gs : float
        Ground-state decoherence rate (rad/s).
    g_ratio : float
        Vacuum-Rabi ratio g1/g2 of the two signal transitions.
    delta_1, delta_2 : float
        One-photon detunings (rad/s); resonant by default.
    delta_2ph : float
        Two-photon detuning (rad/s); zero by default.

    Notes
    -----
    The two engines agree only when ``g_ratio`` is consistent with the
    stored optical depths, i.e. ``g_ratio**2 == od_1*gamma_e1/(od_2*gamma_e2)``
    (both ratios measure g1^2/g2^2 for a shared ground-state population).
    ``derived_g_ratio`` exposes the optical-depth value for cross-checks.
    """

    length_L: float = 0.05
    od_1: float = 100.0
    od_2: float = 100.0
    gamma_e1: float = 2 * np.pi * 3.0e6
    gamma_e2: float = 2 * np.pi * 3.0e6
    gamma_gs: float = 2 * np.pi * 1.0e3
    g_ratio: float = 1.0
    delta_1: float = 0.0
    delta_2: float = 0.0
    delta_2ph: float = 0.0

    def __post_init__(self):
        if self.length_L <= 0:
            raise DomainError(f"length_L must be > 0, got {self.length_L}")
        if self.od_1 < 0 or self.od_2 < 0:
            raise DomainError("optical depths must be >= 0")
        if self.gamma_e1 <= 0 or self.gamma_e2 <= 0:
            raise DomainError("excited-coherence decay rates must be > 0")
        if self.gamma_gs < 0:
            raise DomainError("gamma_gs must be >= 0")
        if self.g_ratio <= 0:
            raise DomainError("g_ratio must be > 0")

    @property
    def coupling_1(self) -> float:
        """Collective coupling G_1 = g_1*sqrt(N) (rad/s)."""
        return float(np.sqrt(self.od_1 * self.gamma_e1 * C_LIGHT / (2 * self.length_L)))

    @property
    def coupling_2(self) -> float:
        """Collective coupling G_2 = g_2*sqrt(N) (rad/s)."""
        return float(np.sqrt(self.od_2 * self.gamma_e2 * C_LIGHT / (2 * self.length_L)))

    @property
    def nc(self) -> float:
        """Collective-coupling constant G_1^2 in the (Omega/g1)^2 normalization ((rad/s)^2)."""
        return self.od_1 * self.gamma_e1 * C_LIGHT / (2 * self.length_L)

    @property
    def derived_g_ratio(self) -> float:
        """g1/g2 implied by the optical depths (equals g_ratio for a consistent medium)."""
        return float(np.sqrt((self.od_1 * self.gamma_e1) / (self.od_2 * self.gamma_e2)))


def default_medium(**overrides) -> MediumParams:
    """Desk-scale default medium (od=100, 5-cm cell, 2*pi*3 MHz linewidths)."""
    return MediumParams(**overrides)


@dataclass(frozen=True)
class PowerMap:
    """Laser power to Rabi frequency conversion, Omega = k*sqrt(P).

    ``k_pump`` and ``k_retrieve`` are in rad/s per sqrt(mW).  The absolute
    value is not fixed by any cell property here (it hides the beam waist);
    only power ratios are physically meaningful across a sweep.
    """

    k_pump: float = 2 * np.pi * 1.0e6
    k_retrieve: float = 2 * np.pi * 1.0e6

    def __post_init__(self):
        if self.k_pump <= 0 or self.k_retrieve <= 0:
            raise DomainError("PowerMap coefficients must be > 0")


def power_to_rabi(p: float, pmap: PowerMap, which: str = "pump") -> float:
    """Convert laser power ``p`` (mW) to a Rabi frequency (rad/s).

    ``which`` selects the channel coefficient, "pump" or "retrieve".
    Squaring the result is exactly linear in ``p``.
    """
    if p < 0:
        raise DomainError(f"power must be >= 0, got {p}")
    if which == "pump":
        k = pmap.k_pump
    elif which == "retrieve":
        k = pmap.k_retrieve
    else:
        raise DomainError(f"unknown channel {which!r}, expected 'pump' or 'retrieve'")
    return k * float(np.sqrt(p))


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid: n_t samples spanning [t_start, t_end] (seconds)."""

    t_start: float
    t_end: float
    n_t: int

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise DomainError("t_end must be > t_start")
        if self.n_t < 2:
            raise DomainError("n_t must be >= 2")

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / (self.n_t - 1)

    @property
    def times(self) -> np.ndarray:
        t = np.linspace(self.t_start, self.t_end, self.n_t)
        t.setflags(write=False)
        return t

    def refined(self, factor: int = 2) -> "TimeGrid":
        """Grid with the sample spacing divided by ``factor`` (same span)."""
        return TimeGrid(self.t_start, self.t_end, (self.n_t - 1) * factor + 1)


@dataclass(frozen=True)
class ControlSchedule:
    """Time-dependent control Rabi frequencies Omega_1(t), Omega_2(t).

    ``omega_1`` and ``omega_2`` map an ndarray of times (s) to nonnegative
    Rabi frequencies (rad/s).  Build instances from schedule expressions via
    :func:`ratos.schedule.build_control_schedule`; the callables are expected
    to be vectorized and continuous.
    """

    omega_1: Callable[[np.ndarray], np.ndarray]
    omega_2: Callable[[np.ndarray], np.ndarray]

    def sample(self, grid: TimeGrid) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate both controls on the grid, validating nonnegativity."""
        t = grid.times
        out = []
        for name, fn in (("omega_1", self.omega_1), ("omega_2", self.omega_2)):
            w = np.asarray(fn(t), dtype=float)
            if w.shape != t.shape:
                raise DomainError(f"{name} must return one sample per grid time")
            floor = -1e-9 * max(float(np.max(np.abs(w))), 1.0)
            if np.min(w) < floor:
                raise DomainError(f"{name} is negative at t={t[int(np.argmin(w))]:.3e} s")
            out.append(np.maximum(w, 0.0))
        return out[0], out[1]


@dataclass(frozen=True)
class PulseEnvelope:
    """Complex signal envelope at the cell input (z=0), in rad/s units."""

    grid: TimeGrid
    amp: np.ndarray

    def __post_init__(self):
        amp = np.ascontiguousarray(self.amp, dtype=complex)
        if amp.shape != (self.grid.n_t,):
            raise DomainError("amp must have one sample per grid time")
        amp.setflags(write=False)
        object.__setattr__(self, "amp", amp)

    def energy(self) -> float:
        """Pulse energy sum(|amp|^2 dt) via the trapezoid rule (rad^2/s)."""
        return float(np.trapezoid(np.abs(self.amp) ** 2, dx=self.grid.dt))


@dataclass(frozen=True)
class Waveform:
    """Output envelopes of the signal (e1) and Ratos (e2) modes at z=L."""

    grid: TimeGrid
    e1: np.ndarray
    e2: np.ndarray

    def __post_init__(self):
        for name in ("e1", "e2"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=complex)
            if arr.shape != (self.grid.n_t,):
                raise DomainError(f"{name} must have one sample per grid time")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def power(self, channel: int) -> np.ndarray:
        """Instantaneous power samples |e_j(t)|^2 of channel 1 or 2."""
        if channel == 1:
            return np.abs(self.e1) ** 2
        if channel == 2:
            return np.abs(self.e2) ** 2
        raise DomainError(f"channel must be 1 or 2, got {channel}")

    def energy(self, channel: int) -> float:
        return float(np.trapezoid(self.power(channel), dx=self.grid.dt))


def gaussian_pulse(center: float, fwhm: float, peak: float, grid: TimeGrid) -> PulseEnvelope:
    """Gaussian input pulse whose *intensity* FWHM is ``fwhm`` (seconds).

    ``peak`` is the peak envelope amplitude (rad/s).  Raises
    :class:`ResolutionError` when the grid does not resolve the pulse
    (requires dt <= fwhm/20).
    """
    if fwhm <= 0:
        raise DomainError(f"fwhm must be > 0, got {fwhm}")
    if grid.dt > fwhm / 20:
        raise ResolutionError(
            f"grid dt={grid.dt:.3e} s does not resolve fwhm={fwhm:.3e} s (need dt <= fwhm/20)"
        )
    t = grid.times
    # |amp|^2 = peak^2 * exp(-4 ln2 (t-c)^2 / fwhm^2)  ->  intensity FWHM = fwhm
    amp = peak * np.exp(-2 * np.log(2) * ((t - center) / fwhm) ** 2)
    return PulseEnvelope(grid, amp.astype(complex))
