import numpy as np
import pytest

from ratos.model import ControlSchedule, MediumParams, PowerMap


@pytest.fixture
def medium():
    """Default desk-scale medium with decoherence disabled."""
    return MediumParams(gamma_gs=0.0)


@pytest.fixture
def pmap():
    return PowerMap()


def const_schedule(om1, om2=0.0):
    """Constant-control schedule (rad/s)."""
    return ControlSchedule(
        lambda t: np.full_like(np.asarray(t, dtype=float), float(om1)),
        lambda t: np.full_like(np.asarray(t, dtype=float), float(om2)),
    )


def tanh_up(t, t0, width):
    return 0.5 * (1 + np.tanh(4 * (np.asarray(t, dtype=float) - t0) / width))


def tanh_dn(t, t0, width):
    return 0.5 * (1 - np.tanh(4 * (np.asarray(t, dtype=float) - t0) / width))


def l2_distance(wf_a, wf_b, ref_energy):
    """Relative L2 distance between two waveforms on a shared grid."""
    d2 = np.abs(wf_a.e1 - wf_b.e1) ** 2 + np.abs(wf_a.e2 - wf_b.e2) ** 2
    return float(np.sqrt(np.trapezoid(d2, dx=wf_a.grid.dt) / ref_energy))
