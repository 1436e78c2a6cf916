"""Slow light under EIT, and the vacuum-transmission calibration.

A weak 400-ns pulse crosses a 5-cm cell. With the pump control on it rides
the transparency window at the dark-polariton group velocity; with all
controls off the medium is just an absorber with intensity transmission
exp(-od).  Both engines are run on the same configuration.
"""

import os
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ratos import (
    LossModel,
    MediumParams,
    SolverGrid,
    TimeGrid,
    cw_response,
    gaussian_pulse,
    group_velocity,
    integrate,
    transport,
)
from ratos.model import ControlSchedule

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)
warnings.simplefilter("ignore")

# ---------------------------------------------------------------------------
# calibration first: with the controls off, CW light just Beer-absorbs
# ---------------------------------------------------------------------------
print("vacuum transmission, controls off:")
for od in (1.0, 5.0, 20.0):
    med = MediumParams(od_1=od, od_2=od, gamma_gs=0.0)
    e1, _ = cw_response(0.0, 0.0, med, 1e5)
    print(f"  od = {od:4.0f}:  measured {abs(e1)**2 / 1e10:.3e}   exp(-od) {np.exp(-od):.3e}")

# ---------------------------------------------------------------------------
# now slow light: pump on at ~20 mW equivalent
# ---------------------------------------------------------------------------
medium = MediumParams(gamma_gs=0.0)  # od = 100
omega_pump = 2 * np.pi * 4.46e6
v_g = group_velocity(omega_pump, 0.0, medium)
print(f"\ngroup velocity {v_g:.0f} m/s -> delay {medium.length_L / v_g * 1e6:.2f} us")

grid = TimeGrid(0.0, 8e-6, 3072)
pulse = gaussian_pulse(1.2e-6, 400e-9, 1e5, grid)
schedule = ControlSchedule(
    lambda t: np.full_like(np.asarray(t, float), omega_pump),
    lambda t: np.zeros_like(np.asarray(t, float)),
)

mb_wave, report = integrate(pulse, schedule, medium, SolverGrid(128, grid, 4))
poly_wave = transport(pulse, schedule, medium, LossModel(True, "lineshape"))
print(f"transmitted energy: full solver {mb_wave.energy(1) / pulse.energy():.3f}, "
      f"analytic engine {poly_wave.energy(1) / pulse.energy():.3f}")
print(f"max bright fraction during the run: {report.max_bright_fraction:.2e}")

t_us = grid.times * 1e6
plt.figure(figsize=(7, 4))
plt.plot(t_us, np.abs(pulse.amp) ** 2 / 1e10, "k--", label="input")
plt.plot(t_us, np.abs(mb_wave.e1) ** 2 / 1e10, label="output (Maxwell-Bloch)")
plt.plot(t_us, np.abs(poly_wave.e1) ** 2 / 1e10, ":", label="output (polariton engine)")
plt.xlabel("time (us)")
plt.ylabel("normalized power")
plt.title("slow light: 400-ns pulse delayed by the EIT medium")
plt.legend()
plt.tight_layout()
path = os.path.join(OUT, "01_slow_light.png")
plt.savefig(path, dpi=120)
print(f"figure saved to {path}")
