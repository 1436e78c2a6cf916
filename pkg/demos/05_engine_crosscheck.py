"""Cross-validation of the two engines on an adiabatic handover.

The analytic dark-state-polariton engine (characteristics plus a spectral
transparency-window filter) is checked pointwise against the full
Maxwell-Bloch solver on a crossfade frequency-conversion run, at optical
depths 100 and 400.  Deeper media protect the dark state better, so the
waveform distance shrinks with od.
"""

import dataclasses
import os
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ratos import ExperimentSpec, MediumParams, TimeGrid, gaussian_pulse, run

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)
warnings.simplefilter("ignore")


def crossfade(od, power, n_z):
    return ExperimentSpec(
        kind="ratos",
        medium=MediumParams(od_1=od, od_2=od),
        grid=TimeGrid(0.0, 8e-6, 3072),
        signal_center=1.2e-6,
        pump_power=power,
        retrieve_power=power,
        delta_t=0.0,
        pump_off=1.75e-6,
        n_z=n_z,
        eit_filter="control-squared",
    )


fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
for ax, (od, power, n_z) in zip(axes, ((100.0, 20.0, 128), (400.0, 80.0, 256))):
    spec = crossfade(od, power, n_z)
    wf_poly = run(spec).waveform
    wf_mb = run(dataclasses.replace(spec, engine="mb")).waveform
    pulse = gaussian_pulse(spec.signal_center, spec.signal_fwhm, spec.signal_peak, spec.grid)
    d2 = np.abs(wf_mb.e1 - wf_poly.e1) ** 2 + np.abs(wf_mb.e2 - wf_poly.e2) ** 2
    dist = np.sqrt(np.trapezoid(d2, dx=spec.grid.dt) / pulse.energy())
    print(f"od = {od:4.0f}: relative waveform distance {dist:.4f}")

    t_us = spec.grid.times * 1e6
    ax.plot(t_us, np.abs(pulse.amp) ** 2 / 1e10, "k--", lw=0.8, label="input")
    ax.plot(t_us, np.abs(wf_mb.e2) ** 2 / 1e10, label="converted (Maxwell-Bloch)")
    ax.plot(t_us, np.abs(wf_poly.e2) ** 2 / 1e10, ":", label="converted (polariton)")
    ax.set_title(f"od = {od:.0f}")
    ax.set_xlabel("time (us)")
axes[0].set_ylabel("normalized power")
axes[0].legend()
fig.tight_layout()
path = os.path.join(OUT, "05_engine_crosscheck.png")
fig.savefig(path, dpi=120)
print(f"figure saved to {path}")
