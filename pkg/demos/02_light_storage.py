"""Light storage and retrieval, with the dark-time decay law.

Turning the pump off while the pulse is inside maps it onto the ground
coherence; turning a control back on releases it.  The retrieved energy
decays as exp(-2*gamma_gs*T) with the dark time T.  Retrieval works on
either transition: channel 1 reproduces classic storage, channel 2 hands
the pulse back on the converted frequency (cross-retrieval).
"""

import os
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ratos import MediumParams, PowerMap, SolverGrid, TimeGrid, gaussian_pulse, power_to_rabi
from ratos.mbsolver import storage_roundtrip

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)
warnings.simplefilter("ignore")

medium = MediumParams()  # gamma_gs = 2*pi * 1 kHz
omega = power_to_rabi(4.0, PowerMap(), "pump")

# one roundtrip on each channel, short dark time
grid = TimeGrid(0.0, 16e-6, 4096)
pulse = gaussian_pulse(1.5e-6, 400e-9, 1e5, grid)
wf1 = storage_roundtrip(pulse, medium, SolverGrid(128, grid, 4), 2e-6, 1, omega, omega_pump=omega)
wf2 = storage_roundtrip(pulse, medium, SolverGrid(128, grid, 4), 2e-6, 2, omega, omega_pump=omega)
print("retrieval after 2 us dark time:")
print(f"  channel 1 (same frequency):    {wf1.energy(1) / pulse.energy():.3f} of the input")
print(f"  channel 2 (converted):         {wf2.energy(2) / pulse.energy():.3f} of the input, "
      f"purity {wf2.energy(2) / (wf2.energy(1) + wf2.energy(2)):.5f}")

# decay of the retrieved energy with dark time
darks = np.array([50e-6, 100e-6, 200e-6, 400e-6])
energies = []
for dark in darks:
    t_end = 12e-6 + dark
    g = TimeGrid(0.0, t_end, int(np.ceil(t_end / 16e-9)))
    p = gaussian_pulse(1.5e-6, 400e-9, 1e5, g)
    wf = storage_roundtrip(p, medium, SolverGrid(128, g, 4), float(dark), 1, omega, omega_pump=omega)
    energies.append(wf.energy(1))
energies = np.array(energies)
rate = -np.polyfit(darks, np.log(energies), 1)[0]
print(f"\nfitted decay rate {rate:.3e} rad/s vs 2*gamma_gs = {2 * medium.gamma_gs:.3e} rad/s")

plt.figure(figsize=(6, 4))
plt.semilogy(darks * 1e6, energies / energies[0], "o", label="retrieved energy")
ts = np.linspace(darks[0], darks[-1], 100)
plt.semilogy(ts * 1e6, np.exp(-2 * medium.gamma_gs * (ts - darks[0])), "-",
             label=r"exp(-2 $\gamma_{gs}$ T)")
plt.xlabel("dark time (us)")
plt.ylabel("retrieved energy (normalized)")
plt.title("storage lifetime set by ground-state decoherence")
plt.legend()
plt.tight_layout()
path = os.path.join(OUT, "02_light_storage.png")
plt.savefig(path, dpi=120)
print(f"figure saved to {path}")
