"""Optically controlled beam splitting between the two signal modes.

With the pump held on and the retrieve ramped up mid-transit, the output
splits between the transmitted and converted channels with energy ratio
(g1 Omega_2 / (g2 Omega_1))^2, i.e. linearly in the retrieve power.  The
energy left on the transmitted channel follows a*P_pump/(c*P_pump+P_ret);
switching the ground-state decoherence on lowers the fitted efficiency a.
"""

import dataclasses
import os
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ratos import ExperimentSpec, MediumParams, TimeGrid, linear_fit, ratos_energy_fit, run

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)
warnings.simplefilter("ignore")

p_rets = (0.5, 1.0, 2.0, 3.0, 4.5, 6.0, 8.0, 12.0, 16.0)
spec = ExperimentSpec(
    kind="beamsplitter",
    medium=MediumParams(gamma_gs=2 * np.pi * 3e3),
    grid=TimeGrid(0.0, 12e-6, 2048),
    p_ret=p_rets,
    retrieve_on=3.0e-6,
)

series = run(spec).series
ratios = np.array([s["energy_ratio"] for s in series])
fit = linear_fit(np.array(p_rets), ratios, through_origin=True)
print("splitting ratio vs retrieve power:")
for p, r in zip(p_rets, ratios):
    print(f"  P_ret = {p:5.1f} mW:  E2/E1 = {r:7.3f}")
print(f"linear fit through origin: slope {fit.params[0]:.4f} / mW  (r2 = {fit.r2:.6f})")

# transmitted-channel energy vs retrieve power, with and without decoherence
e_lossless = [s["e1_energy_norm"] for s in series]
lossy = run(dataclasses.replace(spec, loss=True)).series
e_lossy = [s["e1_energy_norm"] for s in lossy]
fit0 = ratos_energy_fit(spec.pump_power, p_rets, e_lossless)
fit1 = ratos_energy_fit(spec.pump_power, p_rets, e_lossy)
print(f"\nenergy-formula fit, lossless:  a = {fit0.params[0]:.3f}, c = {fit0.params[1]:.3f}, "
      f"a/c = {fit0.params[0] / fit0.params[1]:.3f}")
print(f"energy-formula fit, with loss: a = {fit1.params[0]:.3f}, c = {fit1.params[1]:.3f}")

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
axes[0].plot(p_rets, ratios, "o")
axes[0].plot(p_rets, fit.params[0] * np.array(p_rets), "-")
axes[0].set_xlabel("retrieve power (mW)")
axes[0].set_ylabel("energy ratio E2/E1")
axes[0].set_title("splitting ratio is linear in retrieve power")
ps = np.linspace(0.0, p_rets[-1], 200)
axes[1].plot(p_rets, e_lossless, "o", label="lossless")
axes[1].plot(ps, fit0.params[0] * 4.0 / (fit0.params[1] * 4.0 + ps), "-")
axes[1].plot(p_rets, e_lossy, "s", label="with decoherence")
axes[1].plot(ps, fit1.params[0] * 4.0 / (fit1.params[1] * 4.0 + ps), "--")
axes[1].set_xlabel("retrieve power (mW)")
axes[1].set_ylabel("transmitted energy (normalized)")
axes[1].set_title("a*P_pump/(c*P_pump + P_ret)")
axes[1].legend()
fig.tight_layout()
path = os.path.join(OUT, "04_beam_splitter.png")
fig.savefig(path, dpi=120)
print(f"figure saved to {path}")
