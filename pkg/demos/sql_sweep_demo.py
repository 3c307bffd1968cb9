"""Standard quantum limit: the imprecision/backaction trade-off in power.

The inferred displacement noise at a fixed probe frequency is the sum of
a shot-noise imprecision term falling as 1/P and a backaction term
rising as P. Sweeping the probe power maps the trade-off; the closed
form puts the optimum at P_sql = c/(4 k0 sqrt(eta B)) with B the
summed sideband susceptibilities at the probe frequency.

The script sweeps 4 decades around the optimum for two detection
efficiencies and marks the closed-form prediction on each curve: losing
photons (eta < 1) costs imprecision but not backaction, so the optimum
moves up in power and the achievable floor rises.

Run:  python demos/sql_sweep_demo.py
"""

import math
from dataclasses import replace
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from mirrorspec import Bath, MechanicalOscillator, OpticalSetup, sql_power, sql_sweep

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

osc = MechanicalOscillator(mass=1e-12, omega_m=2 * math.pi * 1e5, gamma=2 * math.pi * 10.0)
opt = OpticalSetup(
    omega0=2 * math.pi * 299792458.0 / 1.55e-6,
    p_in=1e-3,
    p_ref=0.1,
    delta=8.0 * osc.omega_m,
)
cold = Bath(temperature=0.0)
w_probe = 1.5 * osc.omega_m

fig, ax = plt.subplots(figsize=(5.6, 4.2))
for eta, color in [(1.0, "C0"), (0.25, "C3")]:
    setup = replace(opt, eta=eta)
    closed = sql_power(osc, setup, w_probe)
    grid = np.geomspace(closed.power * 1e-2, closed.power * 1e2, 400)
    sweep = sql_sweep(osc, setup, cold, w_probe, grid)
    ax.loglog(sweep.powers, sweep.total_psd, color, lw=1.2, label=rf"$\eta$ = {eta}")
    ax.plot(closed.power, closed.psd_min, color + "o", ms=6, mfc="none")
    print(
        f"eta = {eta:4.2f}: closed-form P_sql = {closed.power:9.3f} W, "
        f"sweep argmin = {sweep.power_opt:9.3f} W, "
        f"floor = {closed.psd_min:.3e} m^2 s/rad"
    )

ax.set_xlabel("probe power [W]")
ax.set_ylabel(r"total inferred $S_{zz}$ [m$^2$ s/rad]")
ax.set_title("1/P imprecision meets P backaction")
ax.legend(frameon=False)
fig.tight_layout()
fig.savefig(OUT / "sql_sweep.svg")
print(f"wrote {OUT / 'sql_sweep.svg'}")
