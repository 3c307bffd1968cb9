"""Ponderomotive squeezing: homodyne noise below the shot floor.

Radiation pressure writes the probe's amplitude-quadrature shot noise
onto the mirror, and the mirror writes it back into the phase
quadrature. A homodyne detector at an intermediate phase reads a
correlated mixture, and near the mechanical resonance the correlation
subtracts: the measured noise dips below the vacuum floor 1/(2 pi).

The script locates the best (theta, omega) on a grid, then checks the
prediction against a seeded time-domain simulation at that phase. The
dip is a deep cancellation, so the integrator needs a fine step there;
at coarse dt the zero-order-hold phase error fills the dip in.

Run:  python demos/squeezing_demo.py   (about a minute)
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from mirrorspec import Bath, MechanicalOscillator, SimConfig, homodyne_quantum_psd, simulate

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

GAMMA = 1e-2
RECOIL = 5e-2  # Gamma/gamma = 5
FLOOR = 1.0 / (2.0 * math.pi)

osc = MechanicalOscillator(mass=1e-12, omega_m=1.0, gamma=GAMMA)
cold = Bath(temperature=0.0)

# coarse face of the grid search: best phase for each omega near resonance
w = np.linspace(0.9, 1.1, 2001)
thetas = np.linspace(0.0, math.pi, 361)[1:-1]
best = (np.inf, None)
for theta in thetas:
    vals = homodyne_quantum_psd(osc, RECOIL, cold, theta, w).values
    if vals.min() < best[0]:
        best = (float(vals.min()), float(theta))
s_min, theta_star = best
print(f"deepest dip {s_min:.4f} = {s_min / FLOOR:.2f} x floor, at theta = {theta_star:.3f}")

# time-domain check at the optimal phase; fine dt, see module docstring
cfg = SimConfig(
    dt=2 * math.pi / 512,
    n_samples=1 << 20,
    n_segments=300,
    seed=11,
    gamma=GAMMA,
    recoil=RECOIL,
    nbar=0.0,
    delta=0.0,
    theta=theta_star,
)
res = simulate(cfg)
grid = res.spectrum.grid[1:]
ana = homodyne_quantum_psd(osc, RECOIL, cold, theta_star, grid).values

fig, ax = plt.subplots(figsize=(5.6, 4.2))
m = (grid > 0.8) & (grid < 1.2)
ax.plot(grid[m], res.spectrum.values[1:][m], "C0", lw=0.7, label="simulated")
ax.plot(grid[m], ana[m], "k--", lw=1.2, label="analytic")
ax.axhline(FLOOR, color="C7", lw=0.8, ls=":", label="shot floor")
ax.set_xlabel(r"$\omega/\Omega_m$")
ax.set_ylabel(r"$S$ [1/rad]")
ax.set_title(rf"homodyne at $\theta$ = {theta_star:.3f}")
ax.legend(frameon=False, fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "squeezing.svg")

band = ana <= 1.02 * ana.min()
sim_mean = res.spectrum.values[1:][band].mean()
print(f"band mean near the dip: sim {sim_mean:.4f} vs analytic {ana[band].mean():.4f}")
print(f"wrote {OUT / 'squeezing.svg'}")
