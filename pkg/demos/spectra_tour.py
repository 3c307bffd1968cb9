"""Tour of the closed-form detection spectra.

Left panel: the balanced-heterodyne photocurrent PSD around the beat at
Delta, split into its contributions. The motional sidebands at Delta -/+
Omega_m ride on the flat shot floor; the signed cross term (shot noise
correlated with the backaction it produced) adds to the red sideband and
subtracts from the blue one, which is the whole sideband asymmetry.

Right panel: the balanced-homodyne PSD at a few local-oscillator phases.
theta = 0 reads the amplitude quadrature (floor only), theta = pi/2 the
phase quadrature (symmetric motional peak), and intermediate phases mix
in the cross correlations, dipping below the shot floor near resonance
(ponderomotive squeezing).

Run:  python demos/spectra_tour.py
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from mirrorspec import (
    Bath,
    MechanicalOscillator,
    OpticalSetup,
    heterodyne_psd,
    homodyne_psd,
    mean_occupation,
    recoil_rate,
)

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

# A 1 pg mirror at 100 kHz, probed hard enough for the backaction cross
# term to show against the thermal motion (Gamma/gamma ~ 0.3, nbar ~ 2.7).
osc = MechanicalOscillator(mass=1e-12, omega_m=2 * math.pi * 1e5, gamma=2 * math.pi * 100.0)
opt = OpticalSetup(
    omega0=2 * math.pi * 299792458.0 / 1.55e-6,
    p_in=5e-3,
    p_ref=0.1,
    delta=8.0 * osc.omega_m,
)
bath = Bath(temperature=1.5e-5)

print(f"recoil rate Gamma/gamma = {recoil_rate(opt, osc) / osc.gamma:.2f}")
print(f"bath occupation nbar    = {mean_occupation(bath, osc):.2f}")

# heterodyne: a window around the beat note, wide enough for both sidebands
w = opt.delta + np.linspace(-2.5, 2.5, 4001) * osc.omega_m
het = heterodyne_psd(osc, opt, bath, w)

x = (w - opt.delta) / osc.omega_m
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))
ax1.semilogy(x, het.total.values, "k", lw=1.2, label="total")
ax1.semilogy(x, het.s2 + het.s3.values, "C0--", lw=1.0, label="floor + sidebands")
ax1.semilogy(x, np.full_like(x, het.s2), "C7:", lw=1.0, label="shot floor")
ax1.set_xlabel(r"$(\omega - \Delta)/\Omega_m$")
ax1.set_ylabel(r"$S_{PP}$ [W$^2$ s/rad]")
ax1.set_title("heterodyne: asymmetric sidebands")
ax1.legend(frameon=False, fontsize=8)

# the cross term is what separates the dashed curve from the total:
red = het.total.values[x < 0].max()
blue = het.total.values[x > 0].max()
print(f"red/blue peak ratio     = {red / blue:.3f}  (cross term at work)")

# homodyne: phase sweep through the squeezing region
wh = np.linspace(0.0, 2.0, 4001) * osc.omega_m
floor = None
for theta, color in [(0.0, "C7"), (0.5 * math.pi, "C0"), (2.6, "C3"), (2.9, "C1")]:
    hom = homodyne_psd(
        osc,
        OpticalSetup(
            omega0=opt.omega0, p_in=opt.p_in, p_ref=opt.p_ref, delta=0.0, theta=theta
        ),
        bath,
        wh,
    )
    if floor is None:
        floor = hom.values[0]  # theta = 0 is the bare floor
    ax2.semilogy(
        wh / osc.omega_m, hom.values, color, lw=1.1, label=rf"$\theta$ = {theta:.2f}"
    )
ax2.axhline(floor, color="k", lw=0.7, ls=":")
ax2.set_xlabel(r"$\omega/\Omega_m$")
ax2.set_ylabel(r"$S_{PP}$ [W$^2$ s/rad]")
ax2.set_title("homodyne: phase selects the quadrature")
ax2.legend(frameon=False, fontsize=8)

fig.tight_layout()
fig.savefig(OUT / "spectra_tour.svg")
print(f"wrote {OUT / 'spectra_tour.svg'}")
