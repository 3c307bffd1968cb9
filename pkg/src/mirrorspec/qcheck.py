"""Quantum input-output quadrature spectra and the classical-equality check.

Independent route to the detected spectra: instead of beating classical
fields on a photodetector, the light is described by its quadrature
operators X_theta, the mirror imprints itself on them through the
radiation-pressure interaction, and the detector reads symmetrized
quadrature PSDs. Everything is parameterized by the recoil rate Gamma
rather than by optical powers, so this module carries no power bookkeeping
at all; detection is ideal (no efficiency factor).

The headline identity these functions exist to verify:

    S_het(w)  == heterodyne photocurrent PSD / (p_ref*hbar*omega0)
    S_hom(w)  == homodyne  photocurrent PSD / (p_ref*hbar*omega0)

pointwise and exactly (tested at 1e-12 relative), with the classical side
evaluated at unit detection efficiency and Gamma = recoil_rate(opt, osc).

Units here are dimensionless*s/rad (quadrature PSDs on the two-sided
angular convention); frequencies and rates are SI rad/s.
"""

from __future__ import annotations

import math
import warnings

from dataclasses import dataclass

import numpy as np

from .core import (
    HBAR,
    Bath,
    MechanicalOscillator,
    RegimeWarning,
    Spectrum,
    thermal_coth,
)
from .analytic import susceptibility


def input_quadrature_psd(theta: float, theta_p: float) -> float:
    """Vacuum-input quadrature cross-PSD: cos(theta - theta_p)/(2*pi).

    The theta = theta_p diagonal, 1/(2*pi), is the photodetector shot
    noise in these units; orthogonal quadratures are uncorrelated.
    """
    return math.cos(theta - theta_p) / (2.0 * math.pi)


def _force_psd_sum(osc: MechanicalOscillator, recoil: float, bath: Bath) -> float:
    """S_FF^rp + S_FF^th in N^2*s/rad, parameterized by the recoil rate.

    S_FF^rp = hbar^2*Gamma/(2*pi*z_zp^2);
    S_FF^th = hbar^2*gamma/(4*pi*z_zp^2) * (2*nbar + 1).
    The (2*nbar+1) factor IS coth(hbar*Omega_m/(2*k_B*T)) exactly, so this
    "high-temperature style" expression is valid at every temperature and
    reduces to hbar^2*gamma/(4*pi*z_zp^2) at T = 0.
    """
    z2 = osc.z_zp**2
    s_rp = HBAR**2 * recoil / (2.0 * math.pi * z2)
    s_th = HBAR**2 * osc.gamma * thermal_coth(bath, osc) / (4.0 * math.pi * z2)
    return s_rp + s_th


def quantum_position_term(
    osc: MechanicalOscillator,
    recoil: float,
    bath: Bath,
    theta: float,
    theta_p: float,
    omega,
):
    """Mirror-position contribution to the output quadrature cross-PSD.

    (4*Gamma/z_zp^2) * sin(theta)*sin(theta_p) * |chi(w)|^2 * (S_FF^rp + S_FF^th),
    dimensionless*s/rad. This is the interferometric position signal: linear
    in the total force PSD, vanishing when either quadrature is the
    amplitude one (sin factor zero).
    """
    chi2 = np.abs(susceptibility(osc, omega)) ** 2
    out = (
        (4.0 * recoil / osc.z_zp**2)
        * math.sin(theta)
        * math.sin(theta_p)
        * chi2
        * _force_psd_sum(osc, recoil, bath)
    )
    return out if np.ndim(out) else float(out)


def quantum_cross_term(
    osc: MechanicalOscillator,
    recoil: float,
    theta: float,
    theta_p: float,
    omega,
):
    """Shot-noise/backaction correlation term of the output cross-PSD.

    (hbar*Gamma/(pi*z_zp^2)) * [conj(chi(w))*cos(theta)*sin(theta_p)
                                + chi(w)*sin(theta)*cos(theta_p)]

    This term is what produces the sideband asymmetry. On the diagonal
    theta = theta_p it is real, 2*sin*cos*Re chi; off the diagonal it is
    complex, and only the assembled detector combinations (which pair it
    with its conjugate) are real.
    """
    chi = susceptibility(osc, omega)
    pref = HBAR * recoil / (math.pi * osc.z_zp**2)
    out = pref * (
        np.conj(chi) * math.cos(theta) * math.sin(theta_p)
        + chi * math.sin(theta) * math.cos(theta_p)
    )
    return out if np.ndim(out) else complex(out)


def output_quadrature_psd(
    osc: MechanicalOscillator,
    recoil: float,
    bath: Bath,
    theta: float,
    theta_p: float,
    omega,
):
    """Full output cross-PSD: vacuum input + position term + cross term.

    Complex in general (see `quantum_cross_term`); real on theta = theta_p.
    """
    return (
        input_quadrature_psd(theta, theta_p)
        + quantum_position_term(osc, recoil, bath, theta, theta_p, omega)
        + quantum_cross_term(osc, recoil, theta, theta_p, omega)
    )


def _warn_regime(osc: MechanicalOscillator, delta: float) -> None:
    if delta < 5.0 * osc.omega_m:
        warnings.warn(
            f"detuning delta = {delta:.3g} < 5*omega_m; sidebands are not "
            "well separated from DC",
            RegimeWarning,
            stacklevel=3,
        )
    if osc.gamma > osc.omega_m / 10.0:
        warnings.warn(
            f"gamma = {osc.gamma:.3g} > omega_m/10; sidebands are not "
            "spectrally narrow",
            RegimeWarning,
            stacklevel=3,
        )


def heterodyne_quantum_psd(
    osc: MechanicalOscillator, recoil: float, bath: Bath, delta: float, grid
) -> Spectrum:
    """Heterodyne detector PSD assembled from the quadrature building blocks.

    With X = X_0 and Y = X_{pi/2}, averaging the beat over one period of
    the detuning gives

        S(w) = (1/4) * sum_{s=+/-} [S_XX + S_YY](w + s*delta)
             + (i/4) * sum_{s=+/-} s * [S_XY - S_YX](w + s*delta).

    The first sum carries the floor and the motional sidebands, the second
    turns the complex cross correlations into the real, signed asymmetry.
    Result is real and nonnegative; returned as a Spectrum in
    dimensionless*s/rad.
    """
    if delta <= 0.0:
        raise ValueError("heterodyne assembly requires delta > 0")
    grid = np.asarray(grid, dtype=float)
    _warn_regime(osc, delta)

    def s_out(th, thp, w):
        return output_quadrature_psd(osc, recoil, bath, th, thp, w)

    half_pi = math.pi / 2.0
    total = np.zeros(grid.shape, dtype=complex)
    for sign in (+1.0, -1.0):
        w = grid + sign * delta
        total += 0.25 * (s_out(0.0, 0.0, w) + s_out(half_pi, half_pi, w))
        total += (
            0.25j * sign * (s_out(0.0, half_pi, w) - s_out(half_pi, 0.0, w))
        )
    return Spectrum(grid, total.real)


def homodyne_quantum_psd(
    osc: MechanicalOscillator, recoil: float, bath: Bath, theta: float, grid
) -> Spectrum:
    """Homodyne detector PSD: the single output quadrature S_XthXth(w).

    Real by construction (diagonal of the output cross-PSD). theta = 0
    returns the flat 1/(2*pi) vacuum floor; intermediate theta near the
    mechanical resonance can dip below it (ponderomotive squeezing).
    """
    grid = np.asarray(grid, dtype=float)
    values = np.real(
        output_quadrature_psd(osc, recoil, bath, theta, theta, grid)
    )
    return Spectrum(grid, values)


@dataclass(frozen=True)
class QuadratureSpectra:
    """Bundle of the quadrature-route spectra for one parameter set.

    s_in : vacuum input cross-PSD cos(theta-theta_p)/(2*pi) [dimensionless*s/rad]
    s_zz_q : position term on the grid (quadrature units)
    s_cross : cross term on the grid (complex; real on theta = theta_p)
    s_total_het : assembled heterodyne Spectrum (uses delta)
    s_total_hom : assembled homodyne Spectrum (uses theta)
    """

    s_in: float
    s_zz_q: np.ndarray
    s_cross: np.ndarray
    s_total_het: Spectrum
    s_total_hom: Spectrum


def quadrature_spectra(
    osc: MechanicalOscillator,
    recoil: float,
    bath: Bath,
    theta: float,
    theta_p: float,
    delta: float,
    grid,
) -> QuadratureSpectra:
    """Evaluate all quadrature-route spectra on one grid.

    The building-block terms (s_in, s_zz_q, s_cross) are evaluated at the
    phase pair (theta, theta_p); the heterodyne total uses delta, the
    homodyne total the single phase theta.
    """
    grid = np.asarray(grid, dtype=float)
    return QuadratureSpectra(
        s_in=input_quadrature_psd(theta, theta_p),
        s_zz_q=quantum_position_term(osc, recoil, bath, theta, theta_p, grid),
        s_cross=quantum_cross_term(osc, recoil, theta, theta_p, grid),
        s_total_het=heterodyne_quantum_psd(osc, recoil, bath, delta, grid),
        s_total_hom=homodyne_quantum_psd(osc, recoil, bath, theta, grid),
    )
