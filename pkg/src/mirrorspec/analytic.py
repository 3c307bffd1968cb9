"""Closed-form heterodyne/homodyne photocurrent spectra and derived quantities.

Everything here is evaluated in SI on the two-sided angular-frequency
convention of `core`. The mechanical susceptibility value ("ChiValue" in
the API docs) is an ordinary complex number with units m/N, satisfying
chi(-w) = conj(chi(w)) and Im chi(w) > 0 for w > 0.

Detection efficiency eta multiplies every explicitly detected power
(p_in and p_ref) in the noise spectra s2, s3, s4 and their homodyne
analogues, while the p_in inside the radiation-pressure force PSD stays
un-attenuated: losing photons after the mirror does not reduce the kicks
the mirror already received. The deterministic Dirac lines carry the bare
powers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .core import (
    C_LIGHT,
    HBAR,
    Bath,
    MechanicalOscillator,
    OpticalSetup,
    RegimeWarning,
    Spectrum,
    thermal_coth,
)

# Grid points farther than omega0/GRID_BANDWIDTH_FACTOR from DC violate the
# slow-envelope convention the photocurrent spectra are derived in.
GRID_BANDWIDTH_FACTOR = 10.0


class ZeroInputPowerError(ValueError):
    """Raised where p_in = 0 would make a readout quantity infinite."""


def susceptibility(osc: MechanicalOscillator, omega):
    """Mechanical susceptibility chi(w) = 1/(m*(Omega_m^2 - w^2 - i*gamma*w)).

    Parameters
    ----------
    osc : MechanicalOscillator
    omega : float or ndarray
        Angular frequency [rad/s].

    Returns
    -------
    complex or ndarray
        chi(w) [m/N]. The denominator never vanishes for gamma > 0.
    """
    omega = np.asarray(omega, dtype=float)
    chi = 1.0 / (
        osc.mass * (osc.omega_m**2 - omega**2 - 1j * osc.gamma * omega)
    )
    return chi if chi.ndim else complex(chi)


def thermal_force_psd(osc: MechanicalOscillator, bath: Bath) -> float:
    """Two-sided thermal (Langevin) force PSD, white in omega [N^2*s/rad].

    S_FF^th = (gamma*m/pi) * (hbar*Omega_m/2) * coth(hbar*Omega_m/(2 k_B T)),
    evaluated through the exact identity coth = 2*nbar + 1. At T = 0 this
    is the zero-point value gamma*m*hbar*Omega_m/(2*pi).
    """
    return (
        osc.gamma
        * osc.mass
        * HBAR
        * osc.omega_m
        * thermal_coth(bath, osc)
        / (2.0 * math.pi)
    )


def rp_force_psd(opt: OpticalSetup, osc: MechanicalOscillator | None = None) -> float:
    """Two-sided radiation-pressure shot-noise force PSD [N^2*s/rad].

    S_FF^rp = 4*hbar*omega0*p_in/(2*pi*c^2), white in omega. Independent of
    the mechanical parameters; `osc` is accepted for signature symmetry with
    the other force PSDs and ignored.
    """
    return 4.0 * HBAR * opt.omega0 * opt.p_in / (2.0 * math.pi * C_LIGHT**2)


def recoil_rate(opt: OpticalSetup, osc: MechanicalOscillator) -> float:
    """Backaction (recoil heating) rate Gamma = 2*p_in*omega0/(m*c^2*Omega_m) [rad/s].

    Quanta of hbar*Omega_m added to the mirror per unit time by
    radiation-pressure shot noise.
    """
    return 2.0 * opt.p_in * opt.omega0 / (osc.mass * C_LIGHT**2 * osc.omega_m)


def steady_state_energy(opt: OpticalSetup, osc: MechanicalOscillator) -> float:
    """Steady-state energy fed by backaction alone [J].

    E_inf = 2*p_in*hbar*omega0/(m*c^2*gamma), identically equal to
    hbar*Omega_m*Gamma/gamma and to m*Omega_m^2 * Integral |chi|^2 S_FF^rp dw.
    """
    return 2.0 * opt.p_in * HBAR * opt.omega0 / (osc.mass * C_LIGHT**2 * osc.gamma)


def shot_noise_floor(p_on_detector: float, opt: OpticalSetup) -> float:
    """Shot-noise power PSD of a beam of mean power P [W^2*s/rad].

    S = P*hbar*omega0/(2*pi), flat over |w| << omega0. For the balanced
    heterodyne/homodyne signal, call with the detected reference power.
    """
    if p_on_detector < 0:
        raise ValueError(f"power must be >= 0, got {p_on_detector}")
    return p_on_detector * HBAR * opt.omega0 / (2.0 * math.pi)


def displacement_psd(
    osc: MechanicalOscillator, opt: OpticalSetup, bath: Bath, omega
):
    """Intrinsic mirror displacement PSD S_zz = |chi|^2 (S_FF^rp + S_FF^th) [m^2*s/rad].

    The two force noises are uncorrelated, so their PSDs add. Peaks at
    w ~ +/-Omega_m with height ~ (S_FF^rp + S_FF^th)/(m^2 gamma^2 Omega_m^2).
    """
    s_ff = rp_force_psd(opt, osc) + thermal_force_psd(osc, bath)
    return np.abs(susceptibility(osc, omega)) ** 2 * s_ff


@dataclass(frozen=True)
class HeterodynePSDBreakdown:
    """The four contributions to the balanced-heterodyne photocurrent PSD.

    s1_lines : Dirac lines of the deterministic beat signal, (omega, weight)
        with weights in W^2 (bare powers, see module docstring).
    s2 : shot-noise floor [W^2*s/rad], flat.
    s3 : Spectrum, motional sidebands (nonnegative).
    s4 : Spectrum, shot-noise/backaction cross term (signed; this term is
        the sideband asymmetry).
    total : Spectrum, s2 + s3 + s4 on the common grid with s1 lines attached.
    """

    s1_lines: tuple
    s2: float
    s3: Spectrum
    s4: Spectrum
    total: Spectrum


def _validate_grid(opt: OpticalSetup, grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    limit = opt.omega0 / GRID_BANDWIDTH_FACTOR
    if np.any(np.abs(grid) >= limit):
        raise ValueError(
            "grid contains |omega| >= omega0/10; the photocurrent spectra "
            "are slow-envelope results valid only for |omega| << omega0"
        )
    return grid


def _warn_regime(osc: MechanicalOscillator, opt: OpticalSetup) -> None:
    if opt.delta < 5.0 * osc.omega_m:
        warnings.warn(
            f"heterodyne detuning delta = {opt.delta:.3g} < 5*omega_m; "
            "sidebands are not well separated from DC",
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


def heterodyne_psd(
    osc: MechanicalOscillator, opt: OpticalSetup, bath: Bath, grid
) -> HeterodynePSDBreakdown:
    """Balanced-heterodyne photocurrent PSD split into its four contributions.

    Parameters
    ----------
    osc, opt, bath
        System description; opt.delta must be > 0 (use `homodyne_psd` for
        delta = 0, the two limits do not commute).
    grid : ndarray
        Angular frequencies [rad/s], each with |omega| < omega0/10.

    Returns
    -------
    HeterodynePSDBreakdown
        s2 = eta*p_ref*hbar*omega0/(2*pi);
        s3(w) = 4*k0^2*(eta*p_in)*(eta*p_ref)*[|chi(w+D)|^2+|chi(w-D)|^2]*(S_rp+S_th);
        s4(w) = 4*k0^2*(eta*p_in)*(eta*p_ref)*(hbar/2*pi)*Im[chi(w+D)-chi(w-D)];
        s1 lines {(0, p_ref^2), (+/-D, p_in*p_ref)}.
        The p_in inside S_rp is NOT attenuated by eta.

    Raises
    ------
    ValueError
        If delta = 0 or the grid violates |omega| < omega0/10.

    Warns
    -----
    RegimeWarning
        If delta < 5*omega_m or gamma > omega_m/10.
    """
    if opt.delta <= 0.0:
        raise ValueError(
            "heterodyne_psd requires delta > 0; for delta = 0 use homodyne_psd "
            "(the heterodyne result does not reduce to homodyne at delta = 0)"
        )
    grid = _validate_grid(opt, grid)
    _warn_regime(osc, opt)

    d = opt.delta
    chi_p = susceptibility(osc, grid + d)
    chi_m = susceptibility(osc, grid - d)
    s_ff = rp_force_psd(opt, osc) + thermal_force_psd(osc, bath)

    pref = 4.0 * opt.k0**2 * (opt.eta * opt.p_in) * (opt.eta * opt.p_ref)
    s2 = shot_noise_floor(opt.eta * opt.p_ref, opt)
    s3 = pref * (np.abs(chi_p) ** 2 + np.abs(chi_m) ** 2) * s_ff
    s4 = pref * (HBAR / (2.0 * math.pi)) * np.imag(chi_p - chi_m)

    s1_lines = (
        (0.0, opt.p_ref**2),
        (-d, opt.p_in * opt.p_ref),
        (d, opt.p_in * opt.p_ref),
    )
    total = s2 + s3 + s4
    return HeterodynePSDBreakdown(
        s1_lines=s1_lines,
        s2=s2,
        s3=Spectrum(grid, s3),
        s4=Spectrum(grid, s4),
        total=Spectrum(grid, total, lines=s1_lines),
    )


def homodyne_psd(
    osc: MechanicalOscillator, opt: OpticalSetup, bath: Bath, grid
) -> Spectrum:
    """Balanced-homodyne photocurrent PSD at local-oscillator phase theta.

    S(w) = eta*p_ref*hbar*omega0/(2*pi)
         + 16*k0^2*(eta*p_in)*(eta*p_ref)*sin(2*theta)*(hbar/4*pi)*Re chi(w)
         + 16*k0^2*(eta*p_in)*(eta*p_ref)*sin^2(theta)*|chi(w)|^2*(S_rp+S_th)

    with the p_in inside S_rp un-attenuated. theta = 0 measures the
    amplitude quadrature (floor only), theta = pi/2 the phase quadrature
    (pure |chi|^2 sidebands at +/-Omega_m). Intermediate phases admit
    ponderomotive squeezing: values below the floor near Omega_m.

    Returns a Spectrum carrying the deterministic DC Dirac line (0, p_ref^2).
    """
    grid = _validate_grid(opt, grid)
    chi = susceptibility(osc, grid)
    s_ff = rp_force_psd(opt, osc) + thermal_force_psd(osc, bath)

    pref = 16.0 * opt.k0**2 * (opt.eta * opt.p_in) * (opt.eta * opt.p_ref)
    floor = shot_noise_floor(opt.eta * opt.p_ref, opt)
    values = (
        floor
        + pref * math.sin(2.0 * opt.theta) * (HBAR / (4.0 * math.pi)) * chi.real
        + pref * math.sin(opt.theta) ** 2 * np.abs(chi) ** 2 * s_ff
    )
    return Spectrum(grid, values, lines=((0.0, opt.p_ref**2),))


def imprecision_psd(opt: OpticalSetup) -> float:
    """Heterodyne displacement-imprecision PSD S_zz^im = hbar*omega0/(8*pi*k0^2*eta*p_in).

    Flat in omega: the shot floor referred back through the motional
    transduction gain.

    Raises
    ------
    ZeroInputPowerError
        If p_in = 0 (imprecision diverges).
    """
    if opt.p_in == 0.0:
        raise ZeroInputPowerError("imprecision is infinite at p_in = 0")
    return HBAR * opt.omega0 / (8.0 * math.pi * opt.k0**2 * opt.eta * opt.p_in)


def homodyne_imprecision_psd(opt: OpticalSetup) -> float:
    """Homodyne (theta = pi/2) displacement-imprecision PSD [m^2*s/rad].

    One quarter of the heterodyne value: a phase-quadrature homodyne puts
    the full motional transduction into the measured record, while the
    heterodyne beat splits it between the two sidebands, so referring the
    same shot floor back through the gain costs a factor of four less.
    The Heisenberg product with the backaction force PSD is
    hbar^2/(16*pi^2*eta) instead of hbar^2/(4*pi^2*eta).

    Raises
    ------
    ZeroInputPowerError
        If p_in = 0 (imprecision diverges).
    """
    return imprecision_psd(opt) / 4.0


def total_displacement_psd(
    osc: MechanicalOscillator, opt: OpticalSetup, bath: Bath, omega
):
    """Total inferred-displacement PSD under heterodyne readout [m^2*s/rad].

    S_zz^tot(w) = S_zz^im
                + [|chi(w+D)|^2 + |chi(w-D)|^2] * S_FF^th
                + (hbar/2*pi) * Im[chi(w+D) - chi(w-D)]
                + [|chi(w+D)|^2 + |chi(w-D)|^2] * S_FF^rp

    i.e. imprecision + intrinsic fluctuations (thermal motion plus the
    motional-vacuum contribution the readout cannot avoid) + backaction.
    Small p_in is imprecision-dominated (~1/p_in), large p_in is
    backaction-dominated (~p_in); the crossover is the standard quantum
    limit (see `sql_power`).
    """
    omega = np.asarray(omega, dtype=float)
    chi_p = susceptibility(osc, omega + opt.delta)
    chi_m = susceptibility(osc, omega - opt.delta)
    chi2 = np.abs(chi_p) ** 2 + np.abs(chi_m) ** 2

    s_fluct = chi2 * thermal_force_psd(osc, bath) + (
        HBAR / (2.0 * math.pi)
    ) * np.imag(chi_p - chi_m)
    backaction = chi2 * rp_force_psd(opt, osc)
    total = imprecision_psd(opt) + s_fluct + backaction
    return total if total.ndim else float(total)


class SqlResult(NamedTuple):
    """Optimal probe power and the total displacement PSD it achieves."""

    power: float       # W
    psd_min: float     # m^2*s/rad at the probe frequency


def sql_power(
    osc: MechanicalOscillator, opt: OpticalSetup, omega_probe: float
) -> SqlResult:
    """Probe power where imprecision equals backaction at omega_probe.

    Solving S_zz^im(p) = [|chi(w_p+D)|^2 + |chi(w_p-D)|^2] * S_FF^rp(p)
    for p gives the closed form

        p_opt = c / (4*k0*sqrt(eta*B)),
        B = |chi(w_p+D)|^2 + |chi(w_p-D)|^2,

    which also minimizes `total_displacement_psd` over power (the two
    power-dependent terms scale as 1/p and p). Scales as 1/sqrt(eta).

    Returns
    -------
    SqlResult
        (p_opt, total_displacement_psd at p_opt and omega_probe, evaluated
        at T = 0: the quantum-limited minimum. A finite bath temperature
        adds a power-independent offset that moves the minimum value but
        never the optimal power.)
    """
    chi_p = susceptibility(osc, omega_probe + opt.delta)
    chi_m = susceptibility(osc, omega_probe - opt.delta)
    b = abs(chi_p) ** 2 + abs(chi_m) ** 2
    p_opt = C_LIGHT / (4.0 * opt.k0 * math.sqrt(opt.eta * b))
    opt_at = replace(opt, p_in=p_opt)
    psd_min = float(total_displacement_psd(osc, opt_at, Bath(0.0), omega_probe))
    return SqlResult(p_opt, psd_min)
