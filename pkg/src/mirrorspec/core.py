"""Shared domain types, physical constants, and unit conventions.

Conventions used throughout the package:

* All spectral densities are two-sided in angular frequency with the
  1/(2pi) prefactor, i.e. S(w) = (1/2pi) * Integral <x(t)x(t+tau)> e^{i w tau} dtau.
  Conversions to per-Hz or one-sided conventions happen only at the CLI
  output layer.
* Dirac lines (deterministic beat notes) are never rasterized onto the
  sampled grid; they travel as separate (omega, weight) pairs.
* SI units everywhere except the dimensionless rotating frame owned by
  the `sim` module.

All code in this package reads physical constants from the table below;
no module hardcodes its own values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants as _codata

# ---------------------------------------------------------------------------
# Constants table (CODATA via scipy). Single source for the whole package.
# ---------------------------------------------------------------------------
HBAR = _codata.hbar          # J s
K_B = _codata.k              # J / K
C_LIGHT = _codata.c          # m / s
EPSILON_0 = _codata.epsilon_0  # F / m

# Largest exponent hbar*Omega/(k_B T) evaluated through expm1 before
# switching to the asymptotic exp(-x) branch (expm1 overflows near 709).
_EXP_SWITCH = 700.0


class RegimeWarning(UserWarning):
    """A formula is being evaluated outside its stated validity regime.

    Emitted (never raised) when the heterodyne guards Delta >= 5*Omega_m or
    gamma <= Omega_m/10 are violated: the full expressions stay valid, only
    the resolved-sideband peak approximations degrade.
    """


@dataclass(frozen=True)
class MechanicalOscillator:
    """Suspended mirror: mass, resonance frequency, amplitude damping.

    Parameters
    ----------
    mass : float
        Mirror mass [kg].
    omega_m : float
        Mechanical resonance Omega_m [rad/s].
    gamma : float
        Damping rate as it appears in the susceptibility denominator
        ``m*(Omega_m^2 - w^2 - i*gamma*w)`` [rad/s]. With this convention
        the undriven amplitude decays as exp(-gamma*t/2) and the energy
        as exp(-gamma*t).
    """

    mass: float
    omega_m: float
    gamma: float

    def __post_init__(self):
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be positive and finite, got {self.mass}")
        if not (self.omega_m > 0 and math.isfinite(self.omega_m)):
            raise ValueError(f"omega_m must be positive and finite, got {self.omega_m}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive and finite, got {self.gamma}")
        if not (self.z_zp > 0 and math.isfinite(self.z_zp)):
            raise ValueError("zero-point amplitude is not finite for these parameters")

    @property
    def z_zp(self) -> float:
        """Zero-point motion amplitude sqrt(hbar/(2 m Omega_m)) [m]."""
        return math.sqrt(HBAR / (2.0 * self.mass * self.omega_m))


@dataclass(frozen=True)
class OpticalSetup:
    """Laser, reference beam, and detection parameters.

    Parameters
    ----------
    omega0 : float
        Laser (carrier) angular frequency [rad/s].
    p_in : float
        Mean power hitting the mirror [W].
    p_ref : float
        Reference (local oscillator) power on the detector [W].
    delta : float
        Heterodyne detuning of the reference beam [rad/s], >= 0.
        delta = 0 selects homodyne detection.
    theta : float
        Homodyne phase [rad]; only meaningful when delta = 0.
    eta : float
        Detection efficiency in (0, 1]. Applied to detected powers only,
        never to the backaction force noise (see `analytic`).
    """

    omega0: float
    p_in: float
    p_ref: float
    delta: float = 0.0
    theta: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        if not (self.omega0 > 0 and math.isfinite(self.omega0)):
            raise ValueError(f"omega0 must be positive and finite, got {self.omega0}")
        if self.p_in < 0:
            raise ValueError(f"p_in must be >= 0, got {self.p_in}")
        if self.p_ref < 0:
            raise ValueError(f"p_ref must be >= 0, got {self.p_ref}")
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if not (0.0 < self.eta <= 1.0):
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")

    @property
    def k0(self) -> float:
        """Carrier wavenumber omega0/c [rad/m]."""
        return self.omega0 / C_LIGHT

    def heterodyne_regime_ok(self, osc: MechanicalOscillator) -> bool:
        """True when the resolved-sideband approximations apply.

        Checked as delta >= 5*omega_m and gamma <= omega_m/10; violating
        this degrades only the peak-value formulas, not the full spectra.
        """
        return self.delta >= 5.0 * osc.omega_m and osc.gamma <= osc.omega_m / 10.0

    def strong_reference_ok(self) -> bool:
        """True when p_ref >= 10*p_in, the regime where O(p_in^2) beat
        terms are negligible against the reference beat."""
        return self.p_ref >= 10.0 * self.p_in


@dataclass(frozen=True)
class Bath:
    """Thermal environment of the mirror.

    temperature : float, bath temperature [K], >= 0.
    """

    temperature: float

    def __post_init__(self):
        if not (self.temperature >= 0 and math.isfinite(self.temperature)):
            raise ValueError(
                f"temperature must be >= 0 and finite, got {self.temperature}"
            )


def zero_point_amplitude(osc: MechanicalOscillator) -> float:
    """Zero-point motion amplitude z_zp = sqrt(hbar/(2 m Omega_m)) [m]."""
    return osc.z_zp


def mean_occupation(bath: Bath, osc: MechanicalOscillator) -> float:
    """Bose-Einstein mean occupation of the mechanical mode.

    Returns 1/(exp(hbar*Omega_m/(k_B T)) - 1); exactly 0 at T = 0.
    Stable for hbar*Omega_m/(k_B T) up to and beyond 700: past the
    expm1 overflow threshold the asymptotic exp(-x) value is returned
    (indistinguishable from the exact one to double precision).
    """
    if bath.temperature == 0.0:
        return 0.0
    x = HBAR * osc.omega_m / (K_B * bath.temperature)
    if x >= _EXP_SWITCH:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def thermal_coth(bath: Bath, osc: MechanicalOscillator) -> float:
    """coth(hbar*Omega_m/(2 k_B T)), evaluated as 2*nbar + 1 (exact identity).

    The identity avoids large-argument tanh evaluation and keeps the
    T = 0 limit (coth -> 1) exact.
    """
    return 2.0 * mean_occupation(bath, osc) + 1.0


@dataclass(frozen=True)
class Spectrum:
    """Two-sided PSD sampled on an angular-frequency grid, plus Dirac lines.

    Parameters
    ----------
    grid : ndarray
        Strictly increasing omega values [rad/s]; may span negative and
        positive frequencies.
    values : ndarray
        PSD samples in the declared unit (W^2*s/rad for photocurrent-power
        PSDs, m^2*s/rad for displacement PSDs, dimensionless*s/rad for
        rotating-frame quadrature PSDs). Signed component spectra (the
        heterodyne cross term) may carry negative samples; totals of real
        observables never do.
    lines : tuple of (omega, weight)
        Dirac components kept separate from the continuum. Only omega in
        {0, +/-delta} occurs in this package.

    Instances are immutable: the arrays are copied and marked read-only.
    """

    grid: np.ndarray
    values: np.ndarray
    lines: tuple = ()

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float, copy=True)
        values = np.array(self.values, dtype=float, copy=True)
        if grid.ndim != 1 or values.ndim != 1:
            raise ValueError("grid and values must be one-dimensional")
        if grid.shape != values.shape:
            raise ValueError(
                f"grid and values length mismatch: {grid.shape} vs {values.shape}"
            )
        if grid.size >= 2 and not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("PSD values must be finite")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(
            self, "lines", tuple((float(w), float(a)) for w, a in self.lines)
        )

    def __len__(self) -> int:
        return self.grid.size


@dataclass(frozen=True)
class TimeTrace:
    """Uniformly sampled real-valued detector record with RNG provenance.

    dt : sample interval (seconds in SI contexts; units of 1/Omega_m in the
        rotating-dimensionless frame).
    samples : real-valued record, length >= 2, read-only.
    seed : RNG seed the record is bit-for-bit reproducible from.
    frame : tag naming the unit system of the record; the simulator only
        produces "rotating-dimensionless".
    """

    dt: float
    samples: np.ndarray
    seed: int
    frame: str = "rotating-dimensionless"

    _FRAMES = ("rotating-dimensionless",)

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        samples = np.array(self.samples, dtype=float, copy=True)
        if samples.ndim != 1 or samples.size < 2:
            raise ValueError("samples must be a 1-d array of length >= 2")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.frame not in self._FRAMES:
            raise ValueError(f"unknown frame tag {self.frame!r}")

    def __len__(self) -> int:
        return self.samples.size
