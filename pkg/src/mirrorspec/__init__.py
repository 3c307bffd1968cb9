"""Noise spectra of a laser-probed mechanical mirror.

A suspended mirror in a coherent beam imprints its motion on the phase of
the reflected light while radiation-pressure shot noise drives that motion
in return. This package computes the resulting photocurrent spectra three
independent ways and analyzes them:

* `analytic`: closed-form heterodyne/homodyne detector spectra in SI units,
  force spectra, imprecision, total displacement noise, optimal power;
* `qcheck`: the same heterodyne/homodyne spectra assembled from quadrature
  input-output relations, for exact cross-validation;
* `sim`: time-domain Monte Carlo of the driven oscillator with shared
  noise between force and record, plus Welch estimation;
* `metrology`: Lorentzian sideband fits, asymmetry, thermometry, and
  total-noise power sweeps;
* `cli`: config-driven batch interface (`mirrorspec` console command).

Conventions: two-sided spectral densities on angular-frequency grids
throughout; see each module's docstring for units.
"""

__version__ = "0.1.0"

from .analytic import (
    GRID_BANDWIDTH_FACTOR,
    HeterodynePSDBreakdown,
    SqlResult,
    ZeroInputPowerError,
    displacement_psd,
    heterodyne_psd,
    homodyne_imprecision_psd,
    homodyne_psd,
    imprecision_psd,
    recoil_rate,
    rp_force_psd,
    shot_noise_floor,
    sql_power,
    steady_state_energy,
    susceptibility,
    thermal_force_psd,
    total_displacement_psd,
)
from .core import (
    C_LIGHT,
    HBAR,
    K_B,
    Bath,
    MechanicalOscillator,
    OpticalSetup,
    RegimeWarning,
    Spectrum,
    TimeTrace,
    mean_occupation,
    thermal_coth,
    zero_point_amplitude,
)
from .metrology import (
    AsymmetryResult,
    FitConvergenceError,
    SidebandFit,
    SqlSweepResult,
    ThermometryResult,
    asymmetry,
    fit_sidebands,
    sql_sweep,
    thermometry,
)
from .qcheck import (
    QuadratureSpectra,
    heterodyne_quantum_psd,
    homodyne_quantum_psd,
    input_quadrature_psd,
    output_quadrature_psd,
    quadrature_spectra,
    quantum_cross_term,
    quantum_position_term,
)
from .sim import (
    SimConfig,
    SimResult,
    SimState,
    SimulationDivergedError,
    detector_record,
    simulate,
    step,
    synth_noise,
    welch_psd,
)

__all__ = [
    "__version__",
    # constants
    "C_LIGHT",
    "HBAR",
    "K_B",
    "GRID_BANDWIDTH_FACTOR",
    # core types
    "Bath",
    "MechanicalOscillator",
    "OpticalSetup",
    "RegimeWarning",
    "Spectrum",
    "TimeTrace",
    "mean_occupation",
    "thermal_coth",
    "zero_point_amplitude",
    # analytic
    "HeterodynePSDBreakdown",
    "SqlResult",
    "ZeroInputPowerError",
    "displacement_psd",
    "heterodyne_psd",
    "homodyne_imprecision_psd",
    "homodyne_psd",
    "imprecision_psd",
    "recoil_rate",
    "rp_force_psd",
    "shot_noise_floor",
    "sql_power",
    "steady_state_energy",
    "susceptibility",
    "thermal_force_psd",
    "total_displacement_psd",
    # quadrature route
    "QuadratureSpectra",
    "heterodyne_quantum_psd",
    "homodyne_quantum_psd",
    "input_quadrature_psd",
    "output_quadrature_psd",
    "quadrature_spectra",
    "quantum_cross_term",
    "quantum_position_term",
    # simulation
    "SimConfig",
    "SimResult",
    "SimState",
    "SimulationDivergedError",
    "detector_record",
    "simulate",
    "step",
    "synth_noise",
    "welch_psd",
    # metrology
    "AsymmetryResult",
    "FitConvergenceError",
    "SidebandFit",
    "SqlSweepResult",
    "ThermometryResult",
    "asymmetry",
    "fit_sidebands",
    "sql_sweep",
    "thermometry",
]
