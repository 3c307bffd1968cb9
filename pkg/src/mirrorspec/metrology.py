"""Sideband analysis: peak fitting, asymmetry, thermometry, power sweeps.

The primary observable throughout is the integrated sideband area, not the
peak height: under averaged-periodogram estimation a line narrower than a
few bins keeps its area but not its height. Peak heights are derivable
from the fits (`SidebandFit.peak_height`) when a direct comparison with
the spectral-density formulas is wanted; for equal linewidths the ratio of
areas equals the ratio of peaks, so nothing is lost.

All routines are unit-agnostic: they work in whatever frequency unit the
input Spectrum's grid carries (rad/s for the analytic spectra, Omega_m = 1
for simulated ones).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.optimize import curve_fit

from .analytic import total_displacement_psd
from .core import Bath, MechanicalOscillator, OpticalSetup, Spectrum


class FitConvergenceError(RuntimeError):
    """Least-squares sideband fit failed to converge."""


@dataclass(frozen=True)
class SidebandFit:
    """One fitted sideband: Lorentzian line on a constant floor.

    Parameters are (center, linewidth, area, floor) with linewidth the
    full width at half maximum and area the full integral of the line
    (tails extrapolated by the model, so no window correction applies).
    `covariance` is the 4x4 parameter covariance in that order; sigmas
    for unconstrained directions (e.g. the linewidth of a zero-area line)
    can be large or infinite. `chi2_dof` compares the residual power to
    the point scatter (robustly estimated): ~1 means the model describes
    the window within noise.
    """

    center: float
    linewidth: float
    area: float
    floor: float
    covariance: np.ndarray
    chi2_dof: float

    def __post_init__(self):
        if not self.linewidth > 0:
            raise ValueError(f"linewidth must be positive, got {self.linewidth}")
        if self.area < 0:
            raise ValueError(f"area must be >= 0, got {self.area}")
        cov = np.array(self.covariance, dtype=float)
        if cov.shape != (4, 4):
            raise ValueError(f"covariance must be 4x4, got {cov.shape}")
        cov.setflags(write=False)
        object.__setattr__(self, "covariance", cov)

    @property
    def center_sigma(self) -> float:
        return math.sqrt(max(self.covariance[0, 0], 0.0))

    @property
    def linewidth_sigma(self) -> float:
        return math.sqrt(max(self.covariance[1, 1], 0.0))

    @property
    def area_sigma(self) -> float:
        return math.sqrt(max(self.covariance[2, 2], 0.0))

    @property
    def floor_sigma(self) -> float:
        return math.sqrt(max(self.covariance[3, 3], 0.0))

    @property
    def peak_height(self) -> float:
        """Line height above the floor: 2*area/(pi*linewidth)."""
        return 2.0 * self.area / (math.pi * self.linewidth)


def _lorentzian(w, center, fwhm, area, floor):
    hw = fwhm / 2.0
    return floor + area * hw / (math.pi * ((w - center) ** 2 + hw * hw))


def _crossing_width(w, s, floor0):
    """Full width of the contiguous half-maximum region around the peak."""
    peak = np.argmax(s)
    half = floor0 + (s[peak] - floor0) / 2.0
    lo = peak
    while lo > 0 and s[lo - 1] > half:
        lo -= 1
    hi = peak
    while hi < len(s) - 1 and s[hi + 1] > half:
        hi += 1
    dw = w[1] - w[0] if len(w) > 1 else 1.0
    return max((hi - lo + 1) * dw, 2.0 * dw)


def _fit_lobe(grid, values, center_guess, halfwidth, width_guess) -> SidebandFit:
    mask = (grid >= center_guess - halfwidth) & (grid <= center_guess + halfwidth)
    n = int(np.count_nonzero(mask))
    if n < 12:
        raise ValueError(
            f"fit window around {center_guess:g} contains only {n} bins (need >= 12)"
        )
    # Normalize so the optimizer sees O(1) parameters regardless of the
    # input's units: frequencies in window halfwidths about the guess,
    # densities in units of the window maximum.
    sscale = float(np.max(values[mask]))
    if not sscale > 0:
        sscale = 1.0
    w = (grid[mask] - center_guess) / halfwidth
    s = values[mask] / sscale
    dw = w[1] - w[0]

    floor0 = float(np.percentile(s, 25))
    c0 = float(w[np.argmax(s)])
    if width_guess is not None:
        w0 = width_guess / halfwidth
    else:
        w0 = _crossing_width(w, s, floor0)
    w0 = float(np.clip(w0, dw, w[-1] - w[0]))
    area0 = max(float(s.max() - floor0), 0.0) * math.pi * w0 / 2.0

    p0 = [c0, w0, max(area0, 0.0), max(floor0, 0.0)]
    lo = [w[0], dw / 4.0, 0.0, 0.0]
    hi = [w[-1], 4.0 * (w[-1] - w[0]), np.inf, np.inf]
    p0 = [min(max(p, l), h if np.isfinite(h) else p) for p, l, h in zip(p0, lo, hi)]

    try:
        popt, pcov = curve_fit(
            _lorentzian, w, s, p0=p0, bounds=(lo, hi), method="trf", maxfev=10000
        )
    except (RuntimeError, ValueError) as exc:
        raise FitConvergenceError(
            f"sideband fit around {center_guess:g} did not converge: {exc}"
        ) from exc

    resid = s - _lorentzian(w, *popt)
    dof = max(n - 4, 1)
    scatter = 1.4826 * float(np.median(np.abs(resid - np.median(resid))))
    if scatter > 0:
        chi2_dof = float(np.sum(resid**2)) / (dof * scatter**2)
    else:
        chi2_dof = 0.0

    # Undo the normalization: diag jacobian for (center, fwhm, area, floor).
    jac = np.array([halfwidth, halfwidth, sscale * halfwidth, sscale])
    pcov = pcov * np.outer(jac, jac)
    return SidebandFit(
        center=float(center_guess + popt[0] * halfwidth),
        linewidth=float(popt[1] * halfwidth),
        area=float(popt[2] * sscale * halfwidth),
        floor=float(popt[3] * sscale),
        covariance=pcov,
        chi2_dof=chi2_dof,
    )


def fit_sidebands(
    spec: Spectrum,
    delta: float,
    omega_m_guess: float,
    gamma_guess: float | None = None,
):
    """Fit the two motional sidebands of a heterodyne spectrum.

    Fits Lorentzian + constant floor in a window around each of
    delta - omega_m_guess (red, Stokes) and delta + omega_m_guess (blue,
    anti-Stokes). The window is +/- 10 linewidths, capped at 0.45 of the
    sideband spacing so the windows never touch each other or the carrier;
    when `gamma_guess` is omitted the linewidth is bootstrapped from the
    half-maximum width in a wide first pass and the fit repeated.

    The spectrum must resolve the line (several bins per linewidth) and
    cover both windows.

    Returns
    -------
    (red, blue) : tuple of SidebandFit
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if omega_m_guess <= 0:
        raise ValueError(f"omega_m_guess must be positive, got {omega_m_guess}")

    cap = 0.45 * omega_m_guess

    def window(width_guess):
        if width_guess is None:
            return cap
        return min(10.0 * width_guess, cap)

    fits = []
    for center in (delta - omega_m_guess, delta + omega_m_guess):
        if center - cap < spec.grid[0] or center + cap > spec.grid[-1]:
            raise ValueError(
                f"fit window around {center:g} extends outside the grid "
                f"[{spec.grid[0]:g}, {spec.grid[-1]:g}]"
            )
        guess = gamma_guess
        if guess is None:
            first = _fit_lobe(spec.grid, spec.values, center, cap, None)
            guess = first.linewidth
        fits.append(
            _fit_lobe(spec.grid, spec.values, center, window(guess), guess)
        )
    return fits[0], fits[1]


class AsymmetryResult(NamedTuple):
    """Sideband asymmetry: (red - blue) area difference and blue/red ratio.

    The first two fields carry the observables; the sigmas propagate the
    fit covariances assuming independent fits.
    """

    difference: float
    ratio: float
    difference_sigma: float
    ratio_sigma: float


def asymmetry(red: SidebandFit, blue: SidebandFit) -> AsymmetryResult:
    """Area difference red - blue and area ratio blue/red, with errors.

    The difference measures the backaction rate alone; the ratio
    (Gamma/gamma + nbar)/(Gamma/gamma + nbar + 1) feeds thermometry.
    """
    if red.area <= 0:
        raise ValueError("red sideband area is not positive; asymmetry undefined")
    diff = red.area - blue.area
    ratio = blue.area / red.area
    sr, sb = red.area_sigma, blue.area_sigma
    diff_sigma = math.hypot(sr, sb)
    ratio_sigma = abs(ratio) * math.hypot(
        sb / blue.area if blue.area > 0 else 0.0, sr / red.area
    )
    return AsymmetryResult(diff, ratio, diff_sigma, ratio_sigma)


class ThermometryResult(NamedTuple):
    """Occupation estimate from sideband areas.

    nbar is NaN and `unphysical` True when the areas are ordered the wrong
    way (red <= blue), which no thermal state produces.
    """

    nbar: float
    sigma: float
    unphysical: bool


def thermometry(
    red: SidebandFit, blue: SidebandFit, gamma_ratio: float = 0.0
) -> ThermometryResult:
    """Infer the thermal occupation from the fitted sideband areas.

    nbar = blue/(red - blue) - gamma_ratio, where gamma_ratio is the known
    backaction-to-damping ratio Gamma/gamma (0 when backaction is
    negligible). The uncertainty is first-order propagation of the two
    area variances. No calibration of the transduction gain is needed:
    it cancels in the area ratio.
    """
    r, b = red.area, blue.area
    sr, sb = red.area_sigma, blue.area_sigma
    if r <= b:
        sigma = math.inf
        if r > 0 and r != b:
            d = r - b
            sigma = math.hypot(b * sr, r * sb) / d**2
        return ThermometryResult(math.nan, sigma, True)
    d = r - b
    nbar = b / d - gamma_ratio
    sigma = math.hypot(b * sr, r * sb) / d**2
    return ThermometryResult(nbar, sigma, False)


@dataclass(frozen=True)
class SqlSweepResult:
    """Brute-force power sweep of the total displacement noise.

    powers and total_psd are aligned arrays; power_opt/psd_min locate the
    sweep minimum (argmin_index into both arrays).
    """

    powers: np.ndarray
    total_psd: np.ndarray
    argmin_index: int
    power_opt: float
    psd_min: float

    def __post_init__(self):
        for name in ("powers", "total_psd"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def sql_sweep(
    osc: MechanicalOscillator,
    opt: OpticalSetup,
    bath: Bath,
    omega_probe: float,
    power_grid,
) -> SqlSweepResult:
    """Evaluate the total displacement PSD at omega_probe over a power grid.

    `opt` is a template whose p_in is replaced by each grid value. The
    sweep brackets the imprecision/backaction crossover: the returned
    argmin should sit within one grid step of the closed-form optimum for
    any grid that spans it (log-spaced over several decades recommended;
    at the edges the curve approaches the 1/p and p asymptotes).
    """
    powers = np.asarray(power_grid, dtype=float)
    if powers.ndim != 1 or len(powers) < 2:
        raise ValueError("power_grid must be a 1-D array with at least 2 points")
    if not np.all(powers > 0):
        raise ValueError("powers must be positive")
    if not np.all(np.diff(powers) > 0):
        raise ValueError("power_grid must be strictly increasing")

    psd = np.array(
        [
            float(total_displacement_psd(osc, replace(opt, p_in=p), bath, omega_probe))
            for p in powers
        ]
    )
    k = int(np.argmin(psd))
    return SqlSweepResult(
        powers=powers,
        total_psd=psd,
        argmin_index=k,
        power_opt=float(powers[k]),
        psd_min=float(psd[k]),
    )
