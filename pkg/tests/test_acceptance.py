"""End-to-end acceptance gate: one test per release criterion.

Nine self-contained tests, each carrying its own tolerance. 1-3 and 8 are
closed-form identities, 4-7 compare seeded Monte Carlo runs against the
analytic predictions, 9 is the ponderomotive-squeezing property. Run with
-v for one pass/fail line per criterion. Every statistical test pins the
RNG seed, so the asserted numbers are bit-for-bit reproducible; the
tolerances were checked to hold across neighboring seeds as well, not
tuned to the pinned one.
"""

import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from mirrorspec import (
    C_LIGHT,
    HBAR,
    K_B,
    Bath,
    MechanicalOscillator,
    OpticalSetup,
    SimConfig,
    asymmetry,
    fit_sidebands,
    heterodyne_psd,
    heterodyne_quantum_psd,
    homodyne_imprecision_psd,
    homodyne_psd,
    homodyne_quantum_psd,
    imprecision_psd,
    recoil_rate,
    rp_force_psd,
    simulate,
    sql_power,
    sql_sweep,
    steady_state_energy,
    susceptibility,
    thermometry,
)

MASS = 1e-12
OMEGA_M = 2.0 * math.pi * 1e5
OMEGA0 = 2.0 * math.pi * C_LIGHT / 1.55e-6


def _bath_for(nbar):
    """Bath whose mean occupation at OMEGA_M is exactly nbar."""
    if nbar == 0.0:
        return Bath(temperature=0.0)
    t = HBAR * OMEGA_M / (K_B * math.log(1.0 + 1.0 / nbar))
    return Bath(temperature=t)


def _p_in_for(recoil_si):
    """Input power that produces the requested recoil rate [rad/s]."""
    return recoil_si * MASS * C_LIGHT**2 * OMEGA_M / (2.0 * OMEGA0)


# (Gamma/gamma, nbar, theta) spanning backaction from none to dominant
# and occupation from ground state to strongly thermal.
CLASSICAL_QUANTUM_SETS = [
    (0.0, 0.0, 0.3),
    (0.5, 1.0, 0.5 * math.pi),
    (1.0, 3.0, 1.1),
    (5.0, 10.0, 2.0),
    (10.0, 20.0, 2.936),
]


def test_criterion_1_classical_quantum_equality():
    """Photocurrent PSDs over P_ref*hbar*omega0 equal the quadrature forms.

    Heterodyne and homodyne, five parameter sets spanning Gamma/gamma in
    [0, 10] and nbar in [0, 20], 2048-point grids, pointwise agreement to
    1e-12 relative, all inside one second.
    """
    t0 = time.perf_counter()
    osc = MechanicalOscillator(mass=MASS, omega_m=OMEGA_M, gamma=1e-3 * OMEGA_M)
    delta = 8.0 * OMEGA_M
    het_grid = np.linspace(delta - 3.0 * OMEGA_M, delta + 3.0 * OMEGA_M, 2048)
    hom_grid = np.linspace(-3.0 * OMEGA_M, 3.0 * OMEGA_M, 2048)
    for g_ratio, nbar, theta in CLASSICAL_QUANTUM_SETS:
        p_in = _p_in_for(g_ratio * osc.gamma)
        bath = _bath_for(nbar)
        het = OpticalSetup(
            omega0=OMEGA0, p_in=p_in, p_ref=0.1, delta=delta, eta=1.0
        )
        hom = OpticalSetup(
            omega0=OMEGA0, p_in=p_in, p_ref=0.1, delta=0.0, theta=theta, eta=1.0
        )
        recoil_si = recoil_rate(het, osc)
        scale = het.p_ref * HBAR * OMEGA0

        classical = heterodyne_psd(osc, het, bath, het_grid).total.values / scale
        quantum = heterodyne_quantum_psd(osc, recoil_si, bath, delta, het_grid)
        np.testing.assert_allclose(classical, quantum.values, rtol=1e-12)

        classical = homodyne_psd(osc, hom, bath, hom_grid).values / scale
        quantum = homodyne_quantum_psd(osc, recoil_si, bath, theta, hom_grid)
        np.testing.assert_allclose(classical, quantum.values, rtol=1e-12)
    assert time.perf_counter() - t0 < 1.0


def test_criterion_2_heisenberg_products():
    """Imprecision-backaction PSD products and their factor-4 ratio.

    Heterodyne: S_im * S_rp = hbar^2/(4 pi^2 eta). Phase-quadrature
    homodyne: hbar^2/(16 pi^2 eta). Each to 1e-14 relative for eta in
    {0.25, 0.5, 1}, and the heterodyne/homodyne imprecision ratio is
    exactly 4.
    """
    for eta in (0.25, 0.5, 1.0):
        opt = OpticalSetup(
            omega0=OMEGA0, p_in=1e-3, p_ref=0.1, delta=8.0 * OMEGA_M, eta=eta
        )
        s_rp = rp_force_psd(opt)
        het = imprecision_psd(opt) * s_rp
        hom = homodyne_imprecision_psd(opt) * s_rp
        assert abs(het / (HBAR**2 / (4.0 * math.pi**2 * eta)) - 1.0) <= 1e-14
        assert abs(hom / (HBAR**2 / (16.0 * math.pi**2 * eta)) - 1.0) <= 1e-14
        assert imprecision_psd(opt) / homodyne_imprecision_psd(opt) == 4.0


def test_criterion_3_steady_state_backaction_energy():
    """Quadrature of the backaction-driven energy matches the closed form.

    m*Omega_m^2 * integral |chi|^2 S_rp domega over the full line equals
    2*P*hbar*omega0/(m c^2 gamma) to 1e-6 relative; `steady_state_energy`
    is that closed form to 1e-12. The integrand is even and sharply peaked
    (Q = 1e4), so the quadrature is split at the resonance and the far
    tail is handled as an improper integral.
    """
    osc = MechanicalOscillator(
        mass=MASS, omega_m=OMEGA_M, gamma=2.0 * math.pi * 10.0
    )
    opt = OpticalSetup(omega0=OMEGA0, p_in=1e-3, p_ref=0.1, delta=8.0 * OMEGA_M)
    s_rp = rp_force_psd(opt)

    def chi_sq(w):
        return abs(susceptibility(osc, w)) ** 2

    om, g = OMEGA_M, osc.gamma
    kw = dict(epsabs=0.0, epsrel=1e-11, limit=200)
    pieces = [
        quad(chi_sq, 0.0, om - 20.0 * g, **kw),
        quad(chi_sq, om - 20.0 * g, om + 20.0 * g, points=[om], **kw),
        quad(chi_sq, om + 20.0 * g, 10.0 * om, **kw),
        # tail via u = 1/w: integrand ~ u^2/m^2, smooth down to u = 0
        quad(lambda u: chi_sq(1.0 / u) / u**2, 0.0, 1.0 / (10.0 * om), **kw),
    ]
    integral = 2.0 * sum(p[0] for p in pieces)
    energy = osc.mass * om**2 * s_rp * integral
    expected = 2.0 * opt.p_in * HBAR * OMEGA0 / (osc.mass * C_LIGHT**2 * osc.gamma)
    assert abs(energy / expected - 1.0) <= 1e-6
    assert abs(steady_state_energy(opt, osc) / expected - 1.0) <= 1e-12


def test_criterion_4_shot_noise_floor():
    """Zero recoil, zero occupation: flat record PSD at 1/(2 pi).

    200 Hann segments at 50% overlap, 2^14 samples each. The per-bin
    Welch scatter at this averaging is sigma = sqrt(1.056/200) = 7.3%, so
    2% flatness is asserted on the interior-bin mean; individually the
    bins must stay within 6 sigma with at least 99% inside 3 sigma.
    Under 30 s.
    """
    t0 = time.perf_counter()
    cfg = SimConfig(
        dt=2.0 * math.pi / 64,
        n_samples=1 << 14,
        n_segments=200,
        seed=1,
        gamma=1e-2,
        recoil=0.0,
        nbar=0.0,
        delta=5.0,
    )
    res = simulate(cfg)
    floor = 1.0 / (2.0 * math.pi)
    rel = res.spectrum.values[1:-1] / floor - 1.0  # interior bins
    sigma = math.sqrt(1.056 / 200)
    assert abs(np.mean(rel)) <= 0.02
    assert np.max(np.abs(rel)) <= 6.0 * sigma
    assert np.mean(np.abs(rel) <= 3.0 * sigma) >= 0.99
    assert time.perf_counter() - t0 < 30.0


@pytest.mark.filterwarnings("ignore::mirrorspec.RegimeWarning")
def test_criterion_5_sideband_asymmetry_reproduction():
    """Fitted sideband areas reproduce the closed-form ratio and difference.

    gamma/Omega_m = 1e-3, Delta = 8 Omega_m, dt = 2 pi/64, 400 Hann
    segments, Gamma/gamma in {0, 1} x nbar in {0, 1, 10}, seed 1. With
    backaction the blue/red area ratio matches (Gamma/gamma + nbar) /
    (Gamma/gamma + nbar + 1) within 5%, and the area difference matches
    the temperature-independent value Gamma/Omega_m within 10% while
    staying statistically constant across nbar. Without backaction the
    record decouples from the mirror and both observables collapse to the
    noise scale. Under 5 min total. (dt = 2 pi/64 deliberately sits past
    the sampling-comfort guard at Delta = 8, hence the warning filter;
    the fitted lobes live far below the Nyquist edge.)
    """
    t0 = time.perf_counter()
    gamma = 1e-3
    results = {}
    for g_ratio in (0.0, 1.0):
        for nbar in (0.0, 1.0, 10.0):
            cfg = SimConfig(
                dt=2.0 * math.pi / 64,
                n_samples=1310720,
                n_segments=400,
                seed=1,
                gamma=gamma,
                recoil=g_ratio * gamma,
                nbar=nbar,
                delta=8.0,
            )
            res = simulate(cfg)
            red, blue = fit_sidebands(res.spectrum, 8.0, 1.0, gamma_guess=gamma)
            results[(g_ratio, nbar)] = asymmetry(red, blue)

    for nbar in (0.0, 1.0, 10.0):
        a = results[(1.0, nbar)]
        expected_ratio = (1.0 + nbar) / (2.0 + nbar)
        assert abs(a.ratio / expected_ratio - 1.0) <= 0.05
        assert abs(a.difference / gamma - 1.0) <= 0.10

    with_ba = [results[(1.0, nbar)] for nbar in (0.0, 1.0, 10.0)]
    for i in range(3):
        for j in range(i + 1, 3):
            gap = abs(with_ba[i].difference - with_ba[j].difference)
            bound = 2.0 * math.hypot(
                with_ba[i].difference_sigma, with_ba[j].difference_sigma
            )
            assert gap <= bound

    for nbar in (0.0, 1.0, 10.0):
        a = results[(0.0, nbar)]
        assert abs(a.difference) <= max(3.0 * a.difference_sigma, 1e-4)
    assert time.perf_counter() - t0 < 300.0


def test_criterion_6_decorrelation_removes_asymmetry():
    """The asymmetry requires the shot noise to feed both pathways.

    Identical configurations except that the second one drives the
    backaction force with an independent copy of the detection noise:
    paired, the fitted area difference is a clear (> 5 sigma) detection;
    decorrelated, it is consistent with zero within 2 sigma.
    """
    base = dict(
        dt=2.0 * math.pi / 64,
        n_samples=1 << 17,
        n_segments=200,
        seed=1,
        gamma=1e-2,
        recoil=1e-2,
        nbar=0.0,
        delta=5.0,
    )
    paired = simulate(SimConfig(**base))
    broken = simulate(SimConfig(**base, decorrelate=True))
    red, blue = fit_sidebands(paired.spectrum, 5.0, 1.0, gamma_guess=1e-2)
    a_paired = asymmetry(red, blue)
    red, blue = fit_sidebands(broken.spectrum, 5.0, 1.0, gamma_guess=1e-2)
    a_broken = asymmetry(red, blue)
    assert a_paired.difference > 5.0 * a_paired.difference_sigma
    assert abs(a_broken.difference) <= 2.0 * a_broken.difference_sigma


def test_criterion_7_sideband_thermometry():
    """End-to-end occupation recovery from a simulated heterodyne record.

    nbar = 3, Gamma/gamma = 0.5: fit both sidebands, correct the area
    ratio for backaction, and recover nbar within 10%.
    """
    cfg = SimConfig(
        dt=2.0 * math.pi / 64,
        n_samples=1 << 17,
        n_segments=400,
        seed=1,
        gamma=1e-2,
        recoil=5e-3,
        nbar=3.0,
        delta=5.0,
    )
    res = simulate(cfg)
    red, blue = fit_sidebands(res.spectrum, 5.0, 1.0, gamma_guess=1e-2)
    est = thermometry(red, blue, gamma_ratio=0.5)
    assert not est.unphysical
    assert abs(est.nbar - 3.0) <= 0.3


def test_criterion_8_sql_power_sweep():
    """Brute-force power sweep agrees with the closed-form optimum.

    400-point, 4-decade log grid centered on the closed form, probe at
    1.5 Omega_m, T = 0: the sweep argmin lands within one grid step, the
    achieved minimum matches to 0.1%, and the log-log end slopes show the
    imprecision (1/p) and backaction (p) asymptotes within 5%.
    """
    osc = MechanicalOscillator(
        mass=MASS, omega_m=OMEGA_M, gamma=2.0 * math.pi * 10.0
    )
    opt = OpticalSetup(omega0=OMEGA0, p_in=1e-3, p_ref=0.1, delta=8.0 * OMEGA_M)
    w_probe = 1.5 * OMEGA_M
    closed = sql_power(osc, opt, w_probe)
    grid = np.geomspace(closed.power * 1e-2, closed.power * 1e2, 400)
    sweep = sql_sweep(osc, opt, Bath(temperature=0.0), w_probe, grid)

    step = math.log(grid[1] / grid[0])
    assert abs(math.log(sweep.power_opt / closed.power)) <= step
    assert abs(sweep.psd_min / closed.psd_min - 1.0) <= 1e-3
    slope_lo = math.log(sweep.total_psd[1] / sweep.total_psd[0]) / step
    slope_hi = math.log(sweep.total_psd[-1] / sweep.total_psd[-2]) / step
    assert abs(slope_lo + 1.0) <= 0.05
    assert abs(slope_hi - 1.0) <= 0.05


def test_criterion_9_ponderomotive_squeezing():
    """Grid search finds homodyne noise below the shot floor; the
    simulation confirms the dip.

    Gamma/gamma = 5, T = 0: minimize the homodyne PSD over theta in
    (0, pi) x omega in (0.9, 1.1) Omega_m, assert the minimum undercuts
    1/(2 pi), then simulate at the minimizing phase and compare band
    means over the bins within 2% of the minimum (at least 5 of them) to
    5%. The step dt = 2 pi/512 keeps the integrator's O(dt) half-sample
    phase shift negligible: the dip is a deep cancellation, which
    amplifies that error about sixfold, and at dt = 2 pi/64 it would
    masquerade as a 10% excess.
    """
    gamma = 1e-2
    osc = MechanicalOscillator(mass=MASS, omega_m=OMEGA_M, gamma=gamma * OMEGA_M)
    cold = Bath(temperature=0.0)
    recoil_si = 5.0 * gamma * OMEGA_M
    floor = 1.0 / (2.0 * math.pi)

    thetas = np.linspace(0.0, math.pi, 723)[1:-1]
    w_grid = np.linspace(0.9, 1.1, 2001) * OMEGA_M
    s_min, theta_star = np.inf, None
    for theta in thetas:
        vals = homodyne_quantum_psd(osc, recoil_si, cold, theta, w_grid).values
        k = int(np.argmin(vals))
        if vals[k] < s_min:
            s_min, theta_star = float(vals[k]), float(theta)
    assert s_min < floor

    cfg = SimConfig(
        dt=2.0 * math.pi / 512,
        n_samples=1 << 21,
        n_segments=600,
        seed=1,
        gamma=gamma,
        recoil=5.0 * gamma,
        nbar=0.0,
        delta=0.0,
        theta=theta_star,
    )
    res = simulate(cfg)
    sim_vals = res.spectrum.values[1:]  # skip DC
    ana = homodyne_quantum_psd(
        osc, recoil_si, cold, theta_star, res.spectrum.grid[1:] * OMEGA_M
    ).values
    band = ana <= 1.02 * s_min
    assert np.count_nonzero(band) >= 5
    sim_mean = float(np.mean(sim_vals[band]))
    ana_mean = float(np.mean(ana[band]))
    assert sim_mean < floor
    assert abs(sim_mean / ana_mean - 1.0) <= 0.05
