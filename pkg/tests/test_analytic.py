"""Closed-form spectra: susceptibility, force noises, detector spectra, SQL."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from mirrorspec import (
    HBAR,
    Bath,
    MechanicalOscillator,
    OpticalSetup,
    RegimeWarning,
    ZeroInputPowerError,
    displacement_psd,
    heterodyne_psd,
    homodyne_imprecision_psd,
    homodyne_psd,
    imprecision_psd,
    mean_occupation,
    recoil_rate,
    rp_force_psd,
    shot_noise_floor,
    sql_power,
    steady_state_energy,
    susceptibility,
    thermal_force_psd,
    total_displacement_psd,
    zero_point_amplitude,
)
from conftest import GAMMA, MASS, OMEGA0, OMEGA_M


def _grid(delta, half=3.0, n=4096):
    return np.linspace(delta - half * OMEGA_M, delta + half * OMEGA_M, n)


class TestSusceptibility:
    def test_resonance_value(self, osc):
        # chi(Omega_m) = i/(m*gamma*Omega_m)
        chi = susceptibility(osc, OMEGA_M)
        expected = 1j / (MASS * GAMMA * OMEGA_M)
        assert abs(chi - expected) / abs(expected) < 1e-12

    def test_static_response(self, osc):
        assert susceptibility(osc, 0.0) == pytest.approx(1.0 / (MASS * OMEGA_M**2))

    @given(st.floats(-1e7, 1e7))
    def test_conjugate_symmetry(self, w):
        osc = MechanicalOscillator(mass=MASS, omega_m=OMEGA_M, gamma=GAMMA)
        a = susceptibility(osc, -w)
        b = np.conj(susceptibility(osc, w))
        assert abs(a - b) <= 1e-12 * abs(b)

    def test_far_wing_rolloff(self, osc):
        # |chi(10*Om)|^2/|chi(Om)|^2 = (gamma/(99*Omega))^2 to leading order;
        # (1e-4/99)^2 = 1.0203e-12 at this fixture's gamma
        r = abs(susceptibility(osc, 10 * OMEGA_M)) ** 2 / abs(
            susceptibility(osc, OMEGA_M)
        ) ** 2
        assert r == pytest.approx(1.0203e-12, rel=1e-3)

    def test_array_scalar_agree(self, osc):
        ws = np.array([0.3 * OMEGA_M, OMEGA_M, 4.0 * OMEGA_M])
        arr = susceptibility(osc, ws)
        assert arr.dtype == complex
        for i, w in enumerate(ws):
            assert arr[i] == susceptibility(osc, float(w))


class TestForceNoise:
    def test_thermal_reference_value(self, osc, bath):
        # gamma*m*hbar*Omega*(2*nbar+1)/(2*pi) at nbar = 2.527726, frozen
        assert thermal_force_psd(osc, bath) == pytest.approx(4.012386e-39, rel=1e-6)

    def test_thermal_zero_point_floor(self, osc, cold):
        expected = GAMMA * MASS * HBAR * OMEGA_M / (2.0 * math.pi)
        assert thermal_force_psd(osc, cold) == pytest.approx(expected, rel=1e-12)

    def test_rp_value(self, opt, osc):
        expected = 4.0 * HBAR * OMEGA0 * 1e-3 / (2.0 * math.pi * 299792458.0**2)
        assert rp_force_psd(opt, osc) == pytest.approx(expected, rel=1e-9)

    def test_rp_equals_recoil_form(self, opt, osc):
        # S_FF^rp = hbar^2*Gamma/(2*pi*z_zp^2): same number, different bookkeeping
        g = recoil_rate(opt, osc)
        z = zero_point_amplitude(osc)
        assert rp_force_psd(opt, osc) == pytest.approx(
            HBAR**2 * g / (2.0 * math.pi * z**2), rel=1e-12
        )

    def test_recoil_reference_value(self, opt, osc):
        assert recoil_rate(opt, osc) == pytest.approx(43.040528, rel=1e-6)

    def test_steady_state_energy_identity(self, opt, osc):
        # E_inf = hbar*Omega*Gamma/gamma
        e = steady_state_energy(opt, osc)
        assert e == pytest.approx(
            HBAR * OMEGA_M * recoil_rate(opt, osc) / GAMMA, rel=1e-12
        )
        assert e == pytest.approx(4.538933e-29, rel=1e-6)

    def test_shot_floor(self, opt):
        assert shot_noise_floor(1e-3, opt) == pytest.approx(2.039695e-23, rel=1e-6)
        with pytest.raises(ValueError):
            shot_noise_floor(-1e-3, opt)

    @given(st.floats(1e-6, 10.0))
    def test_rp_linear_in_power(self, p):
        opt = OpticalSetup(omega0=OMEGA0, p_in=p, p_ref=0.1)
        base = OpticalSetup(omega0=OMEGA0, p_in=1.0, p_ref=0.1)
        assert rp_force_psd(opt) == pytest.approx(p * rp_force_psd(base), rel=1e-12)


class TestDisplacementPSD:
    def test_peak_height(self, osc, opt, bath):
        s_ff = rp_force_psd(opt, osc) + thermal_force_psd(osc, bath)
        peak = displacement_psd(osc, opt, bath, OMEGA_M)
        assert peak == pytest.approx(s_ff / (MASS * GAMMA * OMEGA_M) ** 2, rel=1e-12)

    def test_area_equipartition(self, osc, opt, cold):
        """<z^2> from the spectrum: int |chi|^2 S_FF dw = (2*nbar_eff+1)*z_zp^2.

        At T = 0 with backaction only, nbar_eff = Gamma/gamma, so
        <z^2> = (2*Gamma/gamma + 1)*z_zp^2 ... minus the zero-point term,
        which the classical displacement spectrum does not carry: the
        backaction-driven variance alone is 2*(Gamma/gamma)*z_zp^2.
        """
        val, _ = quad(
            lambda w: float(displacement_psd(osc, opt, cold, w)),
            0, 20 * OMEGA_M, points=[OMEGA_M], limit=200,
        )
        var = 2 * val  # even integrand
        g_ratio = recoil_rate(opt, osc) / GAMMA
        z2 = zero_point_amplitude(osc) ** 2
        # thermal T=0 adds the half-quantum floor: total (2*G/g + 1)*z_zp^2
        assert var == pytest.approx((2 * g_ratio + 1) * z2, rel=1e-4)


class TestHeterodyne:
    def test_total_is_sum(self, osc, opt, bath):
        grid = _grid(opt.delta)
        bk = heterodyne_psd(osc, opt, bath, grid)
        total = bk.s2 + bk.s3.values + bk.s4.values
        assert np.allclose(bk.total.values, total, rtol=1e-14)

    def test_red_exceeds_blue(self, osc, opt, bath):
        grid = _grid(opt.delta)
        bk = heterodyne_psd(osc, opt, bath, grid)
        red = bk.total.values[np.argmin(np.abs(grid - (opt.delta - OMEGA_M)))]
        blue = bk.total.values[np.argmin(np.abs(grid - (opt.delta + OMEGA_M)))]
        assert red > blue > bk.s2

    def test_peak_ratio_formula(self, osc, opt, bath):
        """Peak heights over the floor scale as (G/g+n+1) vs (G/g+n)."""
        d = opt.delta
        bk = heterodyne_psd(
            osc, opt, bath, np.array([d - OMEGA_M, d + OMEGA_M])
        )
        s34 = bk.s3.values + bk.s4.values
        g_ratio = recoil_rate(opt, osc) / GAMMA
        nbar = mean_occupation(bath, osc)
        expected = (g_ratio + nbar) / (g_ratio + nbar + 1.0)
        assert s34[1] / s34[0] == pytest.approx(expected, rel=1e-6)

    def test_s4_even_in_omega(self, osc, opt, bath):
        """A real photocurrent has an even PSD; each term inherits that."""
        w = np.linspace(1.0, 12 * OMEGA_M, 777)
        grid = np.concatenate([-w[::-1], w])
        bk = heterodyne_psd(osc, opt, bath, grid)
        for part in (bk.s3.values, bk.s4.values):
            assert np.max(
                np.abs(part[: len(w)][::-1] - part[len(w):])
            ) <= 1e-12 * np.max(np.abs(part))

    def test_s4_antisymmetric_about_carrier(self, osc, opt, bath):
        """Red/blue weights mirror with opposite sign around the beat
        frequency, up to the tiny chi(2*Delta +/- x) wing."""
        x = np.linspace(0.2 * OMEGA_M, 2 * OMEGA_M, 513)
        up = heterodyne_psd(osc, opt, bath, opt.delta + x).s4.values
        dn = heterodyne_psd(osc, opt, bath, (opt.delta - x)[::-1]).s4.values[::-1]
        assert np.max(np.abs(up + dn)) <= 1e-4 * np.max(np.abs(up))

    def test_s4_temperature_independent(self, osc, opt):
        grid = _grid(opt.delta)
        hot = heterodyne_psd(osc, opt, Bath(temperature=1e-3), grid)
        cold = heterodyne_psd(osc, opt, Bath(temperature=0.0), grid)
        num = np.max(np.abs(hot.s4.values - cold.s4.values))
        assert num <= 1e-10 * np.max(np.abs(cold.s4.values))

    def test_floor_value(self, osc, opt, bath):
        bk = heterodyne_psd(osc, opt, bath, _grid(opt.delta))
        assert bk.s2 == pytest.approx(
            opt.eta * opt.p_ref * HBAR * OMEGA0 / (2 * math.pi), rel=1e-12
        )

    def test_lines(self, osc, opt, bath):
        bk = heterodyne_psd(osc, opt, bath, _grid(opt.delta))
        lines = dict(bk.s1_lines)
        assert lines[0.0] == pytest.approx(opt.p_ref**2)
        assert lines[opt.delta] == pytest.approx(opt.p_in * opt.p_ref)
        assert lines[-opt.delta] == pytest.approx(opt.p_in * opt.p_ref)
        assert bk.total.lines == bk.s1_lines

    def test_rejects_homodyne_input(self, osc, bath):
        opt0 = OpticalSetup(omega0=OMEGA0, p_in=1e-3, p_ref=0.1, delta=0.0)
        with pytest.raises(ValueError, match="homodyne"):
            heterodyne_psd(osc, opt0, bath, np.linspace(1e4, 1e6, 64))

    def test_rejects_optical_scale_grid(self, osc, opt, bath):
        with pytest.raises(ValueError):
            heterodyne_psd(osc, opt, bath, np.linspace(0.0, OMEGA0 / 5, 64))

    def test_warns_outside_regime(self, osc, bath):
        tight = OpticalSetup(
            omega0=OMEGA0, p_in=1e-3, p_ref=0.1, delta=2.0 * OMEGA_M
        )
        with pytest.warns(RegimeWarning):
            heterodyne_psd(osc, tight, bath, _grid(tight.delta, half=0.5))

    def test_efficiency_scaling(self, osc, bath):
        """s3 and s4 carry eta^2; the rp part of S_FF keeps the bare power."""
        grid = _grid(8 * OMEGA_M)
        full = heterodyne_psd(
            osc,
            OpticalSetup(omega0=OMEGA0, p_in=1e-3, p_ref=0.1, delta=8 * OMEGA_M),
            bath, grid,
        )
        half = heterodyne_psd(
            osc,
            OpticalSetup(
                omega0=OMEGA0, p_in=1e-3, p_ref=0.1, delta=8 * OMEGA_M, eta=0.5
            ),
            bath, grid,
        )
        assert np.allclose(half.s4.values, 0.25 * full.s4.values, rtol=1e-12)
        assert half.s2 == pytest.approx(0.5 * full.s2, rel=1e-12)
        assert np.allclose(half.s3.values, 0.25 * full.s3.values, rtol=1e-12)


class TestHomodyne:
    def test_amplitude_quadrature_flat(self, osc, bath):
        opt = OpticalSetup(omega0=OMEGA0, p_in=1e-3, p_ref=0.1, theta=0.0)
        s = homodyne_psd(osc, opt, bath, np.linspace(1e4, 1e6, 256))
        floor = shot_noise_floor(opt.eta * opt.p_ref, opt)
        assert np.allclose(s.values, floor, rtol=1e-12)

    def test_phase_quadrature_peak(self, osc, bath):
        opt = OpticalSetup(
            omega0=OMEGA0, p_in=1e-3, p_ref=0.1, theta=math.pi / 2
        )
        grid = np.linspace(0.5 * OMEGA_M, 1.5 * OMEGA_M, 2001)
        s = homodyne_psd(osc, opt, bath, grid)
        peak_w = grid[np.argmax(s.values)]
        assert abs(peak_w - OMEGA_M) < 2 * (grid[1] - grid[0])

    def test_dc_line(self, osc, bath):
        opt = OpticalSetup(omega0=OMEGA0, p_in=1e-3, p_ref=0.1)
        s = homodyne_psd(osc, opt, bath, np.linspace(1e4, 1e6, 64))
        assert s.lines == ((0.0, opt.p_ref**2),)

    def test_squeezing_exists_somewhere(self, osc, cold):
        # strong drive, T = 0: some phase dips below the shot floor
        opt = OpticalSetup(
            omega0=OMEGA0, p_in=7.3e-3, p_ref=0.1, theta=2.936
        )
        grid = np.linspace(0.95 * OMEGA_M, 1.05 * OMEGA_M, 4001)
        s = homodyne_psd(osc, opt, cold, grid)
        floor = shot_noise_floor(opt.eta * opt.p_ref, opt)
        assert np.min(s.values) < floor


class TestImprecisionAndSql:
    def test_imprecision_value(self, opt):
        expected = HBAR * OMEGA0 / (8 * math.pi * opt.k0**2 * opt.eta * opt.p_in)
        assert imprecision_psd(opt) == pytest.approx(expected, rel=1e-12)

    def test_zero_power_raises(self):
        opt = OpticalSetup(omega0=OMEGA0, p_in=0.0, p_ref=0.1)
        with pytest.raises(ZeroInputPowerError):
            imprecision_psd(opt)

    def test_homodyne_imprecision_is_quarter(self, opt):
        assert homodyne_imprecision_psd(opt) == imprecision_psd(opt) / 4

    def test_homodyne_imprecision_zero_power_raises(self):
        opt = OpticalSetup(omega0=OMEGA0, p_in=0.0, p_ref=0.1)
        with pytest.raises(ZeroInputPowerError):
            homodyne_imprecision_psd(opt)

    def test_total_decomposition(self, osc, opt, bath):
        w = 1.3 * OMEGA_M
        chi_p = susceptibility(osc, w + opt.delta)
        chi_m = susceptibility(osc, w - opt.delta)
        chi2 = abs(chi_p) ** 2 + abs(chi_m) ** 2
        expected = (
            imprecision_psd(opt)
            + chi2 * (thermal_force_psd(osc, bath) + rp_force_psd(opt, osc))
            + HBAR / (2 * math.pi) * (chi_p - chi_m).imag
        )
        assert total_displacement_psd(osc, opt, bath, w) == pytest.approx(
            expected, rel=1e-12
        )

    def test_sql_scaling_with_eta(self, osc):
        w = 1.5 * OMEGA_M
        p1 = sql_power(
            osc, OpticalSetup(omega0=OMEGA0, p_in=1e-3, p_ref=0.1,
                              delta=8 * OMEGA_M, eta=1.0), w,
        )
        p4 = sql_power(
            osc, OpticalSetup(omega0=OMEGA0, p_in=1e-3, p_ref=0.1,
                              delta=8 * OMEGA_M, eta=0.25), w,
        )
        assert p4.power == pytest.approx(2.0 * p1.power, rel=1e-12)

    def test_sql_is_the_minimum(self, osc, cold):
        from dataclasses import replace

        opt = OpticalSetup(omega0=OMEGA0, p_in=1e-3, p_ref=0.1, delta=8 * OMEGA_M)
        w = 1.5 * OMEGA_M
        res = sql_power(osc, opt, w)
        for factor in (0.5, 0.9, 1.1, 2.0):
            other = float(
                total_displacement_psd(
                    osc, replace(opt, p_in=res.power * factor), cold, w
                )
            )
            assert other > res.psd_min

    def test_sql_balance(self, osc, cold):
        """At p_opt the imprecision equals the backaction contribution."""
        from dataclasses import replace

        opt = OpticalSetup(omega0=OMEGA0, p_in=1e-3, p_ref=0.1, delta=8 * OMEGA_M)
        w = 1.5 * OMEGA_M
        res = sql_power(osc, opt, w)
        at = replace(opt, p_in=res.power)
        chi_p = susceptibility(osc, w + opt.delta)
        chi_m = susceptibility(osc, w - opt.delta)
        chi2 = abs(chi_p) ** 2 + abs(chi_m) ** 2
        back = chi2 * rp_force_psd(at, osc)
        assert imprecision_psd(at) == pytest.approx(back, rel=1e-12)
