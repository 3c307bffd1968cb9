"""Batch front-end: config-driven spectra, simulations, and reports.

Subcommands
-----------
analytic     closed-form heterodyne/homodyne spectrum -> CSV
simulate     Monte Carlo trace + Welch PSD -> CSV (dimensionless record units)
compare      simulated vs closed-form vs quadrature-route spectra -> report
thermometry  simulate, fit sidebands, report the occupation estimate
sql          power sweep of the total displacement noise -> CSV table
crosscheck   quadrature-route identity check -> report

Configuration is INI-style with sections [mechanics], [optics], [bath],
[sim]; keys carry their SI unit as a suffix (mass_kg, omega_m_rad_s, ...).
All outputs are deterministic given (config, seed): CSV headers embed every
config key, the derived backaction rate, occupation and zero-point
amplitude, and the package version, with keys sorted; data rows use
shortest round-trip float formatting. Files are written to a temporary
name and atomically renamed.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure
(divergence or fit non-convergence), 4 regime guard tripped under
--strict.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
import warnings

import numpy as np

from . import __version__, analytic, qcheck
from .core import (
    HBAR,
    Bath,
    MechanicalOscillator,
    OpticalSetup,
    RegimeWarning,
    Spectrum,
)
from .metrology import (
    FitConvergenceError,
    asymmetry,
    fit_sidebands,
    sql_sweep,
    thermometry,
)
from .sim import SimConfig, SimulationDivergedError, simulate

DEFAULT_CONFIG = """\
[mechanics]
mass_kg = 1e-14
omega_m_rad_s = 6.283185307179586e5
gamma_rad_s = 1.2566370614359172e4

[optics]
omega0_rad_s = 1.2152590475e15
p_in_w = 1e-3
p_ref_w = 0.1
delta_rad_s = 3.141592653589793e6
theta_rad = 0.0
eta = 1.0

[bath]
temperature_k = 1.4397729e-5

[sim]
dt_s = 7.8125e-8
n_samples = 131072
n_segments = 200
seed = 1
window = hann
overlap = 0.5
"""


class _ConfigError(Exception):
    """Configuration file missing, malformed, or out of domain."""


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def _load_config(path: str | None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    if path is None:
        cp.read_string(DEFAULT_CONFIG)
        return cp
    if not os.path.exists(path):
        raise _ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (configparser.Error, OSError) as exc:
        raise _ConfigError(f"cannot parse config {path}: {exc}") from exc
    return cp


def _get(cp, section, key, cast, default=None):
    if not cp.has_section(section):
        if default is not None:
            return default
        raise _ConfigError(f"missing section [{section}]")
    if not cp.has_option(section, key):
        if default is not None:
            return default
        raise _ConfigError(f"missing key {key} in [{section}]")
    raw = cp.get(section, key)
    try:
        return cast(raw)
    except ValueError as exc:
        raise _ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc


def _build_system(cp):
    """(osc, opt, bath) from the physical config sections."""
    osc = MechanicalOscillator(
        mass=_get(cp, "mechanics", "mass_kg", float),
        omega_m=_get(cp, "mechanics", "omega_m_rad_s", float),
        gamma=_get(cp, "mechanics", "gamma_rad_s", float),
    )
    opt = OpticalSetup(
        omega0=_get(cp, "optics", "omega0_rad_s", float),
        p_in=_get(cp, "optics", "p_in_w", float),
        p_ref=_get(cp, "optics", "p_ref_w", float),
        delta=_get(cp, "optics", "delta_rad_s", float, 0.0),
        theta=_get(cp, "optics", "theta_rad", float, 0.0),
        eta=_get(cp, "optics", "eta", float, 1.0),
    )
    bath = Bath(temperature=_get(cp, "bath", "temperature_k", float))
    return osc, opt, bath


def _build_simconfig(cp, osc, opt, bath, seed=None, segments=None) -> SimConfig:
    """Dimensionless simulation parameters from the physical config."""
    from .core import mean_occupation

    dt_s = _get(cp, "sim", "dt_s", float)
    return SimConfig(
        dt=dt_s * osc.omega_m,
        n_samples=_get(cp, "sim", "n_samples", int),
        n_segments=segments
        if segments is not None
        else _get(cp, "sim", "n_segments", int),
        seed=seed if seed is not None else _get(cp, "sim", "seed", int),
        gamma=osc.gamma / osc.omega_m,
        recoil=analytic.recoil_rate(opt, osc) / osc.omega_m,
        nbar=mean_occupation(bath, osc),
        delta=opt.delta / osc.omega_m,
        theta=opt.theta,
        window=_get(cp, "sim", "window", str, "hann"),
        overlap=_get(cp, "sim", "overlap", float, 0.5),
    )


def _header_entries(cp, osc, opt, bath):
    """All config keys plus derived quantities, as (key, value) strings."""
    from .core import mean_occupation

    entries = {}
    for section in cp.sections():
        for key, val in cp.items(section):
            entries[f"{section}.{key}"] = val
    entries["derived.recoil_rate_rad_s"] = repr(analytic.recoil_rate(opt, osc))
    entries["derived.nbar"] = repr(mean_occupation(bath, osc))
    entries["derived.z_zp_m"] = repr(osc.z_zp)
    entries["mirrorspec_version"] = __version__
    return entries


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _atomic_write(path: str, text: str):
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_csv(path, entries, spec: Spectrum, columns, per_hz=False, one_sided=False):
    """Spectrum CSV: sorted `# key=value` headers, LINE block, data rows.

    per_hz converts the density to per-Hz on a Hz axis (values x 2*pi,
    axis / 2*pi); one_sided folds to the nonnegative axis (values x 2 off
    DC, line weights at -w folded onto +w). Both act at emission only.
    """
    grid = np.asarray(spec.grid, float)
    vals = np.asarray(spec.values, float)
    lines = [(float(w), float(a)) for w, a in spec.lines]

    if one_sided:
        mask = grid >= 0
        factor = np.where(grid[mask] > 0, 2.0, 1.0)
        grid, vals = grid[mask], vals[mask] * factor
        folded = {}
        for w, a in lines:
            folded[abs(w)] = folded.get(abs(w), 0.0) + a
        lines = sorted(folded.items())
    if per_hz:
        grid = grid / (2.0 * math.pi)
        vals = vals * (2.0 * math.pi)

    out = []
    for key in sorted(entries):
        out.append(f"# {key}={entries[key]}")
    out.append(f"# columns={columns}")
    out.append(f"# convention={'one-sided' if one_sided else 'two-sided'}")
    for w, a in lines:
        out.append(f"# LINE {w!r} {a!r}")
    out.append(columns)
    for w, v in zip(grid, vals):
        out.append(f"{float(w)!r},{float(v)!r}")
    _atomic_write(path, "\n".join(out) + "\n")


def _write_report(path, entries, results):
    out = []
    for key in sorted(entries):
        out.append(f"# {key}={entries[key]}")
    for key, val in results:
        out.append(f"{key} = {val}")
    _atomic_write(path, "\n".join(out) + "\n")


def _write_svg(path, spectra, title):
    """Static spectrum plot; optional, requires matplotlib."""
    try:
        import matplotlib
    except ImportError as exc:
        raise _ConfigError(
            "--svg requires matplotlib (install the 'plot' extra)"
        ) from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "mirrorspec"
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, spec in spectra:
        ax.plot(spec.grid, spec.values, label=label, lw=0.8)
    ax.set_yscale("log")
    ax.set_xlabel("angular frequency")
    ax.set_ylabel("PSD (two-sided)")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    tmp = f"{path}.tmp-{os.getpid()}"
    fig.savefig(tmp, format="svg", metadata={"Date": None})
    plt.close(fig)
    os.replace(tmp, path)


def _physical_grid(sim_cfg: SimConfig, osc) -> np.ndarray:
    """rfft grid of the simulation, in physical rad/s (DC bin dropped)."""
    grid = 2.0 * math.pi * np.fft.rfftfreq(sim_cfg.n_samples, d=sim_cfg.dt)
    return grid[1:] * osc.omega_m


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_analytic(cp, osc, opt, bath, args, outdir, entries):
    sim_cfg = _build_simconfig(cp, osc, opt, bath, args.seed, args.segments)
    grid = _physical_grid(sim_cfg, osc)
    if opt.delta > 0:
        spec = analytic.heterodyne_psd(osc, opt, bath, grid).total
        name = "analytic_heterodyne"
    else:
        spec = analytic.homodyne_psd(osc, opt, bath, grid)
        name = "analytic_homodyne"
    path = os.path.join(outdir, f"{name}.csv")
    cols = (
        "freq_hz,psd_w2_per_hz" if args.per_hz else "omega_rad_s,psd_w2_s_rad"
    )
    _write_csv(path, entries, spec, cols, args.per_hz, args.one_sided)
    print(f"wrote {path}")
    if args.svg:
        svg = os.path.join(outdir, f"{name}.svg")
        _write_svg(svg, [("analytic", spec)], name)
        print(f"wrote {svg}")
    return 0


def _cmd_simulate(cp, osc, opt, bath, args, outdir, entries):
    sim_cfg = _build_simconfig(cp, osc, opt, bath, args.seed, args.segments)
    res = simulate(sim_cfg)
    # export on the physical axis; values stay in dimensionless record units
    spec = Spectrum(res.spectrum.grid * osc.omega_m, res.spectrum.values)
    entries = dict(entries)
    entries["sim.effective_seed"] = str(sim_cfg.seed)
    entries["sim.psd_unit"] = "dimensionless_record"
    path = os.path.join(outdir, "simulated_psd.csv")
    cols = (
        "freq_hz,psd_per_hz" if args.per_hz else "omega_rad_s,psd_value"
    )
    _write_csv(path, entries, spec, cols, args.per_hz, args.one_sided)
    print(f"wrote {path}")
    if args.svg:
        svg = os.path.join(outdir, "simulated_psd.svg")
        _write_svg(svg, [("simulated", spec)], "simulated_psd")
        print(f"wrote {svg}")
    return 0


def _normalized_analytic(osc, opt, bath, grid):
    """Closed-form detector PSD / (p_ref*hbar*omega0), at unit efficiency.

    This is the scale in which the simulated record and the quadrature
    route live, so all three routes become directly comparable.
    """
    from dataclasses import replace

    opt1 = replace(opt, eta=1.0)
    if opt1.delta > 0:
        s = analytic.heterodyne_psd(osc, opt1, bath, grid).total
    else:
        s = analytic.homodyne_psd(osc, opt1, bath, grid)
    scale = opt1.p_ref * HBAR * opt1.omega0
    return Spectrum(grid, s.values / scale)


def _qcheck_spectrum(osc, opt, bath, grid):
    recoil = analytic.recoil_rate(opt, osc)
    if opt.delta > 0:
        return qcheck.heterodyne_quantum_psd(osc, recoil, bath, opt.delta, grid)
    return qcheck.homodyne_quantum_psd(osc, recoil, bath, opt.theta, grid)


def _cmd_compare(cp, osc, opt, bath, args, outdir, entries):
    sim_cfg = _build_simconfig(cp, osc, opt, bath, args.seed, args.segments)
    res = simulate(sim_cfg)
    grid = _physical_grid(sim_cfg, osc)
    sim_spec = Spectrum(grid, res.spectrum.values[1:])
    ana_spec = _normalized_analytic(osc, opt, bath, grid)
    q_spec = _qcheck_spectrum(osc, opt, bath, grid)

    dev_q = np.max(np.abs(q_spec.values - ana_spec.values) / ana_spec.values)
    rel_sim = np.abs(sim_spec.values - ana_spec.values) / ana_spec.values
    n_bands = 64
    bands = np.array_split(np.arange(len(grid)), n_bands)
    band_dev = max(
        abs(np.mean(sim_spec.values[b]) - np.mean(ana_spec.values[b]))
        / np.mean(ana_spec.values[b])
        for b in bands
    )

    results = [
        ("eta_note", "detection coerced to unit efficiency for comparison"),
        ("max_rel_dev_quadrature_vs_analytic", repr(float(dev_q))),
        ("max_band_rel_dev_simulated_vs_analytic", repr(float(band_dev))),
        ("median_bin_rel_dev_simulated_vs_analytic", repr(float(np.median(rel_sim)))),
        ("bands", n_bands),
        ("segments", sim_cfg.n_segments),
    ]
    report = os.path.join(outdir, "compare_report.txt")
    _write_report(report, entries, results)
    print(f"wrote {report}")
    for name, spec in (
        ("compare_simulated", sim_spec),
        ("compare_analytic", ana_spec),
        ("compare_quadrature", q_spec),
    ):
        path = os.path.join(outdir, f"{name}.csv")
        _write_csv(
            path, entries, spec,
            "freq_hz,psd_per_hz" if args.per_hz else "omega_rad_s,psd_value",
            args.per_hz, args.one_sided,
        )
        print(f"wrote {path}")
    if args.svg:
        svg = os.path.join(outdir, "compare.svg")
        _write_svg(
            svg,
            [("simulated", sim_spec), ("analytic", ana_spec)],
            "simulated vs analytic (normalized)",
        )
        print(f"wrote {svg}")
    print(f"max relative deviation (quadrature vs analytic): {dev_q:.3e}")
    print(f"max band relative deviation (simulated vs analytic): {band_dev:.3e}")
    return 0


def _cmd_thermometry(cp, osc, opt, bath, args, outdir, entries):
    if opt.delta <= 0:
        raise _ConfigError("thermometry needs heterodyne readout (delta_rad_s > 0)")
    sim_cfg = _build_simconfig(cp, osc, opt, bath, args.seed, args.segments)
    res = simulate(sim_cfg)
    red, blue = fit_sidebands(
        res.spectrum, sim_cfg.delta, 1.0, gamma_guess=sim_cfg.gamma
    )
    asym = asymmetry(red, blue)
    gamma_ratio = sim_cfg.recoil / sim_cfg.gamma
    est = thermometry(red, blue, gamma_ratio=gamma_ratio)
    results = [
        ("red_area", repr(red.area)),
        ("red_area_sigma", repr(red.area_sigma)),
        ("blue_area", repr(blue.area)),
        ("blue_area_sigma", repr(blue.area_sigma)),
        ("difference", repr(asym.difference)),
        ("difference_sigma", repr(asym.difference_sigma)),
        ("ratio", repr(asym.ratio)),
        ("ratio_sigma", repr(asym.ratio_sigma)),
        ("gamma_ratio", repr(gamma_ratio)),
        ("nbar_estimate", repr(est.nbar)),
        ("nbar_sigma", repr(est.sigma)),
        ("nbar_configured", repr(sim_cfg.nbar)),
        ("unphysical", est.unphysical),
    ]
    report = os.path.join(outdir, "thermometry_report.txt")
    _write_report(report, entries, results)
    print(f"wrote {report}")
    print(
        f"nbar = {est.nbar:.4f} +- {est.sigma:.4f} "
        f"(configured {sim_cfg.nbar:.4f}, unphysical={est.unphysical})"
    )
    return 0


def _cmd_sql(cp, osc, opt, bath, args, outdir, entries):
    omega_probe = _get(
        cp, "optics", "omega_probe_rad_s", float, 1.5 * osc.omega_m
    )
    closed = analytic.sql_power(osc, opt, omega_probe)
    grid = np.logspace(
        math.log10(closed.power) - 2.0, math.log10(closed.power) + 2.0, 400
    )
    sweep = sql_sweep(osc, opt, bath, omega_probe, grid)
    entries = dict(entries)
    entries["sql.omega_probe_rad_s"] = repr(omega_probe)
    entries["sql.power_opt_w"] = repr(sweep.power_opt)
    entries["sql.psd_min_m2_s_rad"] = repr(sweep.psd_min)
    entries["sql.closed_form_power_w"] = repr(closed.power)
    out = []
    for key in sorted(entries):
        out.append(f"# {key}={entries[key]}")
    out.append("p_in_w,total_psd_m2_s_rad")
    for p, v in zip(sweep.powers, sweep.total_psd):
        out.append(f"{float(p)!r},{float(v)!r}")
    path = os.path.join(outdir, "sql_sweep.csv")
    _atomic_write(path, "\n".join(out) + "\n")
    print(f"wrote {path}")
    print(
        f"optimum power {sweep.power_opt:.6e} W "
        f"(closed form {closed.power:.6e} W)"
    )
    return 0


def _cmd_crosscheck(cp, osc, opt, bath, args, outdir, entries):
    sim_cfg = _build_simconfig(cp, osc, opt, bath, args.seed, args.segments)
    grid = _physical_grid(sim_cfg, osc)
    ana = _normalized_analytic(osc, opt, bath, grid)
    q = _qcheck_spectrum(osc, opt, bath, grid)
    dev = float(np.max(np.abs(q.values - ana.values) / np.abs(ana.values)))
    passed = dev <= 1e-12
    results = [
        ("eta_note", "detection coerced to unit efficiency for comparison"),
        ("max_relative_deviation", repr(dev)),
        ("threshold", "1e-12"),
        ("status", "PASS" if passed else "FAIL"),
    ]
    report = os.path.join(outdir, "crosscheck_report.txt")
    _write_report(report, entries, results)
    print(f"wrote {report}")
    print(f"max relative deviation {dev:.3e} ({'<=' if passed else '>'} 1e-12)")
    return 0 if passed else 3


_COMMANDS = {
    "analytic": _cmd_analytic,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "thermometry": _cmd_thermometry,
    "sql": _cmd_sql,
    "crosscheck": _cmd_crosscheck,
}


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", default=None, help="INI config path (built-in default if omitted)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override [sim] seed")
    p.add_argument("--segments", type=int, default=None, help="override [sim] n_segments")
    p.add_argument("--strict", action="store_true", help="escalate regime warnings to exit code 4")
    p.add_argument("--per-hz", action="store_true", dest="per_hz", help="emit per-Hz densities on a Hz axis")
    p.add_argument("--one-sided", action="store_true", dest="one_sided", help="fold spectra onto the nonnegative axis")
    p.add_argument("--svg", action="store_true", help="also emit a static SVG plot")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mirrorspec",
        description="Heterodyne/homodyne noise spectra of a light-driven mirror: "
        "closed forms, Monte Carlo, and sideband metrology.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name, help_ in (
        ("analytic", "closed-form spectrum to CSV"),
        ("simulate", "Monte Carlo spectrum to CSV"),
        ("compare", "simulated vs closed-form vs quadrature routes"),
        ("thermometry", "fit sidebands and report the occupation"),
        ("sql", "total-noise power sweep"),
        ("crosscheck", "quadrature-route identity report"),
    ):
        _add_common(sub.add_parser(name, help=help_))
    return ap


def run(args) -> int:
    """Execute one parsed invocation; returns the exit code."""
    try:
        os.makedirs(args.out, exist_ok=True)
        with warnings.catch_warnings():
            if args.strict:
                warnings.simplefilter("error", RegimeWarning)
            cp = _load_config(args.config)
            osc, opt, bath = _build_system(cp)
            entries = _header_entries(cp, osc, opt, bath)
            return _COMMANDS[args.subcommand](cp, osc, opt, bath, args, args.out, entries)
    except RegimeWarning as warn:
        print(f"regime guard (strict): {warn}", file=sys.stderr)
        return 4
    except _ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SimulationDivergedError, FitConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
