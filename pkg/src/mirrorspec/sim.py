"""Time-domain stochastic simulation in the rotating, dimensionless frame.

Frame and units
---------------
Time is measured in 1/Omega_m, position in z_zp, velocity in z_zp*Omega_m,
forces in units that make the oscillator equation read

    q'' + gamma*q' + q = f(tau),

with gamma = gamma_SI/Omega_m. In these units the detector record and its
PSD need no conversion at all: the simulated two-sided PSD equals the
physical photocurrent PSD divided by p_ref*hbar*omega0, sampled at
omega = Omega_m*omega_tilde (the 1/sqrt(Omega_m) amplitude scaling cancels
the frequency-axis scaling exactly).

Noise model
-----------
One vacuum quadrature pair (X, Y) drives everything optical: X pushes the
mirror through the backaction force f_rp = -sqrt(4*recoil)*X and both X
and Y enter the detector record directly. The shared X samples ARE the
measurement backaction correlation; `decorrelate=True` severs exactly that
link (the force reads an independent X copy) and nothing else, which
removes the sideband asymmetry. An independent thermal force F_th with
two-sided PSD gamma*(2*nbar+1)/pi completes the Langevin equation.

Discrete-noise convention, used everywhere: a white process of two-sided
PSD S is sampled as i.i.d. normals of variance 2*pi*S/dt.

Determinism
-----------
The trace is generated in hop-sized blocks (hop = n_samples*(1-overlap),
the Welch stride). Block j of stream r draws from
SeedSequence((seed, r, j)) -> SFC64, so any block is reproducible in
isolation and segments can be generated in any order or in parallel
without changing a single bit of the output.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as _fft
from scipy.signal import get_window, lfilter

from .core import RegimeWarning, Spectrum, TimeTrace

# Noise stream roles (third SeedSequence word).
_STREAM_X = 0        # vacuum quadrature X: backaction + record
_STREAM_Y = 1        # vacuum quadrature Y: record only
_STREAM_TH = 2       # thermal Langevin force
_STREAM_X_FORCE = 3  # independent X copy for the force (decorrelate mode)
_STREAM_INIT = 4     # stationary initial condition

# Largest lookup table the periodic heterodyne modulator may use.
_MOD_TABLE_MAX = 8192

_WINDOWS = ("hann", "rectangular")


class SimulationDivergedError(RuntimeError):
    """The integrator produced a non-finite state."""


@dataclass(frozen=True)
class SimConfig:
    """Complete description of one simulation run.

    Parameters
    ----------
    dt : float
        Time step in units of 1/Omega_m.
    n_samples : int
        Samples per Welch segment.
    n_segments : int
        Number of (overlapping) Welch segments; together with `overlap`
        this fixes the trace length hop*(n_segments-1) + n_samples.
    seed : int
        Master RNG seed; every output is bit-for-bit reproducible from
        (seed, config).
    gamma : float
        Mechanical damping gamma/Omega_m, in (0, 2) (underdamped).
    recoil : float
        Backaction rate Gamma/Omega_m >= 0. Sets both the backaction force
        and the record transduction; recoil = 0 means the record never
        sees the mirror.
    nbar : float
        Thermal occupation of the bath, >= 0.
    delta : float
        Heterodyne detuning Delta/Omega_m; 0 selects homodyne at `theta`.
    theta : float
        Homodyne phase [rad]; ignored when delta > 0.
    window : {"hann", "rectangular"}
        Welch window; rectangular exists for calibration tests only.
    overlap : float
        Welch overlap fraction in [0, 1).
    decorrelate : bool
        Feed the backaction force an X stream independent of the record
        (mechanism-isolation experiments).
    """

    dt: float
    n_samples: int
    n_segments: int
    seed: int
    gamma: float
    recoil: float = 0.0
    nbar: float = 0.0
    delta: float = 0.0
    theta: float = 0.0
    window: str = "hann"
    overlap: float = 0.5
    decorrelate: bool = False

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n_samples < 2:
            raise ValueError(f"n_samples must be >= 2, got {self.n_samples}")
        if self.n_segments < 1:
            raise ValueError(f"n_segments must be >= 1, got {self.n_segments}")
        if not (0.0 < self.gamma < 2.0):
            raise ValueError(
                f"gamma must be in (0, 2) (underdamped), got {self.gamma}"
            )
        if self.recoil < 0:
            raise ValueError(f"recoil must be >= 0, got {self.recoil}")
        if self.nbar < 0:
            raise ValueError(f"nbar must be >= 0, got {self.nbar}")
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.window not in _WINDOWS:
            raise ValueError(f"window must be one of {_WINDOWS}, got {self.window!r}")
        if not (0.0 <= self.overlap < 1.0):
            raise ValueError(f"overlap must be in [0, 1), got {self.overlap}")
        if self.hop < 1:
            raise ValueError("overlap too large: stride below one sample")
        # Sampling guard on the fastest spectral feature (blue sideband).
        w_fast = self.delta + 1.0
        if self.dt * w_fast >= math.pi:
            raise ValueError(
                f"dt*(delta+1) = {self.dt * w_fast:.3f} >= pi: the upper "
                "sideband is at or beyond Nyquist"
            )
        if self.dt * w_fast > math.pi / 4.0:
            warnings.warn(
                f"dt*(delta+1) = {self.dt * w_fast:.3f} > pi/4 "
                "(fewer than 8 samples per fastest oscillation)",
                RegimeWarning,
                stacklevel=3,
            )

    @property
    def heterodyne(self) -> bool:
        return self.delta > 0.0

    @property
    def hop(self) -> int:
        """Welch stride in samples; also the noise-block size."""
        return max(int(round(self.n_samples * (1.0 - self.overlap))), 0)

    @property
    def trace_length(self) -> int:
        """Total samples simulated: hop*(n_segments-1) + n_samples."""
        return self.hop * (self.n_segments - 1) + self.n_samples


@dataclass(frozen=True)
class SimState:
    """Oscillator state: position q [z_zp], velocity v [z_zp*Omega_m], time t [1/Omega_m]."""

    z: float
    v: float
    t: float = 0.0

    def require_finite(self) -> "SimState":
        if not (math.isfinite(self.z) and math.isfinite(self.v)):
            raise SimulationDivergedError(
                f"non-finite oscillator state at t = {self.t}: z={self.z}, v={self.v}"
            )
        return self


@lru_cache(maxsize=64)
def _transition(gamma: float, dt: float):
    """Exact one-step propagator of q'' + gamma*q' + q = f under zero-order hold.

    Returns (M, L) with x_{n+1} = M x_n + L f_n for x = (q, v), where
    M = expm(A dt), A = [[0, 1], [-1, -gamma]], and L = A^{-1} (M - I) B,
    B = (0, 1)^T. The noiseless decay envelope is exp(-gamma*dt/2) exactly.
    """
    a = gamma / 2.0
    wd = math.sqrt(1.0 - a * a)
    e = math.exp(-a * dt)
    c = math.cos(wd * dt)
    s = math.sin(wd * dt)
    m11 = e * (c + a * s / wd)
    m12 = e * (s / wd)
    m21 = -e * (s / wd)
    m22 = e * (c - a * s / wd)
    l1 = 1.0 - m22 - gamma * m12
    l2 = m12
    return (m11, m12, m21, m22), (l1, l2)


def _filter_coeffs(gamma: float, dt: float):
    """Second-order difference equation equivalent to the (M, L) recursion.

    q_n = tr(M) q_{n-1} - det(M) q_{n-2} + L1 f_{n-1} + (M12 L2 - M22 L1) f_{n-2}
    """
    (m11, m12, m21, m22), (l1, l2) = _transition(gamma, dt)
    tr = m11 + m22
    det = m11 * m22 - m12 * m21
    b = np.array([0.0, l1, m12 * l2 - m22 * l1])
    a = np.array([1.0, -tr, det])
    return b, a


def _initial_zi(gamma: float, dt: float, q0: float, v0: float) -> np.ndarray:
    """lfilter (transposed direct-form II) state that starts the chain at (q0, v0)."""
    (m11, m12, m21, m22), _ = _transition(gamma, dt)
    return np.array([q0, m12 * v0 - m22 * q0])


def step(state: SimState, drive: float, config: SimConfig) -> SimState:
    """Advance the oscillator one dt under a force sample held over the step.

    The update is the exact matrix-exponential propagator (see
    `_transition`); with drive = 0 the amplitude envelope decays as
    exp(-gamma*t/2) with no discretization error.
    """
    (m11, m12, m21, m22), (l1, l2) = _transition(config.gamma, config.dt)
    z = m11 * state.z + m12 * state.v + l1 * drive
    v = m21 * state.z + m22 * state.v + l2 * drive
    return SimState(z, v, state.t + config.dt).require_finite()


# ---------------------------------------------------------------------------
# Noise synthesis
# ---------------------------------------------------------------------------

def _block_generator(seed: int, role: int, block: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.SFC64(np.random.SeedSequence((seed, role, block)))
    )


def _raw_block(config: SimConfig, role: int, block: int, size: int) -> np.ndarray:
    return _block_generator(config.seed, role, block).standard_normal(size)


def _noise_span(config: SimConfig, role: int, start: int, stop: int) -> np.ndarray:
    """Unit-variance normals for absolute sample indices [start, stop).

    Assembled from hop-sized blocks so the values do not depend on how the
    span is chunked by the caller.
    """
    hop = config.hop
    first, last = start // hop, (stop - 1) // hop
    parts = []
    for j in range(first, last + 1):
        blk = _raw_block(config, role, j, hop)
        lo = max(start - j * hop, 0)
        hi = min(stop - j * hop, hop)
        parts.append(blk[lo:hi])
    return np.concatenate(parts) if len(parts) > 1 else parts[0]


def _stream_sigmas(config: SimConfig):
    """Per-sample standard deviations for (X, Y, F_th)."""
    sigma_xy = 1.0 / math.sqrt(config.dt)
    sigma_th = math.sqrt(2.0 * config.gamma * (2.0 * config.nbar + 1.0) / config.dt)
    return sigma_xy, sigma_th


def synth_noise(config: SimConfig, segment_index: int):
    """The three noise series for Welch segment `segment_index`.

    Returns (X_in, Y_in, F_th), each of length n_samples, mutually
    independent and white:

    * X_in, Y_in: two-sided PSD 1/(2*pi)  (per-sample variance 1/dt),
    * F_th: two-sided PSD gamma*(2*nbar+1)/pi (variance 2*gamma*(2*nbar+1)/dt),

    in the module's dimensionless units. Overlapping segments share their
    overlapped samples bit-for-bit: the record is one continuous trace.
    """
    if not 0 <= segment_index < config.n_segments:
        raise ValueError(
            f"segment_index must be in [0, {config.n_segments}), got {segment_index}"
        )
    start = segment_index * config.hop
    stop = start + config.n_samples
    sigma_xy, sigma_th = _stream_sigmas(config)
    x = sigma_xy * _noise_span(config, _STREAM_X, start, stop)
    y = sigma_xy * _noise_span(config, _STREAM_Y, start, stop)
    f_th = sigma_th * _noise_span(config, _STREAM_TH, start, stop)
    return x, y, f_th


def _initial_state(config: SimConfig) -> SimState:
    """Draw (q, v) from the stationary distribution of the driven oscillator.

    <q^2> = <v^2> = 2*recoil/gamma + 2*nbar + 1, <q v> = 0; starting here
    removes any burn-in transient from the estimated spectra.
    """
    var = 2.0 * config.recoil / config.gamma + 2.0 * config.nbar + 1.0
    xi = _block_generator(config.seed, _STREAM_INIT, 0).standard_normal(2)
    sig = math.sqrt(var)
    return SimState(sig * xi[0], sig * xi[1], 0.0)


# ---------------------------------------------------------------------------
# Detector record
# ---------------------------------------------------------------------------

def _modulator(config: SimConfig, n0: int, n: int):
    """cos/sin of the reference phase delta*t for samples n0..n0+n-1.

    When delta*dt is commensurate with 2*pi (period <= 8192 samples) the
    modulator is generated from a tiled lookup table: exactly periodic and
    an order of magnitude cheaper than per-sample trig.
    """
    if not config.heterodyne:
        return None
    step_phase = config.delta * config.dt / (2.0 * math.pi)
    for period in range(1, _MOD_TABLE_MAX + 1):
        cycles = step_phase * period
        if abs(cycles - round(cycles)) < 1e-9 and round(cycles) >= 1:
            phase = config.delta * config.dt * np.arange(period)
            table_c, table_s = np.cos(phase), np.sin(phase)
            idx = (n0 + np.arange(n)) % period
            return table_c[idx], table_s[idx]
    t = (n0 + np.arange(n)) * config.dt
    arg = config.delta * t
    return np.cos(arg), np.sin(arg)


def _record_block(config: SimConfig, n0: int, x, y, q) -> np.ndarray:
    """Detector record y = cos(ph)*X + sin(ph)*Y - sqrt(4*recoil)*sin(ph)*q."""
    g = math.sqrt(4.0 * config.recoil)
    if config.heterodyne:
        c, s = _modulator(config, n0, len(x))
        return c * x + s * (y - g * q)
    c, s = math.cos(config.theta), math.sin(config.theta)
    return c * x + s * y - g * s * q


def detector_record(z, x_in, y_in, config: SimConfig, start_index: int = 0) -> TimeTrace:
    """Assemble the detector record from a position trace and its noise.

    Heterodyne (delta > 0):
        y(t) = cos(delta*t)*X_in + sin(delta*t)*Y_in - sqrt(4*recoil)*sin(delta*t)*z
    Homodyne: the fixed phase theta replaces delta*t.

    The X_in here must be the same stream that drove the backaction force;
    that sharing is the entire sideband-asymmetry mechanism.

    start_index sets the absolute sample index of z[0] (reference phase
    origin); simulate() uses it when assembling blocks.
    """
    z = np.asarray(z, float)
    x_in = np.asarray(x_in, float)
    y_in = np.asarray(y_in, float)
    if not (len(z) == len(x_in) == len(y_in)):
        raise ValueError(
            f"length mismatch: z has {len(z)}, X_in {len(x_in)}, Y_in {len(y_in)}"
        )
    samples = _record_block(config, start_index, x_in, y_in, z)
    return TimeTrace(dt=config.dt, samples=samples, seed=config.seed)


# ---------------------------------------------------------------------------
# Welch estimation
# ---------------------------------------------------------------------------

def _welch_window(config: SimConfig) -> np.ndarray:
    if config.window == "hann":
        return get_window("hann", config.n_samples, fftbins=True)
    return np.ones(config.n_samples)


def _psd_grid(config: SimConfig) -> np.ndarray:
    return 2.0 * math.pi * np.fft.rfftfreq(config.n_samples, d=config.dt)


def welch_psd(trace: TimeTrace, config: SimConfig) -> Spectrum:
    """Welch PSD of a real record: averaged windowed periodograms.

    Returns the two-sided PSD (angular 1/(2*pi) convention) sampled on the
    nonnegative rfft grid; the negative half mirrors it for a real record.
    Normalization is window-power exact: a white input of two-sided PSD S0
    averages to S0 in every bin. No detrending is applied (records here
    are zero-mean by construction).

    config supplies n_samples, n_segments, window and overlap; the
    n_segments windows at the declared overlap must fit in the trace.
    """
    x = trace.samples
    n, hop = config.n_samples, config.hop
    if n > len(x):
        raise ValueError(f"segment length {n} exceeds trace length {len(x)}")
    needed = hop * (config.n_segments - 1) + n
    if needed > len(x):
        raise ValueError(
            f"{config.n_segments} segments of {n} at overlap {config.overlap} "
            f"need {needed} samples, trace has {len(x)}"
        )
    w = _welch_window(config)
    acc = np.zeros(n // 2 + 1)
    for k in range(config.n_segments):
        seg = x[k * hop : k * hop + n]
        acc += np.abs(_fft.rfft(w * seg)) ** 2
    values = trace.dt * acc / (2.0 * math.pi * np.sum(w**2) * config.n_segments)
    return Spectrum(_psd_grid(config), values)


# ---------------------------------------------------------------------------
# Full simulation driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimResult:
    """Outcome of a simulation run.

    spectrum : Welch PSD of the detector record (dimensionless units).
    trace : the record itself when requested, else None.
    final_state : oscillator state after the last sample.
    n_samples_total : trace length actually simulated.
    """

    spectrum: Spectrum
    trace: TimeTrace | None
    final_state: SimState
    n_samples_total: int


# Refuse to materialize traces beyond this many samples (~0.5 GB).
_TRACE_RETURN_LIMIT = 1 << 26


def simulate(config: SimConfig, return_trace: bool = False) -> SimResult:
    """Run the rotating-frame simulation and estimate the record's PSD.

    The trace is produced hop-block by hop-block and fed straight into the
    Welch accumulator, so memory stays O(n_samples) regardless of length.
    The oscillator starts in its stationary state (no burn-in) and the
    position recursion runs through a compiled second-order filter that is
    algebraically identical to `step`.
    """
    if return_trace and config.trace_length > _TRACE_RETURN_LIMIT:
        raise ValueError(
            f"trace of {config.trace_length} samples is too large to "
            "materialize; run without return_trace"
        )
    n, hop = config.n_samples, config.hop
    total = config.trace_length
    sigma_xy, sigma_th = _stream_sigmas(config)
    g4 = math.sqrt(4.0 * config.recoil)
    b, a = _filter_coeffs(config.gamma, config.dt)
    (m11, m12, _, _), (l1, _) = _transition(config.gamma, config.dt)

    state0 = _initial_state(config)
    zi = _initial_zi(config.gamma, config.dt, state0.z, state0.v)

    w = _welch_window(config)
    wsum2 = float(np.sum(w**2))
    acc = np.zeros(n // 2 + 1)
    pending = np.empty(0)
    segments_done = 0
    trace_parts = [] if return_trace else None

    n_blocks = -(-total // hop)  # ceil
    q_last = state0.z
    f_last = 0.0
    produced = 0

    for j in range(n_blocks):
        size = min(hop, total - produced)
        x = sigma_xy * _raw_block(config, _STREAM_X, j, hop)[:size]
        y = sigma_xy * _raw_block(config, _STREAM_Y, j, hop)[:size]
        f = sigma_th * _raw_block(config, _STREAM_TH, j, hop)[:size]
        if config.decorrelate:
            f -= g4 * sigma_xy * _raw_block(config, _STREAM_X_FORCE, j, hop)[:size]
        else:
            f -= g4 * x
        q, zi = lfilter(b, a, f, zi=zi)
        if not np.isfinite(q[-1]):
            raise SimulationDivergedError(
                f"non-finite oscillator position in block {j}"
            )
        rec = _record_block(config, produced, x, y, q)
        q_last, f_last = q[-1], f[-1]
        produced += size
        if trace_parts is not None:
            trace_parts.append(rec)

        pending = np.concatenate((pending, rec)) if pending.size else rec
        while pending.size >= n and segments_done < config.n_segments:
            acc += np.abs(_fft.rfft(w * pending[:n])) ** 2
            segments_done += 1
            pending = pending[hop:]

    if segments_done != config.n_segments:
        raise RuntimeError(
            f"internal accounting error: {segments_done} of "
            f"{config.n_segments} segments accumulated"
        )

    values = config.dt * acc / (2.0 * math.pi * wsum2 * config.n_segments)
    spectrum = Spectrum(_psd_grid(config), values)

    # Final (q, v): the filter state zi[0] holds the would-be next output,
    # which together with the last sample pins the velocity.
    q_next = float(zi[0])
    v_last = (q_next - m11 * q_last - l1 * f_last) / m12
    final_state = SimState(q_last, v_last, (total - 1) * config.dt).require_finite()

    trace = None
    if trace_parts is not None:
        trace = TimeTrace(
            dt=config.dt, samples=np.concatenate(trace_parts), seed=config.seed
        )
    return SimResult(
        spectrum=spectrum,
        trace=trace,
        final_state=final_state,
        n_samples_total=total,
    )
