"""Nonlinear-dynamics toolbox: Chua oscillator, Lyapunov estimation,
oscillator phase response, harmonic analysis and two-tone consonance scoring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from . import _kernels, devices
from .errors import BlowUpError, EstimationError

STATE_BOUND = 1e3  # |state| ceiling before a Chua run counts as blown up


class ChuaNonlinearity(Enum):
    PIECEWISE_LINEAR = "piecewise_linear"
    CUBIC = "cubic"


@dataclass
class ChuaParams:
    alpha: float = 9.0
    beta: float = 14.286
    m0: float = -8.0 / 7.0
    m1: float = -5.0 / 7.0
    nonlinearity: ChuaNonlinearity = ChuaNonlinearity.PIECEWISE_LINEAR

    def __post_init__(self):
        for name in ("alpha", "beta", "m0", "m1"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.beta <= 0.0:
            raise ValueError("beta must be positive")


def canonical_double_scroll() -> ChuaParams:
    """Parameter set sitting on the double-scroll attractor."""
    return ChuaParams()


@dataclass
class TimeSeries:
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.samples.size < 2:
            raise ValueError("need at least two samples")

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.samples.size) * self.dt


@dataclass
class ChuaTrajectory:
    dt: float
    states: np.ndarray  # (n, 3)

    def channel(self, name: str) -> TimeSeries:
        idx = {"x": 0, "y": 1, "z": 2}[name]
        return TimeSeries(self.dt, self.states[:, idx])


def chua_integrate(params: ChuaParams, init, T: float, dt: float) -> ChuaTrajectory:
    """Fixed-step RK4 of the dimensionless Chua equations.

    Raises BlowUpError (with the failure time) if the trajectory leaves
    |state| <= STATE_BOUND.
    """
    if dt <= 0.0 or dt > 0.01:
        raise ValueError("dt must lie in (0, 0.01] dimensionless time units")
    if T <= 0.0:
        raise ValueError("T must be positive")
    init = np.asarray(init, dtype=np.float64)
    if init.shape != (3,):
        raise ValueError("init must be a 3-vector")
    n_steps = int(round(T / dt))
    cubic = params.nonlinearity is ChuaNonlinearity.CUBIC
    states, blew = _kernels.chua_trajectory(
        params.alpha, params.beta, params.m0, params.m1, cubic, init,
        n_steps, dt, STATE_BOUND)
    if blew >= 0:
        raise BlowUpError(
            f"Chua trajectory diverged at t = {blew * dt:.6g}", blew * dt)
    return ChuaTrajectory(dt=dt, states=states)


# ---------------------------------------------------------------------------
# largest Lyapunov exponent (Rosenstein nearest-neighbor divergence)
# ---------------------------------------------------------------------------


@dataclass
class LyapunovEstimate:
    lam: float                # 1/time units of the input series
    fit_start: int            # divergence-curve step where the fit begins
    fit_stop: int             # inclusive end step
    r_squared: float
    curve: np.ndarray         # mean log divergence per step
    embed_dim: int
    embed_delay: int


def _first_autocorr_zero(x: np.ndarray) -> int:
    z = x - x.mean()
    denom = float(np.dot(z, z))
    if denom == 0.0:
        return 1
    for k in range(1, x.size // 2):
        c = float(np.dot(z[:-k], z[k:]))
        if c <= 0.0:
            return k
    return max(1, x.size // 10)


def _mean_period(x: np.ndarray) -> float:
    z = x - x.mean()
    spec = np.abs(np.fft.rfft(z)) ** 2
    freqs = np.fft.rfftfreq(x.size)
    power = spec[1:]
    if power.sum() == 0.0:
        return 1.0
    mean_f = float((freqs[1:] * power).sum() / power.sum())
    if mean_f <= 0.0:
        return 1.0
    return 1.0 / mean_f


def _divergence_numpy(embedded: np.ndarray, theiler: int, max_steps: int):
    """Vectorized fallback for the nearest-neighbor divergence curve."""
    n = embedded.shape[0]
    usable = n - max_steps
    pts = embedded[:usable]
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=2)
    idx = np.arange(usable)
    excl = np.abs(idx[:, None] - idx[None, :]) <= theiler
    d2[excl] = np.inf
    d2[d2 == 0.0] = np.inf
    nn = np.argmin(d2, axis=1)
    have = np.isfinite(d2[idx, nn])
    log_div = np.zeros(max_steps + 1)
    counts = np.zeros(max_steps + 1)
    for s in range(max_steps + 1):
        diff = embedded[idx[have] + s] - embedded[nn[have] + s]
        dist2 = np.sum(diff * diff, axis=1)
        ok = dist2 > 0.0
        log_div[s] = 0.5 * np.mean(np.log(dist2[ok])) if ok.any() else 0.0
        counts[s] = ok.sum()
    return log_div, counts


def lyapunov_largest(series: TimeSeries, embed_dim: int = 6,
                     embed_delay: int | None = None,
                     window: tuple[int, int] | None = None,
                     max_steps: int | None = None,
                     theiler: int | None = None) -> LyapunovEstimate:
    """Largest Lyapunov exponent from nearest-neighbor divergence.

    Delay embedding -> nearest neighbor outside a Theiler zone -> mean log
    divergence curve -> slope of its steepest clean linear section (window
    chosen by maximal R^2 unless given).  Raises EstimationError when too few
    neighbor pairs survive.
    """
    x = series.samples
    if x.size < 1000:
        raise ValueError("need at least 1000 samples for embedding")
    if embed_delay is None:
        embed_delay = _first_autocorr_zero(x)
    if embed_delay < 1:
        raise ValueError("embed_delay must be >= 1")
    if embed_dim < 1:
        raise ValueError("embed_dim must be >= 1")

    n_vec = x.size - (embed_dim - 1) * embed_delay
    if max_steps is None:
        max_steps = min(100, n_vec // 10)
    if n_vec - max_steps < 100:
        raise EstimationError("series too short for the requested embedding")
    cols = [x[j * embed_delay: j * embed_delay + n_vec] for j in range(embed_dim)]
    embedded = np.ascontiguousarray(np.stack(cols, axis=1))

    if theiler is None:
        theiler = max(int(round(_mean_period(x))), embed_delay * embed_dim)

    if embedded.shape[0] > 6000:
        # O(n^2) pair scan: keep the numba path for big inputs, else numpy
        curve, counts = _kernels.rosenstein_divergence(embedded, theiler, max_steps)
    else:
        curve, counts = _divergence_numpy(embedded, theiler, max_steps)
    if counts[0] < 10:
        raise EstimationError("not enough neighbor pairs outside the Theiler zone")

    if window is None:
        window = _best_linear_window(curve, min_len=5)
    a, b = window
    if not (0 <= a < b <= max_steps):
        raise ValueError("fit window out of range")
    steps = np.arange(a, b + 1)
    slope, r2 = _linear_fit(steps * series.dt, curve[a:b + 1])
    return LyapunovEstimate(lam=slope, fit_start=a, fit_stop=b, r_squared=r2,
                            curve=curve, embed_dim=embed_dim,
                            embed_delay=embed_delay)


def _linear_fit(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    tm = t.mean()
    ym = y.mean()
    stt = float(np.sum((t - tm) ** 2))
    if stt == 0.0:
        return 0.0, 0.0
    slope = float(np.sum((t - tm) * (y - ym)) / stt)
    resid = y - (ym + slope * (t - tm))
    sstot = float(np.sum((y - ym) ** 2))
    if sstot == 0.0:
        return slope, 0.0
    return slope, 1.0 - float(np.sum(resid ** 2)) / sstot


def _best_linear_window(curve: np.ndarray, min_len: int) -> tuple[int, int]:
    best = (0, min(curve.size - 1, min_len))
    best_r2 = -math.inf
    n = curve.size
    for a in range(0, n - min_len):
        for b in range(a + min_len, n):
            slope, r2 = _linear_fit(np.arange(a, b + 1, dtype=float), curve[a:b + 1])
            # weight longer windows slightly so R^2 ties resolve to more data
            score = r2 + 1e-4 * (b - a)
            if score > best_r2:
                best_r2 = score
                best = (a, b)
    return best


# ---------------------------------------------------------------------------
# oscillator phase response
# ---------------------------------------------------------------------------


@dataclass
class PhasePerturbation:
    tau: float      # time since the most recent spike, s
    t0: float       # unperturbed period, s
    phi: float      # tau / t0
    delta_t: float  # perturbed period minus t0, s


def phase_response(spike_times, perturbation_time: float,
                   perturbed_period: float) -> PhasePerturbation:
    """Phase of a perturbation relative to the running oscillation."""
    spikes = sorted(float(s) for s in spike_times)
    before = [s for s in spikes if s <= perturbation_time]
    if len(before) < 2:
        raise ValueError("need at least two spikes before the perturbation")
    t0 = before[-1] - before[-2]
    if t0 <= 0.0:
        raise ValueError("spike times must be strictly increasing")
    tau = perturbation_time - before[-1]
    phi = tau / t0
    if not (0.0 <= phi < 1.0):
        raise ValueError("perturbation falls outside the current cycle")
    return PhasePerturbation(tau=tau, t0=t0, phi=phi,
                             delta_t=perturbed_period - t0)


# ---------------------------------------------------------------------------
# harmonic analysis
# ---------------------------------------------------------------------------


def harmonic_spectrum(series: TimeSeries, f0: float, k_max: int) -> np.ndarray:
    """Amplitudes at k*f0 (k = 0..k_max) from a Hann-windowed DFT.

    Each harmonic amplitude is the largest bin magnitude within one bin of
    k*f0, rescaled for the window's coherent gain; the k = 0 entry is the DC
    level.
    """
    x = series.samples
    nyquist = 0.5 / series.dt
    if f0 >= nyquist:
        raise ValueError("f0 is above the Nyquist frequency")
    if f0 <= 0.0:
        raise ValueError("f0 must be positive")
    if x.size * series.dt < 10.0 / f0:
        raise ValueError("series must span at least 10 periods of f0")
    w = np.hanning(x.size)
    wsum = float(w.sum())
    spec = np.abs(np.fft.rfft(x * w))
    bin_step = f0 * series.dt * x.size
    amps = np.empty(k_max + 1)
    for k in range(k_max + 1):
        center = int(round(k * bin_step))
        lo = max(0, center - 1)
        hi = min(spec.size - 1, center + 1)
        mag = float(spec[lo:hi + 1].max())
        amps[k] = mag / wsum if k == 0 else 2.0 * mag / wsum
    return amps


def shg_efficiency(spectrum: np.ndarray, input_power: float) -> tuple[float, float]:
    """Power fraction at the second harmonic and over all harmonics (k >= 2).

    ``spectrum`` comes from harmonic_spectrum; sinusoid power is amp^2 / 2.
    """
    if input_power <= 0.0:
        raise ValueError("input power must be positive")
    if spectrum.size < 3:
        raise ValueError("spectrum must reach at least the second harmonic")
    p2 = 0.5 * float(spectrum[2]) ** 2
    p_h = 0.5 * float(np.sum(np.asarray(spectrum[2:]) ** 2))
    return p2 / input_power, p_h / input_power


# ---------------------------------------------------------------------------
# two-tone consonance
# ---------------------------------------------------------------------------


class ConsonanceLabel(Enum):
    CONSONANT = "consonant"
    DISSONANT = "dissonant"


@dataclass
class IntervalExperiment:
    f1: float
    f2: float
    device: devices.MemristorParams
    duration: float = 1.0
    amplitude: float = 1.5   # combined peak drive, each tone at half of it

    def __post_init__(self):
        if not (self.f2 > self.f1 > 0.0):
            raise ValueError("require f2 > f1 > 0")


@dataclass
class ConsonanceResult:
    trajectory: devices.IvTrajectory
    score: float
    label: ConsonanceLabel
    common_period: float
    ratio: tuple[int, int]
    rational: bool           # False when no p/q <= 64 matched the tone ratio


SCORE_THRESHOLD = 0.9
COMMON_PERIOD_MAX = 0.1      # s
RATIO_TOLERANCE = 1e-6
MAX_RATIO_TERM = 64


def _autocorr_score(z: np.ndarray, lag: int, slack: int = 2) -> float:
    z = z - z.mean()
    denom = float(np.dot(z, z))
    if denom == 0.0:
        return 0.0
    best = -1.0
    for k in range(max(1, lag - slack), lag + slack + 1):
        if k >= z.size:
            break
        c = float(np.dot(z[:-k], z[k:])) / denom * (z.size / (z.size - k))
        best = max(best, c)
    return best


def interval_consonance(exp: IntervalExperiment) -> ConsonanceResult:
    """Drive the device with two tones and score response periodicity.

    The candidate common period is q/f1 for f2/f1 = p/q in lowest terms
    (p, q <= 64).  Within the lag window the score is the normalized
    autocorrelation of the steady-state current at that lag; when the common
    period exceeds the window (or no small rational fits) the best
    correlation over the window is reported instead.  Consonant means a high
    score and a short common period.  Scores are quantized to 1e-4 so exact
    ties at saturation do not produce spurious ranking noise.
    """
    if exp.duration < 1.0:
        raise ValueError("duration must be at least 1 s")
    ratio = exp.f2 / exp.f1
    frac = Fraction(ratio).limit_denominator(MAX_RATIO_TERM)
    rational = (frac.numerator <= MAX_RATIO_TERM
                and abs(ratio - float(frac)) <= RATIO_TOLERANCE * ratio)
    t_c = frac.denominator / exp.f1 if rational else math.inf

    dt = 1.0 / (1000.0 * exp.f2)
    n_steps = int(round(exp.duration / dt))
    a = 0.5 * exp.amplitude
    w1 = 2.0 * math.pi * exp.f1
    w2 = 2.0 * math.pi * exp.f2

    def drive(t):
        return a * (np.sin(w1 * t) + np.sin(w2 * t))

    traj = devices.trajectory_from_callable(exp.device, drive, n_steps, dt)

    # steady-state tail: drop the first 20% (at least two beats of f1)
    skip = max(int(0.2 * n_steps), int(2.0 / exp.f1 / dt))
    tail = traj.i[skip:]
    max_lag = int(COMMON_PERIOD_MAX / dt)
    if rational and t_c <= COMMON_PERIOD_MAX:
        score = _autocorr_score(tail, int(round(t_c / dt)))
    else:
        lags = np.arange(int(0.5 / exp.f1 / dt), max_lag + 1)
        z = tail - tail.mean()
        denom = float(np.dot(z, z))
        score = max(
            float(np.dot(z[:-k], z[k:])) / denom * (z.size / (z.size - k))
            for k in lags
        ) if denom > 0.0 else 0.0
    score = round(score, 4)
    consonant = score >= SCORE_THRESHOLD and t_c <= COMMON_PERIOD_MAX
    return ConsonanceResult(
        trajectory=traj,
        score=score,
        label=ConsonanceLabel.CONSONANT if consonant else ConsonanceLabel.DISSONANT,
        common_period=t_c,
        ratio=(frac.numerator, frac.denominator),
        rational=rational,
    )
