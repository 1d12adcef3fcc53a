"""Behavioral memristor models: drift, rectifying, stochastic-switch.

Three families cover every device used elsewhere in the package: the
linear-drift model with a Joglekar window (pinched-hysteresis workhorse),
the same drift element behind a Shockley diode (rectifying devices for the
echo-state amplitude classifier), and a two-state stochastic switch whose
set/relax delays feed the random-bit generator.  Activity-dependent
plasticity (rate rule with a sliding threshold) lives here too because it is
a device-level behavior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import _kernels
from .rng import Xoshiro256StarStar

THERMAL_VOLTAGE = 0.02585  # V at room temperature


class DeviceKind(Enum):
    LINEAR_DRIFT = "linear_drift"
    RECTIFYING = "rectifying"
    STOCHASTIC_SWITCH = "stochastic_switch"


class PulseShape(Enum):
    RECT = "rect"
    BIPHASIC = "biphasic"


class BinaryLevel(Enum):
    HRS = "hrs"
    LRS = "lrs"


@dataclass
class MemristorParams:
    """Device constants; which fields matter depends on ``kind``."""

    kind: DeviceKind = DeviceKind.LINEAR_DRIFT
    r_on: float = 100.0
    r_off: float = 16e3
    d: float = 1e-9              # m, drift layer thickness
    mu_v: float = 1e-14          # m^2 s^-1 V^-1 dopant mobility
    p: float = 2.0               # Joglekar window exponent
    i_s: float = 1e-6            # A, diode saturation current (rectifying)
    n_ideality: float = 1.5
    v_t: float = THERMAL_VOLTAGE
    v_set: float = 0.8           # V, stochastic switching threshold
    v_reset: float = -0.8
    tau_delay_median: float = 5e-6   # s
    tau_relax_median: float = 2e-5   # s
    sigma_log: float = 0.4

    def __post_init__(self):
        if not (self.r_off >= self.r_on > 0.0):
            raise ValueError("require r_off >= r_on > 0")
        if self.p < 1.0:
            raise ValueError("window exponent p must be >= 1")
        if self.d <= 0.0:
            raise ValueError("thickness d must be positive")
        if self.tau_delay_median <= 0.0 or self.tau_relax_median <= 0.0:
            raise ValueError("delay medians must be positive")
        if self.sigma_log < 0.0:
            raise ValueError("sigma_log must be non-negative")

    @property
    def k_drift(self) -> float:
        """State velocity coefficient mu_v * r_on / d^2 (1/(A s))."""
        return self.mu_v * self.r_on / (self.d * self.d)

    def memristance(self, x: float) -> float:
        return x * self.r_on + (1.0 - x) * self.r_off


@dataclass
class MemristorState:
    x: float = 0.5               # normalized internal state in [0, 1]
    q: float = 0.0               # accumulated charge, C
    binary_level: BinaryLevel = BinaryLevel.HRS

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0):
            raise ValueError("state x must lie in [0, 1]")
        if not math.isfinite(self.q):
            raise ValueError("charge must be finite")


@dataclass
class PulseTrain:
    amplitude: float
    width: float
    frequency: float
    count: int = 1
    polarity: int = 1
    shape: PulseShape = PulseShape.RECT

    def __post_init__(self):
        if not math.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")
        if self.width <= 0.0 or self.frequency <= 0.0:
            raise ValueError("width and frequency must be positive")
        if self.width * self.frequency > 1.0:
            raise ValueError("pulse width exceeds the period")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.polarity not in (1, -1):
            raise ValueError("polarity must be +1 or -1")

    @property
    def duration(self) -> float:
        return self.count / self.frequency

    def render(self, dt: float) -> np.ndarray:
        """Sample the train at dt over its full duration.

        Biphasic spikes are a narrow pulse (width, amplitude) followed by a
        ten-times-wider opposite pulse at a tenth of the amplitude, so each
        spike carries zero net area.
        """
        period = 1.0 / self.frequency
        n = int(round(self.duration / dt))
        t = np.arange(n) * dt
        phase = t % period
        a = self.polarity * self.amplitude
        if self.shape is PulseShape.RECT:
            v = np.where(phase < self.width, a, 0.0)
        else:
            if 11.0 * self.width > period:
                raise ValueError("biphasic spike (11x width) exceeds the period")
            v = np.where(
                phase < self.width,
                a,
                np.where(phase < 11.0 * self.width, -a / 10.0, 0.0),
            )
        return v


@dataclass
class BcmState:
    w: float = 1.0               # synaptic weight
    theta: float = 10.0          # sliding threshold, Hz
    tau_theta: float = 1.0       # threshold adaptation time constant, s

    def __post_init__(self):
        if self.theta <= 0.0:
            raise ValueError("theta must be positive")
        if self.w < 0.0:
            raise ValueError("weight must be non-negative")
        if self.tau_theta <= 0.0:
            raise ValueError("tau_theta must be positive")


@dataclass
class SwitchOutcome:
    """Result of a pulse applied to a stochastic-switch device.

    ``switched`` is False when the pulse stayed below v_set; the delays are
    then meaningless and set to nan.
    """

    switched: bool
    set_delay: float = float("nan")
    relax_delay: float = float("nan")


# ---------------------------------------------------------------------------
# single-step and trajectory integration
# ---------------------------------------------------------------------------


def memristor_step(params: MemristorParams, state: MemristorState, v: float,
                   dt: float) -> tuple[MemristorState, float]:
    """Advance one RK4 step under a held voltage; returns (new state, current).

    The current is reported at the applied instant (pre-step state).  For the
    stochastic-switch family the device is a static HRS/LRS resistor here;
    level changes are the business of ``stochastic_delay_sample``.
    """
    if not (math.isfinite(v) and math.isfinite(dt)):
        raise ValueError("voltage and dt must be finite")
    if dt <= 0.0:
        raise ValueError("dt must be positive")

    if params.kind is DeviceKind.STOCHASTIC_SWITCH:
        r = params.r_on if state.binary_level is BinaryLevel.LRS else params.r_off
        i = v / r
        return replace(state, q=state.q + i * dt), i

    v_half = np.array([v, v, v], dtype=np.float64)
    if params.kind is DeviceKind.LINEAR_DRIFT:
        i_arr, x_arr = _kernels.drift_trajectory(
            v_half, dt, params.r_on, params.r_off, params.k_drift, params.p,
            state.x)
    else:
        i_arr, x_arr = _kernels.rectifying_trajectory(
            v_half, dt, params.r_on, params.r_off, params.k_drift, params.p,
            state.x, params.i_s, params.n_ideality * params.v_t)
    i = float(i_arr[0])
    new = replace(state, x=float(x_arr[1]), q=state.q + i * dt)
    return new, i


@dataclass
class IvTrajectory:
    t: np.ndarray
    v: np.ndarray
    i: np.ndarray
    x: np.ndarray


def _run_trajectory(params: MemristorParams, v_half: np.ndarray, dt: float,
                    x0: float) -> tuple[np.ndarray, np.ndarray]:
    if params.kind is DeviceKind.LINEAR_DRIFT:
        return _kernels.drift_trajectory(
            v_half, dt, params.r_on, params.r_off, params.k_drift, params.p, x0)
    if params.kind is DeviceKind.RECTIFYING:
        return _kernels.rectifying_trajectory(
            v_half, dt, params.r_on, params.r_off, params.k_drift, params.p,
            x0, params.i_s, params.n_ideality * params.v_t)
    raise ValueError("trajectory integration needs a drift or rectifying device")


def iv_trajectory(params: MemristorParams, waveform: np.ndarray, dt: float,
                  x0: float = 0.5) -> IvTrajectory:
    """Apply ``memristor_step`` pointwise over a sampled waveform.

    Midpoint drive values for the RK4 stages come from linear interpolation
    of the samples; callers with an analytic waveform get full fourth-order
    accuracy through ``trajectory_from_callable``.
    """
    waveform = np.asarray(waveform, dtype=np.float64)
    if waveform.size == 0:
        raise ValueError("waveform must be non-empty")
    if not np.all(np.isfinite(waveform)):
        raise ValueError("waveform must be finite")
    if dt <= 0.0 or not math.isfinite(dt):
        raise ValueError("dt must be positive and finite")
    v_half = np.empty(2 * waveform.size - 1)
    v_half[0::2] = waveform
    v_half[1::2] = 0.5 * (waveform[:-1] + waveform[1:])
    i, x = _run_trajectory(params, v_half, dt, x0)
    t = np.arange(waveform.size) * dt
    return IvTrajectory(t=t, v=waveform.copy(), i=i, x=x)


def trajectory_from_callable(params: MemristorParams, drive, n_steps: int,
                             dt: float, x0: float = 0.5) -> IvTrajectory:
    """Integrate with the drive evaluated analytically on the half grid."""
    t_half = np.arange(2 * n_steps + 1) * (0.5 * dt)
    v_half = np.asarray(drive(t_half), dtype=np.float64)
    i, x = _run_trajectory(params, v_half, dt, x0)
    return IvTrajectory(t=t_half[0::2], v=v_half[0::2].copy(), i=i, x=x)


def loop_area(v: np.ndarray, i: np.ndarray) -> float:
    """Unsigned area enclosed by an I-V cycle.

    A pinched loop is a figure-eight whose lobes have opposite orientation,
    so the plain shoelace sum cancels; instead the cycle is split at the
    zero crossings of v and the per-lobe shoelace areas are summed in
    absolute value.
    """
    v = np.asarray(v, dtype=np.float64)
    i = np.asarray(i, dtype=np.float64)
    # signed area increments of the closed polygon
    da = 0.5 * (v * np.roll(i, -1) - np.roll(v, -1) * i)
    sign = np.sign(v)
    crossings = np.nonzero(sign[:-1] * sign[1:] < 0)[0] + 1
    if crossings.size < 2:
        return abs(float(np.sum(da)))
    total = 0.0
    bounds = list(crossings) + [crossings[0] + v.size]
    da_wrapped = np.concatenate([da, da])
    v_w = np.concatenate([v, v])
    i_w = np.concatenate([i, i])
    for a, b in zip(bounds[:-1], bounds[1:]):
        seg = float(np.sum(da_wrapped[a:b]))
        # close the arc back to its start point
        seg += 0.5 * (v_w[b % (2 * v.size)] * i_w[a] - v_w[a] * i_w[b % (2 * v.size)])
        total += abs(seg)
    return total


# ---------------------------------------------------------------------------
# rate-dependent plasticity with a sliding threshold
# ---------------------------------------------------------------------------


def srdp_response(params: MemristorParams, bcm: BcmState,
                  trains: list[PulseTrain],
                  gain: float = 0.5) -> tuple[BcmState, list[float]]:
    """Weight changes for a sequence of spike trains under the sliding rule.

    Each train moves the weight by gain * (f - theta) / (f + theta):
    potentiation above the threshold, depression below, zero exactly at it,
    monotone in the rate.  After a train the threshold relaxes toward that
    train's rate with time constant tau_theta, so a strong stimulation
    history raises the bar for later potentiation and a weak one lowers it.
    Biphasic spikes are required; rectangular trains cannot produce the
    bidirectional change and are rejected.
    """
    if not trains:
        raise ValueError("need at least one pulse train")
    for train in trains:
        if train.shape is not PulseShape.BIPHASIC:
            raise ValueError("srdp_response requires biphasic pulse trains")
    w = bcm.w
    theta = bcm.theta
    deltas: list[float] = []
    for train in trains:
        f = train.frequency
        dw = gain * (f - theta) / (f + theta)
        deltas.append(dw)
        w = max(0.0, w + dw)
        alpha = 1.0 - math.exp(-train.duration / bcm.tau_theta)
        theta = theta + alpha * (f - theta)
    return BcmState(w=w, theta=theta, tau_theta=bcm.tau_theta), deltas


# ---------------------------------------------------------------------------
# stochastic switching delays
# ---------------------------------------------------------------------------


def stochastic_delay_sample(params: MemristorParams, v: float,
                            rng: Xoshiro256StarStar) -> SwitchOutcome:
    """Draw (set delay, relaxation delay) for one switching pulse.

    Both delays are lognormal around their configured medians with common
    shape sigma_log.  A pulse below v_set does not switch; that outcome is
    reported in the result, not raised.
    """
    if params.kind is not DeviceKind.STOCHASTIC_SWITCH:
        raise ValueError("stochastic_delay_sample needs a stochastic-switch device")
    if not math.isfinite(v):
        raise ValueError("voltage must be finite")
    if v < params.v_set:
        return SwitchOutcome(switched=False)
    set_delay = rng.lognormal(params.tau_delay_median, params.sigma_log)
    relax_delay = rng.lognormal(params.tau_relax_median, params.sigma_log)
    return SwitchOutcome(switched=True, set_delay=set_delay,
                         relax_delay=relax_delay)


# ---------------------------------------------------------------------------
# calibrated presets used by the experiments
# ---------------------------------------------------------------------------


def default_drift_device() -> MemristorParams:
    """Drift device with a wide-open pinched loop in the low audio band."""
    return MemristorParams(kind=DeviceKind.LINEAR_DRIFT)


def default_rectifying_device() -> MemristorParams:
    """Rectifying device for the echo-state amplitude classifier.

    The thicker drift layer makes the internal state quasi-static over one
    signal window, so the diode knee sets the amplitude threshold.
    """
    return MemristorParams(kind=DeviceKind.RECTIFYING, d=1e-8)


def default_stochastic_device() -> MemristorParams:
    return MemristorParams(kind=DeviceKind.STOCHASTIC_SWITCH)
