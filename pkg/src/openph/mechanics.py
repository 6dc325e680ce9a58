"""
Classical mechanics experiments: uniform circular motion, the forced damped
harmonic oscillator, the simple pendulum and the vibrating fixed-fixed string.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from openph.helpers import (
    DomainError,
    UndampedResonanceError,
    require,
    require_count,
    require_finite,
    require_non_negative,
    require_positive,
)
from openph.numcore import Table, TimeSeries, integrate_fixed

STANDARD_GRAVITY = 9.80665


def _steps_for(dt, t_max):
    dt = require_positive(dt, "dt")
    t_max = require_positive(t_max, "t_max")
    require(t_max >= dt, f"t_max must be >= dt (got {t_max} < {dt})")
    return int(math.floor(t_max / dt + 1e-9))


# Circular motion


@dataclass(frozen=True)
class CircularMotionParams:
    R: float
    omega: float

    def __post_init__(self):
        require_positive(self.R, "R")
        require_finite(self.omega, "omega")
        require(self.omega != 0, "omega must be non-zero")


def circular_position(p, t):
    """Point (R cos wt, R sin wt) of the circular path at time t."""
    phase = p.omega * np.asarray(t, dtype=float)
    return p.R * np.cos(phase), p.R * np.sin(phase)


def circular_speed(p):
    return p.R * abs(p.omega)


def centripetal_acceleration(p):
    return p.R * p.omega**2


def circular_period(p):
    return 2.0 * math.pi / abs(p.omega)


def circular_trajectory(p, t0, t1, samples):
    """Uniform sampling of the circular path; TimeSeries (t, x, y)."""
    t0 = require_finite(t0, "t0")
    t1 = require_finite(t1, "t1")
    require(t1 > t0, f"t1 must be > t0 (got {t0} .. {t1})")
    samples = require_count(samples, "samples", minimum=2)
    t = np.linspace(t0, t1, samples)
    x, y = circular_position(p, t)
    return TimeSeries(["t", "x", "y"], np.column_stack([t, x, y]))


# Forced damped oscillator


@dataclass(frozen=True)
class OscillatorParams:
    """m x'' + r x' + k x = F0 cos(omega_d t), x(0) = x0, x'(0) = v0."""

    m: float
    r: float
    k: float
    F0: float
    omega_d: float
    x0: float = 0.0
    v0: float = 0.0

    def __post_init__(self):
        require_positive(self.m, "m")
        require_non_negative(self.r, "r")
        require_positive(self.k, "k")
        require_non_negative(self.F0, "F0")
        require_non_negative(self.omega_d, "omega_d")
        require_finite(self.x0, "x0")
        require_finite(self.v0, "v0")


def natural_frequency(p):
    return math.sqrt(p.k / p.m)


def default_time_step(p):
    """A thousandth of the period of the fastest of sqrt(k/m) and omega_d."""
    return 2.0 * math.pi / max(natural_frequency(p), p.omega_d) / 1000.0


def oscillator_force(p, t, x, v):
    return p.F0 * np.cos(p.omega_d * t) - p.r * v - p.k * x


def oscillator_energy(p, x, v):
    return 0.5 * p.m * np.asarray(v) ** 2 + 0.5 * p.k * np.asarray(x) ** 2


def simulate_oscillator(p, dt, t_max):
    """
    RK4 integration of the oscillator equation.

    Returns:
        TimeSeries: Columns (t, x, v, a); `a` is the right-hand side at each row
    """
    steps = _steps_for(dt, t_max)

    def field(t, y):
        return np.array([y[1], (p.F0 * math.cos(p.omega_d * t) - p.r * y[1] - p.k * y[0]) / p.m])

    series = integrate_fixed(field, 0.0, [p.x0, p.v0], dt, steps, labels=["x", "v"])
    t, x, v = series.column("t"), series.column("x"), series.column("v")
    a = oscillator_force(p, t, x, v) / p.m
    return TimeSeries(["t", "x", "v", "a"], np.column_stack([t, x, v, a]))


def _check_bounded(p):
    if p.r == 0 and p.F0 > 0 and p.m * p.omega_d**2 == p.k:
        message = (
            f"undamped resonance: r = 0 and m*omega_d**2 = k = {p.k}; "
            "no bounded steady state exists"
        )
        logging.error(message)
        raise UndampedResonanceError(message)


def steady_state_amplitude(p):
    """A = F0 / sqrt((k - m w**2)**2 + (r w)**2) of x(t) = A cos(w t - phi)."""
    _check_bounded(p)
    if p.F0 == 0:
        return 0.0
    return p.F0 / math.hypot(p.k - p.m * p.omega_d**2, p.r * p.omega_d)


def steady_state_phase(p):
    """phi = atan2(r w, k - m w**2), the lag of the steady state behind the drive."""
    _check_bounded(p)
    return math.atan2(p.r * p.omega_d, p.k - p.m * p.omega_d**2)


def resonance_peak_frequency(p):
    """Drive frequency of maximum steady-state amplitude, or None when there is no peak."""
    squared = p.k / p.m - p.r**2 / (2.0 * p.m**2)
    return math.sqrt(squared) if squared > 0 else None


def frequency_response(p, omegas):
    """Steady-state amplitude and phase for every drive frequency in `omegas`."""
    omegas = np.asarray(omegas, dtype=float)
    require(omegas.ndim == 1 and omegas.size >= 1, "omegas must be a non-empty sequence")
    require(bool(np.all(omegas >= 0)), "omegas must be >= 0")
    detuning = p.k - p.m * omegas**2
    friction = p.r * omegas
    with np.errstate(divide="ignore"):
        amplitude = p.F0 / np.hypot(detuning, friction)
    require(
        bool(np.all(np.isfinite(amplitude))),
        "frequency scan hits an undamped resonance (r = 0, m*omega**2 = k)",
    )
    phase = np.arctan2(friction, detuning)
    return Table(["omega", "amplitude", "phase"], np.column_stack([omegas, amplitude, phase]))


def analytic_solution(p, t):
    """
    Closed-form solution of the linear oscillator: steady state plus the
    homogeneous part matched to (x0, v0), for under-, critically and over-damped
    regimes.
    """
    t = np.asarray(t, dtype=float)
    A = steady_state_amplitude(p)
    phi = steady_state_phase(p)
    steady = A * np.cos(p.omega_d * t - phi)

    xh0 = p.x0 - A * math.cos(phi)
    vh0 = p.v0 - A * p.omega_d * math.sin(phi)
    gamma = p.r / (2.0 * p.m)
    discriminant = p.r**2 - 4.0 * p.m * p.k

    if abs(discriminant) < 1e-9 * (p.r**2 + 4.0 * p.m * p.k):
        transient = np.exp(-gamma * t) * (xh0 + (vh0 + gamma * xh0) * t)
    elif discriminant < 0:
        omega_1 = math.sqrt(p.k / p.m - gamma**2)
        transient = np.exp(-gamma * t) * (
            xh0 * np.cos(omega_1 * t) + (vh0 + gamma * xh0) / omega_1 * np.sin(omega_1 * t)
        )
    else:
        root = math.sqrt(gamma**2 - p.k / p.m)
        s1, s2 = -gamma + root, -gamma - root
        a = (vh0 - s2 * xh0) / (s1 - s2)
        transient = a * np.exp(s1 * t) + (xh0 - a) * np.exp(s2 * t)
    return steady + transient


@dataclass(frozen=True)
class Comparison:
    series: TimeSeries
    tail_max_error: float


def compare_analytic_numeric(p, dt, t_max):
    """
    Numeric (RK4) against closed-form oscillator solution.

    Returns:
        Comparison: series (t, x_numeric, x_analytic, abs_error) and the largest
        abs_error over the last 20% of rows
    """
    steady_state_amplitude(p)
    numeric = simulate_oscillator(p, dt, t_max)
    t = numeric.column("t")
    x_numeric = numeric.column("x")
    x_analytic = analytic_solution(p, t)
    error = np.abs(x_numeric - x_analytic)
    tail = error[int(math.floor(0.8 * error.size)):]
    series = TimeSeries(
        ["t", "x_numeric", "x_analytic", "abs_error"],
        np.column_stack([t, x_numeric, x_analytic, error]),
    )
    return Comparison(series, float(tail.max()))


# Pendulum


@dataclass(frozen=True)
class PendulumParams:
    length: float
    g: float = STANDARD_GRAVITY
    theta0: float = 0.0
    omega0: float = 0.0

    def __post_init__(self):
        require_positive(self.length, "length")
        require_positive(self.g, "g")
        require_finite(self.theta0, "theta0")
        require_finite(self.omega0, "omega0")


def small_angle_period(p):
    return 2.0 * math.pi * math.sqrt(p.length / p.g)


def pendulum_energy(p, theta, omega):
    """Energy per unit mass: 1/2 L**2 w**2 + g L (1 - cos theta)."""
    theta = np.asarray(theta)
    return 0.5 * p.length**2 * np.asarray(omega) ** 2 + p.g * p.length * (1.0 - np.cos(theta))


def simulate_pendulum(p, dt, t_max):
    """
    RK4 on theta'' = -(g/L) sin(theta) alongside the small-angle solution.

    Returns:
        TimeSeries: Columns (t, theta, omega, theta_small_angle)
    """
    steps = _steps_for(dt, t_max)
    ratio = p.g / p.length

    def field(t, y):
        return np.array([y[1], -ratio * math.sin(y[0])])

    series = integrate_fixed(field, 0.0, [p.theta0, p.omega0], dt, steps, labels=["theta", "omega"])
    t = series.column("t")
    w0 = math.sqrt(ratio)
    small = p.theta0 * np.cos(w0 * t) + p.omega0 / w0 * np.sin(w0 * t)
    return TimeSeries(
        ["t", "theta", "omega", "theta_small_angle"],
        np.column_stack([t, series.column("theta"), series.column("omega"), small]),
    )


def zero_crossing_period(t, values):
    """
    Mean spacing of upward zero crossings, each located by linear interpolation.

    Returns:
        float: The period, or None with fewer than two upward crossings
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    upward = np.flatnonzero((values[:-1] < 0) & (values[1:] >= 0))
    if upward.size < 2:
        return None
    frac = -values[upward] / (values[upward + 1] - values[upward])
    crossings = t[upward] + frac * (t[upward + 1] - t[upward])
    return float(np.mean(np.diff(crossings)))


# Fixed-fixed string


@dataclass(frozen=True)
class StringParams:
    L: float
    tension: float
    mu: float
    y_m: float
    n: int

    def __post_init__(self):
        require_positive(self.L, "L")
        require_positive(self.tension, "tension")
        require_positive(self.mu, "mu")
        require_positive(self.y_m, "y_m")
        require_count(self.n, "n", minimum=1)


def wave_speed(tension, mu):
    """Transverse wave speed sqrt(tension / mu) (m/s)."""
    return math.sqrt(require_positive(tension, "tension") / require_positive(mu, "mu"))


def resonance_frequency(p):
    """f_n = n v / (2 L) (Hz)."""
    return p.n * wave_speed(p.tension, p.mu) / (2.0 * p.L)


def standing_wave(p, x, t):
    """y_m sin(n pi x / L) cos(2 pi f_n t) for 0 <= x <= L."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > p.L):
        message = f"x must lie in [0, {p.L}] (got {x.min()} .. {x.max()})"
        logging.error(message)
        raise DomainError(message)
    f = resonance_frequency(p)
    y = p.y_m * np.sin(p.n * math.pi * x / p.L) * np.cos(2.0 * math.pi * f * np.asarray(t, dtype=float))
    return float(y) if y.ndim == 0 else y


def traveling_superposition(y_m, k_wave, omega, x, t):
    """Sum of two counter-propagating waves, y_m sin(kx - wt) + y_m sin(kx + wt)."""
    kx = k_wave * np.asarray(x, dtype=float)
    wt = omega * np.asarray(t, dtype=float)
    return y_m * np.sin(kx - wt) + y_m * np.sin(kx + wt)


def node_positions(p):
    """The n + 1 nodes j*L/n, fixed ends included; the last one is exactly L."""
    return np.linspace(0.0, p.L, p.n + 1)


@dataclass(frozen=True)
class StringFrames:
    positions: np.ndarray
    series: TimeSeries


def string_animation_frames(p, frames, points):
    """
    Standing-wave snapshots over one full period 1/f, first and last frame included.

    Returns:
        StringFrames: `points` positions along the string and a TimeSeries with
        columns (t, y_0, ..., y_{points-1}), one row per frame
    """
    frames = require_count(frames, "frames", minimum=1)
    points = require_count(points, "points", minimum=2)
    positions = np.linspace(0.0, p.L, points)
    period = 1.0 / resonance_frequency(p)
    times = np.linspace(0.0, period, frames) if frames > 1 else np.zeros(1)
    rows = np.column_stack([times, standing_wave(p, positions[None, :], times[:, None])])
    labels = ["t"] + [f"y_{i}" for i in range(points)]
    return StringFrames(positions, TimeSeries(labels, rows))
