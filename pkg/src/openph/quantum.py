"""
Quantum experiments: photoelectric effect, radioactive decay (analytic and
Monte Carlo) and bound states of a particle in a one-dimensional box.

Photoelectric and decay operations work in SI units; the bound-state solver takes
hbar and the mass explicitly (the CLI uses hbar = m = 1).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from openph.helpers import (
    BelowThresholdError,
    CoverageError,
    PotentialFileError,
    require,
    require_count,
    require_non_negative,
    require_positive,
)
from openph.numcore import (
    Grid1D,
    RngStream,
    TimeSeries,
    TridiagonalSymmetric,
    eigs_tridiag,
    fix_sign,
    trapezoid,
)


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-2018 values by default; hbar is always h / (2*pi)."""

    h: float = 6.62607015e-34
    e: float = 1.602176634e-19
    m_e: float = 9.1093837015e-31

    def __post_init__(self):
        for name in ("h", "e", "m_e"):
            require_positive(getattr(self, name), name)

    @property
    def hbar(self):
        return self.h / (2.0 * math.pi)


CODATA_2018 = PhysicalConstants()


@dataclass(frozen=True)
class PhotoelectricInput:
    f: float
    f0: float

    def __post_init__(self):
        require_positive(self.f, "f")
        require_positive(self.f0, "f0")


def photon_energy(f, consts=CODATA_2018):
    """Energy h*f of one photon (J)."""
    return consts.h * require_positive(f, "f")


def work_function(f0, consts=CODATA_2018):
    """Energy h*f0 needed to remove an electron from the surface (J)."""
    return consts.h * require_positive(f0, "f0")


def _check_threshold(inp):
    if inp.f < inp.f0:
        message = (
            f"no electrons are emitted below the threshold frequency "
            f"(f = {inp.f!r} Hz < f0 = {inp.f0!r} Hz)"
        )
        logging.error(message)
        raise BelowThresholdError(message)


def max_kinetic_energy(inp, consts=CODATA_2018):
    """Kinetic energy h*(f - f0) of the fastest emitted electron (J)."""
    _check_threshold(inp)
    return consts.h * (inp.f - inp.f0)


def max_speed(inp, consts=CODATA_2018):
    """Speed of the fastest emitted electron (m/s)."""
    return math.sqrt(2.0 * max_kinetic_energy(inp, consts) / consts.m_e)


def stopping_voltage(inp, consts=CODATA_2018):
    """Reverse voltage at which the photocurrent vanishes (V)."""
    return max_kinetic_energy(inp, consts) / consts.e


# Radioactive decay


@dataclass(frozen=True)
class DecayModel:
    """
    Single-species decay of `n0` nuclei with decay constant `decay_constant`
    (1/s), simulated with step `dt` up to `t_max`.
    """

    n0: int
    decay_constant: float
    dt: float
    t_max: float

    def __post_init__(self):
        require_count(self.n0, "n0", minimum=1)
        require_non_negative(self.decay_constant, "decay_constant")
        require_positive(self.dt, "dt")
        require_positive(self.t_max, "t_max")
        require(self.t_max >= self.dt, f"t_max must be >= dt (got {self.t_max} < {self.dt})")

    @classmethod
    def from_half_life(cls, n0, half_life, dt, t_max):
        half_life = require_positive(half_life, "half_life")
        return cls(n0, math.log(2.0) / half_life, dt, t_max)

    @property
    def half_life(self):
        if self.decay_constant == 0:
            return math.inf
        return math.log(2.0) / self.decay_constant

    @property
    def steps(self):
        return int(math.floor(self.t_max / self.dt + 1e-9))

    def times(self):
        return np.arange(self.steps + 1) * self.dt


def decay_analytic(model, t):
    """Expected number of nuclei N0 * exp(-lambda * t); continuous, not rounded."""
    t = np.asarray(t, dtype=float)
    require(bool(np.all(t >= 0)), "t must be >= 0")
    result = model.n0 * np.exp(-model.decay_constant * t)
    return float(result) if result.ndim == 0 else result


def decay_simulate(model, seed):
    """
    Monte Carlo decay. At each step every surviving nucleus draws one uniform from
    the seeded stream and decays when it falls below p = 1 - exp(-lambda*dt); the
    draws for one step are made as a single vectorized block.

    Args:
        model (DecayModel): Decay parameters
        seed (int): Unsigned 64-bit seed

    Returns:
        TimeSeries: Columns (t, n_remaining, n_analytic)
    """
    stream = RngStream(seed)
    p = -math.expm1(-model.decay_constant * model.dt)
    t = model.times()
    remaining = np.empty(t.size)
    remaining[0] = n = model.n0
    for i in range(1, t.size):
        if n > 0:
            n -= int(np.count_nonzero(stream.uniform_block(n) < p))
        remaining[i] = n
    logging.info(
        f"Decay simulation seed={seed}: {model.n0} -> {n} nuclei over {t.size - 1} steps"
    )
    return TimeSeries(
        ["t", "n_remaining", "n_analytic"],
        np.column_stack([t, remaining, decay_analytic(model, t)]),
    )


def decay_ensemble(model, seeds, workers=1):
    """
    Run `decay_simulate` for every seed and reduce in seed order.

    Args:
        model (DecayModel): Decay parameters
        seeds (list[int]): Seeds, one run each
        workers (int): Thread count; results do not depend on it

    Returns:
        TimeSeries: Columns (t, mean_remaining, std_remaining, n_analytic)
    """
    seeds = list(seeds)
    require(len(seeds) >= 1, "at least one seed is required")
    workers = require_count(workers, "workers", minimum=1)
    if workers == 1:
        runs = [decay_simulate(model, seed) for seed in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map() yields in submission order, so the reduction is schedule-independent
            runs = list(pool.map(lambda seed: decay_simulate(model, seed), seeds))
    counts = np.stack([run.column("n_remaining") for run in runs])
    t = runs[0].column("t")
    logging.info(f"Decay ensemble of {len(seeds)} seeds on {workers} worker(s)")
    return TimeSeries(
        ["t", "mean_remaining", "std_remaining", "n_analytic"],
        np.column_stack([t, counts.mean(axis=0), counts.std(axis=0), runs[0].column("n_analytic")]),
    )


# Particle in a box


@dataclass(frozen=True)
class SquareWell:
    """V = 0 everywhere inside the box."""


@dataclass(frozen=True)
class DoubleWell:
    """Square barrier of `barrier_height` and `barrier_width`, centered in the box."""

    barrier_height: float
    barrier_width: float

    def __post_init__(self):
        require_non_negative(self.barrier_height, "barrier_height")
        require_positive(self.barrier_width, "barrier_width")


@dataclass(frozen=True)
class Parabolic:
    """V = 1/2 * m * omega**2 * (x - x_c)**2 about the box center x_c."""

    omega: float

    def __post_init__(self):
        require_positive(self.omega, "omega")


@dataclass(frozen=True)
class Tabulated:
    """Free-form potential given as (x, V) samples, linearly interpolated."""

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.v, dtype=float)
        require(x.ndim == 1 and x.size >= 2, "tabulated potential needs at least 2 samples")
        require(x.shape == v.shape, "tabulated x and V must have the same length")
        require(
            bool(np.all(np.isfinite(x)) and np.all(np.isfinite(v))),
            "tabulated samples must be finite",
        )
        require(bool(np.all(np.diff(x) > 0)), "tabulated x must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)

    @classmethod
    def from_pairs(cls, samples):
        samples = np.asarray(samples, dtype=float).reshape(-1, 2)
        return cls(samples[:, 0], samples[:, 1])


# The four potential families a box can hold
PotentialSpec = Union[SquareWell, DoubleWell, Parabolic, Tabulated]


def read_potential_file(path):
    """
    Read a tabulated potential: one "x,V" pair per line, '#' lines ignored,
    x strictly increasing.

    Args:
        path (str or Path): File to read

    Returns:
        Tabulated: The parsed potential
    """
    path = Path(path)
    try:
        frame = pd.read_csv(
            path, header=None, index_col=False, comment="#", skip_blank_lines=True,
            dtype=float,
        )
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        logging.error(f"Error reading potential file {path}: {str(e)}")
        raise PotentialFileError(f"cannot parse potential file {path}: {e}") from e
    if frame.shape[1] != 2:
        message = f"potential file {path} must have exactly two fields per line (found {frame.shape[1]})"
        logging.error(message)
        raise PotentialFileError(message)
    frame.columns = ["x", "V"]
    if frame.isna().any().any():
        message = f"potential file {path} has lines without an 'x,V' pair"
        logging.error(message)
        raise PotentialFileError(message)
    try:
        potential = Tabulated(frame["x"].to_numpy(), frame["V"].to_numpy())
    except ValueError as e:
        logging.error(f"Invalid potential file {path}: {str(e)}")
        raise PotentialFileError(f"invalid potential file {path}: {e}") from e
    logging.info(f"Read {len(frame)} potential samples from {path}")
    return potential


@dataclass(frozen=True)
class BoundStateSolution:
    grid: Grid1D
    energies: np.ndarray
    wavefunctions: np.ndarray
    potential: np.ndarray = field(repr=False)

    @property
    def levels(self):
        return self.energies.size


def sample_potential(spec, grid, mass=1.0):
    """
    Sample a potential family on every grid point.

    Args:
        spec (PotentialSpec): SquareWell, DoubleWell, Parabolic or Tabulated
        grid (Grid1D): Target grid
        mass (float): Particle mass (used by Parabolic)

    Returns:
        np.ndarray: n values of V
    """
    offsets = grid.offsets_from_center()
    if isinstance(spec, SquareWell):
        return np.zeros(grid.n)
    if isinstance(spec, DoubleWell):
        width = grid.x_max - grid.x_min
        require(
            spec.barrier_width < width,
            f"barrier_width must be < box width {width} (got {spec.barrier_width})",
        )
        return np.where(np.abs(offsets) <= 0.5 * spec.barrier_width, spec.barrier_height, 0.0)
    if isinstance(spec, Parabolic):
        mass = require_positive(mass, "mass")
        return 0.5 * mass * spec.omega**2 * offsets**2
    if isinstance(spec, Tabulated):
        if spec.x[0] > grid.x_min or spec.x[-1] < grid.x_max:
            message = (
                f"tabulated potential covers [{spec.x[0]}, {spec.x[-1]}] but the grid "
                f"spans [{grid.x_min}, {grid.x_max}]"
            )
            logging.error(message)
            raise CoverageError(message)
        return np.interp(grid.points(), spec.x, spec.v)
    require(False, f"unknown potential type {type(spec).__name__}")


def build_hamiltonian(V, grid, hbar=1.0, mass=1.0):
    """
    Central-difference Hamiltonian on the interior points (Dirichlet walls).

    diag_i = hbar**2 / (m dx**2) + V[i+1], offdiag = -hbar**2 / (2 m dx**2)
    """
    V = np.asarray(V, dtype=float)
    require(V.size == grid.n, f"V must have {grid.n} samples (got {V.size})")
    hbar = require_positive(hbar, "hbar")
    mass = require_positive(mass, "mass")
    kinetic = hbar**2 / (2.0 * mass * grid.dx**2)
    interior = grid.n - 2
    return TridiagonalSymmetric(
        2.0 * kinetic + V[1:-1], np.full(interior - 1, -kinetic)
    )


def solve_bound_states(spec, grid, k, hbar=1.0, mass=1.0):
    """
    The k lowest bound states of a particle in the box `grid` with potential `spec`.

    Args:
        spec (PotentialSpec): Potential family
        grid (Grid1D): Box and resolution
        k (int): Number of levels, 1 <= k <= grid.n - 2
        hbar (float): Reduced Planck constant in the caller's units
        mass (float): Particle mass

    Returns:
        BoundStateSolution: Ascending energies and wavefunctions normalized so that
        trapezoid(psi**2, dx) = 1, zero at both walls
    """
    k = require_count(k, "k", minimum=1, maximum=grid.n - 2)
    V = sample_potential(spec, grid, mass)
    pairs = eigs_tridiag(build_hamiltonian(V, grid, hbar, mass), k)

    wavefunctions = np.zeros((k, grid.n))
    for i, pair in enumerate(pairs):
        psi = np.zeros(grid.n)
        psi[1:-1] = pair.vector
        psi /= math.sqrt(trapezoid(psi**2, grid.dx))
        wavefunctions[i] = fix_sign(psi)
    energies = np.array([pair.value for pair in pairs])
    logging.info(
        f"Solved {type(spec).__name__} on n = {grid.n}: lowest energies {energies.tolist()}"
    )
    return BoundStateSolution(grid, energies, wavefunctions, V)


def count_nodes(psi, tol=None):
    """
    Interior sign changes of a wavefunction, ignoring samples with |psi| <= tol.

    Args:
        psi (array-like): Wavefunction samples including both wall points
        tol (float): Magnitude threshold (default: 1e-8 * max|psi|)

    Returns:
        int: Number of nodes
    """
    psi = np.asarray(psi, dtype=float)
    if tol is None:
        tol = 1e-8 * float(np.max(np.abs(psi))) if psi.size else 0.0
    interior = psi[1:-1]
    kept = interior[np.abs(interior) > tol]
    if kept.size < 2:
        return 0
    return int(np.count_nonzero(np.signbit(kept[1:]) != np.signbit(kept[:-1])))
