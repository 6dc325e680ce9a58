"""
Shared numerical machinery for the physics modules: fixed-step RK4 integration,
a symmetric tridiagonal eigensolver (Sturm bisection + inverse iteration),
trapezoid quadrature and a reproducible random stream.

Random stream algorithm (SplitMix64, counter form):

    state_i = seed + i * 0x9E3779B97F4A7C15            (mod 2**64, i = 1, 2, ...)
    z = (state_i ^ (state_i >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    u64 = z ^ (z >> 31)
    uniform = (u64 >> 11) * 2**-53                      (in [0, 1))

Because draw i only depends on (seed, i), scalar draws and vectorized blocks
produce the same sequence on every platform.
"""

import logging
import math
import sys
from dataclasses import dataclass

import numpy as np
import pandas as pd

from openph.helpers import (
    ArgumentError,
    IntegrationDivergedError,
    require,
    require_count,
    require_finite,
    require_positive,
)

EPS = sys.float_info.epsilon
SIGN_THRESHOLD = 1e-12

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of `n` points from `x_min` to `x_max` (both included)."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        x_min = require_finite(self.x_min, "x_min")
        x_max = require_finite(self.x_max, "x_max")
        require(x_max > x_min, f"x_max must be > x_min (got {x_min} .. {x_max})")
        n = require_count(self.n, "n", minimum=3)
        object.__setattr__(self, "x_min", x_min)
        object.__setattr__(self, "x_max", x_max)
        object.__setattr__(self, "n", n)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def center(self):
        return 0.5 * (self.x_min + self.x_max)

    def points(self):
        # linspace pins the last point to x_max exactly
        return np.linspace(self.x_min, self.x_max, self.n)

    def offsets_from_center(self):
        """Signed distance of every point from the grid center, exactly antisymmetric."""
        return (np.arange(self.n) - 0.5 * (self.n - 1)) * self.dx


@dataclass(frozen=True)
class TridiagonalSymmetric:
    """Real symmetric tridiagonal matrix given by its diagonal and off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float).ravel()
        offdiag = np.asarray(self.offdiag, dtype=float).ravel()
        require(diag.size >= 1, "diag must hold at least one entry")
        require(
            offdiag.size == diag.size - 1,
            f"offdiag must have {diag.size - 1} entries (got {offdiag.size})",
        )
        require(
            bool(np.all(np.isfinite(diag)) and np.all(np.isfinite(offdiag))),
            "matrix entries must be finite",
        )
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def size(self):
        return self.diag.size

    def matvec(self, v):
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def norm_inf(self):
        """Infinity norm (max absolute row sum)."""
        rows = np.abs(self.diag).copy()
        rows[:-1] += np.abs(self.offdiag)
        rows[1:] += np.abs(self.offdiag)
        return float(rows.max())


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray


@dataclass
class Table:
    """Labelled numeric table; the CSV writer's input."""

    labels: list
    rows: np.ndarray

    def __post_init__(self):
        self.labels = [str(label) for label in self.labels]
        require(len(self.labels) >= 1, "a table needs at least one column")
        rows = np.asarray(self.rows, dtype=float)
        if rows.size == 0:
            rows = rows.reshape(0, len(self.labels))
        require(
            rows.ndim == 2 and rows.shape[1] == len(self.labels),
            f"rows must have arity {len(self.labels)} (got shape {rows.shape})",
        )
        self.rows = rows

    def __len__(self):
        return self.rows.shape[0]

    def column(self, label):
        try:
            return self.rows[:, self.labels.index(label)]
        except ValueError:
            raise KeyError(label) from None

    def to_frame(self):
        return pd.DataFrame(self.rows, columns=self.labels)


class TimeSeries(Table):
    """Table whose first column is strictly increasing time `t`, all values finite."""

    def __post_init__(self):
        super().__post_init__()
        require(self.labels[0] == "t", f"first label must be 't' (got {self.labels[0]!r})")
        require(bool(np.all(np.isfinite(self.rows))), "time series values must be finite")
        t = self.rows[:, 0]
        require(bool(np.all(np.diff(t) > 0)), "t must be strictly increasing")


class RngStream:
    """Reproducible SplitMix64 stream; see the module docstring for the algorithm."""

    def __init__(self, seed):
        require(
            isinstance(seed, int) and not isinstance(seed, bool) and 0 <= seed <= _MASK64,
            f"seed must be an unsigned 64-bit integer (got {seed!r})",
        )
        self.seed = seed
        self.counter = 0

    def next_u64(self):
        self.counter += 1
        z = (self.seed + self.counter * _GAMMA) & _MASK64
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self):
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform_block(self, n):
        """Next `n` uniforms as an array, identical to `n` calls of `uniform()`."""
        n = require_count(n, "n", minimum=0)
        if n == 0:
            return np.empty(0)
        index = np.arange(1, n + 1, dtype=np.uint64) + np.uint64(self.counter)
        with np.errstate(over="ignore"):
            z = np.uint64(self.seed) + index * np.uint64(_GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
            z = z ^ (z >> np.uint64(31))
        self.counter += n
        return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def rng_uniform(stream):
    """Draw one real in [0, 1) from `stream`, advancing it."""
    return stream.uniform()


def _finite_or_raise(values, t):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        logging.error(f"Non-finite RK4 stage at t = {t}")
        raise IntegrationDivergedError(t)
    return values


def rk4_step(f, t, y, dt):
    """
    Classical fourth-order Runge-Kutta step.

    Args:
        f (callable): Vector field f(t, y) -> dy/dt
        t (float): Current time
        y (array-like): Current state
        dt (float): Step size, > 0

    Returns:
        np.ndarray: State at t + dt

    Raises:
        IntegrationDivergedError: If any stage or the result is non-finite
    """
    require(dt > 0, f"dt must be > 0 (got {dt!r})")
    y = np.asarray(y, dtype=float)
    half = 0.5 * dt
    k1 = _finite_or_raise(f(t, y), t)
    k2 = _finite_or_raise(f(t + half, y + half * k1), t)
    k3 = _finite_or_raise(f(t + half, y + half * k2), t)
    k4 = _finite_or_raise(f(t + dt, y + dt * k3), t)
    return _finite_or_raise(y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), t)


def integrate_fixed(f, t0, y0, dt, steps, labels=None):
    """
    Integrate with `steps` RK4 steps of size `dt`.

    Row i of the result is at t0 + i*dt (computed, not accumulated); the first row
    is (t0, y0).

    Args:
        f (callable): Vector field f(t, y)
        t0 (float): Start time
        y0 (array-like): Initial state
        dt (float): Step size, > 0
        steps (int): Number of steps, >= 1
        labels (list): State column labels (default: y0, y1, ...)

    Returns:
        TimeSeries: steps + 1 rows with columns ["t", *labels]
    """
    steps = require_count(steps, "steps", minimum=1)
    dt = require_positive(dt, "dt")
    t0 = require_finite(t0, "t0")
    y = np.atleast_1d(np.asarray(y0, dtype=float))
    if labels is None:
        labels = [f"y{i}" for i in range(y.size)]
    require(len(labels) == y.size, "one label per state component is required")

    rows = np.empty((steps + 1, y.size + 1))
    rows[0, 0] = t0
    rows[0, 1:] = y
    for i in range(steps):
        t = t0 + i * dt
        y = rk4_step(f, t, y, dt)
        rows[i + 1, 0] = t0 + (i + 1) * dt
        rows[i + 1, 1:] = y
    logging.info(f"Integrated {steps} RK4 steps of dt = {dt} from t0 = {t0}")
    return TimeSeries(["t", *labels], rows)


def trapezoid(values, dx):
    """Composite trapezoid rule over equally spaced samples."""
    values = np.asarray(values, dtype=float)
    require(values.ndim == 1 and values.size >= 2, "trapezoid needs at least 2 samples")
    dx = require_positive(dx, "dx")
    return float(dx * (values.sum() - 0.5 * (values[0] + values[-1])))


def fix_sign(vector, threshold=SIGN_THRESHOLD):
    """Flip `vector` so its first component above `threshold` in magnitude is positive."""
    vector = np.asarray(vector, dtype=float)
    significant = np.flatnonzero(np.abs(vector) > threshold)
    if significant.size and vector[significant[0]] < 0:
        return -vector
    return vector


# Symmetric tridiagonal eigensolver


def _split_blocks(diag, offdiag):
    """Index ranges [start, stop) of the unreduced diagonal blocks."""
    blocks = []
    start = 0
    for i, e in enumerate(offdiag):
        if e == 0.0 or abs(e) <= EPS * math.sqrt(abs(diag[i]) * abs(diag[i + 1])):
            blocks.append((start, i + 1))
            start = i + 1
    blocks.append((start, len(diag)))
    return blocks


def _sturm_count(d, e2, x, pivmin):
    """Number of eigenvalues of the block that are < x."""
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def _bisect_eigenvalue(d, e, e2, j, tnorm, pivmin):
    """j-th smallest eigenvalue (0-based) of one unreduced block by bisection."""
    radius = [0.0] * len(d)
    for i, value in enumerate(e):
        radius[i] += abs(value)
        radius[i + 1] += abs(value)
    lo = min(di - ri for di, ri in zip(d, radius))
    hi = max(di + ri for di, ri in zip(d, radius))
    pad = 2.0 * EPS * tnorm + 2.0 * pivmin
    lo, hi = lo - pad, hi + pad
    abstol = EPS * tnorm

    for _ in range(300):
        if hi - lo <= max(abstol, 2.0 * EPS * max(abs(lo), abs(hi))):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _sturm_count(d, e2, mid, pivmin) > j:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _tridiagonal_lu(d, e, shift, pivot_floor):
    """LU with partial pivoting of (T - shift*I) for a symmetric tridiagonal block."""
    n = len(d)
    diag = [di - shift for di in d]
    lower = list(e)
    upper = list(e)
    upper2 = [0.0] * max(n - 2, 0)
    swapped = [False] * max(n - 1, 0)
    for i in range(n - 1):
        if abs(diag[i]) >= abs(lower[i]):
            if diag[i] != 0.0:
                fact = lower[i] / diag[i]
                lower[i] = fact
                diag[i + 1] -= fact * upper[i]
        else:
            fact = diag[i] / lower[i]
            diag[i] = lower[i]
            lower[i] = fact
            temp = upper[i]
            upper[i] = diag[i + 1]
            diag[i + 1] = temp - fact * diag[i + 1]
            if i < n - 2:
                upper2[i] = upper[i + 1]
                upper[i + 1] = -fact * upper[i + 1]
            swapped[i] = True
    for i in range(n):
        if abs(diag[i]) < pivot_floor:
            diag[i] = pivot_floor if diag[i] >= 0 else -pivot_floor
    return diag, lower, upper, upper2, swapped


def _tridiagonal_solve(factors, b):
    diag, lower, upper, upper2, swapped = factors
    n = len(diag)
    b = list(b)
    for i in range(n - 1):
        if swapped[i]:
            temp = b[i]
            b[i] = b[i + 1]
            b[i + 1] = temp - lower[i] * b[i]
        else:
            b[i + 1] -= lower[i] * b[i]
    b[n - 1] /= diag[n - 1]
    if n > 1:
        b[n - 2] = (b[n - 2] - upper[n - 2] * b[n - 1]) / diag[n - 2]
    for i in range(n - 3, -1, -1):
        b[i] = (b[i] - upper[i] * b[i + 1] - upper2[i] * b[i + 2]) / diag[i]
    return np.asarray(b)


def _inverse_iteration(d, e, value, tnorm, previous, seed, iterations=4):
    """Eigenvector of one block for `value`, orthogonalized against `previous`."""
    n = len(d)
    if n == 1:
        return np.ones(1)
    factors = _tridiagonal_lu(d, e, value, max(EPS * tnorm, sys.float_info.min))
    x = RngStream(seed).uniform_block(n) - 0.5
    for _ in range(iterations):
        x = x / np.linalg.norm(x)
        x = _tridiagonal_solve(factors, x)
        for other in previous:
            x = x - np.dot(other, x) * other
        norm = np.linalg.norm(x)
        if norm == 0.0 or not math.isfinite(norm):
            raise ArgumentError(f"inverse iteration failed for eigenvalue {value!r}")
    return x / np.linalg.norm(x)


def eigs_tridiag(T, k):
    """
    k algebraically smallest eigenpairs of a symmetric tridiagonal matrix.

    Eigenvalues come from Sturm-sequence bisection on each unreduced block,
    eigenvectors from inverse iteration with reorthogonalization inside clusters.
    Equal eigenvalues keep their order of discovery (block order, then index).

    Args:
        T (TridiagonalSymmetric): Matrix
        k (int): Number of pairs, 1 <= k <= T.size

    Returns:
        list[EigenPair]: Pairs sorted ascending, unit-norm vectors with the
        first-significant-component-positive sign convention
    """
    k = require_count(k, "k", minimum=1, maximum=T.size)
    d_all = T.diag.tolist()
    e_all = T.offdiag.tolist()
    tnorm = max(T.norm_inf(), sys.float_info.min)
    cluster_tol = 1e-3 * tnorm

    candidates = []
    blocks = _split_blocks(d_all, e_all)
    for block_index, (start, stop) in enumerate(blocks):
        d = d_all[start:stop]
        e = e_all[start : stop - 1]
        e2 = [value * value for value in e]
        pivmin = sys.float_info.min * max([1.0, *e2])
        block_norm = max(TridiagonalSymmetric(d, e).norm_inf(), sys.float_info.min)
        for j in range(min(k, len(d))):
            value = _bisect_eigenvalue(d, e, e2, j, block_norm, pivmin)
            candidates.append((value, block_index, j))

    # sorted() is stable: ties stay in discovery order
    chosen = sorted(candidates, key=lambda item: item[0])[:k]
    logging.info(f"Bisection found {k} eigenvalues across {len(blocks)} block(s), n = {T.size}")

    pairs = []
    found_in_block = {}
    for value, block_index, j in sorted(chosen, key=lambda item: (item[1], item[2])):
        start, stop = blocks[block_index]
        previous = [
            vec for (val, vec) in found_in_block.get(block_index, [])
            if abs(val - value) <= cluster_tol
        ]
        local = _inverse_iteration(
            d_all[start:stop], e_all[start : stop - 1], value, tnorm,
            previous, seed=block_index * 1_000_003 + j,
        )
        found_in_block.setdefault(block_index, []).append((value, local))
        vector = np.zeros(T.size)
        vector[start:stop] = local
        pairs.append((value, block_index, j, fix_sign(vector)))

    pairs.sort(key=lambda item: (item[0], item[1], item[2]))
    return [EigenPair(float(value), vector) for value, _, _, vector in pairs]
