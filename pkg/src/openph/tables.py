import logging
import math
from dataclasses import dataclass

import numpy as np

from openph.helpers import require, require_count, require_finite, require_positive
from openph.numcore import Table

# Largest n whose factorial is representable in double precision
MAX_FACTORIAL_N = 170


@dataclass(frozen=True)
class TableSpec:
    """Temperature range (start, stop, step) and Stirling table size n_max."""

    start: float = -40.0
    stop: float = 120.0
    step: float = 10.0
    n_max: int = 20

    def __post_init__(self):
        require_finite(self.start, "start")
        require_finite(self.stop, "stop")
        require_positive(self.step, "step")
        require(self.stop >= self.start, f"stop must be >= start (got {self.start} .. {self.stop})")
        require_count(self.n_max, "n_max", minimum=1, maximum=MAX_FACTORIAL_N)


def celsius_to_fahrenheit(celsius):
    return 9.0 * np.asarray(celsius, dtype=float) / 5.0 + 32.0


def fahrenheit_celsius_table(spec):
    """
    Conversion table with Celsius values start, start + step, ... up to stop.

    Args:
        spec (TableSpec): Range of the table

    Returns:
        Table: Columns (celsius, fahrenheit)
    """
    count = int(math.floor((spec.stop - spec.start) / spec.step + 1e-9)) + 1
    celsius = spec.start + np.arange(count) * spec.step
    logging.info(f"Temperature table with {count} rows from {spec.start} by {spec.step}")
    return Table(["celsius", "fahrenheit"], np.column_stack([celsius, celsius_to_fahrenheit(celsius)]))


def stirling_approximation(n):
    return math.sqrt(2.0 * math.pi * n) * (n / math.e) ** n


def stirling_table(n_max):
    """
    Factorial against Stirling's approximation for n = 1..n_max.

    Returns:
        Table: Columns (n, factorial, stirling, relative_error)
    """
    n_max = require_count(n_max, "n_max", minimum=1, maximum=MAX_FACTORIAL_N)
    rows = []
    factorial = 1.0
    for n in range(1, n_max + 1):
        factorial *= n
        stirling = stirling_approximation(n)
        rows.append((n, factorial, stirling, (factorial - stirling) / factorial))
    return Table(["n", "factorial", "stirling", "relative_error"], np.array(rows))
