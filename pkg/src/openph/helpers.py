import logging
import math
import numbers
import sys
from pathlib import Path

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


class OpenPhError(Exception):
    """Base class for every error raised by the openph modules."""


class ArgumentError(OpenPhError, ValueError):
    """A precondition or type invariant was violated."""


class IntegrationDivergedError(OpenPhError):
    """An ODE integration produced a non-finite value."""

    def __init__(self, t):
        self.t = t
        super().__init__(f"integration diverged: non-finite value at t = {t!r}")


class BelowThresholdError(OpenPhError):
    """Photoelectric input below the threshold frequency."""


class UndampedResonanceError(OpenPhError):
    """Undamped oscillator driven exactly at its natural frequency."""


class CoverageError(OpenPhError):
    """Tabulated data does not span the requested grid."""


class DomainError(OpenPhError):
    """Evaluation point outside the domain of a function."""


class PotentialFileError(OpenPhError):
    """Malformed tabulated-potential file."""


def setup_logging(log_file=None, level=logging.INFO):
    """Configure the root logger

    Args:
        log_file (str or Path): File to log into. When None, logs go to stderr
            at WARNING level so stderr only carries warnings and errors.
        level (int): Level used when logging to a file (default: INFO)
    """
    if log_file is not None:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logging.basicConfig(
            filename=str(log_file), level=level, format=LOG_FORMAT, force=True
        )
    else:
        logging.basicConfig(
            stream=sys.stderr, level=logging.WARNING, format=LOG_FORMAT, force=True
        )


def require(condition, message):
    """Raise ArgumentError with `message` unless `condition` holds."""
    if not condition:
        logging.error(message)
        raise ArgumentError(message)


def require_finite(value, name):
    """Check that a scalar is a finite real number

    Args:
        value (float): Value to check
        name (str): Parameter name used in the error message

    Returns:
        float: The value converted to float
    """
    try:
        value = float(value)
    except (TypeError, ValueError):
        require(False, f"{name} must be a real number (got {value!r})")
    require(math.isfinite(value), f"{name} must be finite (got {value!r})")
    return value


def require_positive(value, name):
    """Check that a scalar is finite and strictly positive, returning it as float."""
    value = require_finite(value, name)
    require(value > 0, f"{name} must be > 0 (got {value!r})")
    return value


def require_non_negative(value, name):
    """Check that a scalar is finite and >= 0, returning it as float."""
    value = require_finite(value, name)
    require(value >= 0, f"{name} must be >= 0 (got {value!r})")
    return value


def require_count(value, name, minimum=1, maximum=None):
    """
    Check that a value is an integer count inside [minimum, maximum].
    Booleans and floats with a fractional part are rejected.

    Args:
        value (int): Count to check; numpy integers are accepted
        name (str): Parameter name used in the error message
        minimum (int): Smallest allowed value (default: 1)
        maximum (int): Largest allowed value, or None for no upper bound

    Returns:
        int: The validated count
    """
    ok = isinstance(value, numbers.Integral) and not isinstance(value, bool)
    if ok:
        value = int(value)
    if not ok and isinstance(value, float) and value.is_integer():
        value, ok = int(value), True
    require(ok, f"{name} must be an integer (got {value!r})")
    require(value >= minimum, f"{name} must be >= {minimum} (got {value})")
    if maximum is not None:
        require(value <= maximum, f"{name} must be <= {maximum} (got {value})")
    return value
