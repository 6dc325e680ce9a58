"""
Command-line front end: `openph <subcommand> [--flag value]...`

Exit codes: 0 on success, 1 when an experiment fails at run time, 2 on usage
errors (unknown subcommand, missing or ill-typed flag, violated constraint).
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field

from openph import experiments
from openph.helpers import OpenPhError, setup_logging
from openph.numcore import Grid1D
from openph.output import write_csv, write_svg, write_svg_panels

SUBCOMMANDS = ("photo", "decay", "schrodinger", "circular", "oscillator", "pendulum", "string", "tables")


@dataclass
class RunConfig:
    subcommand: str
    parameters: dict = field(default_factory=dict)
    output_path: str = None
    format: str = "csv"
    seed: int = None
    precision: int = 12
    log_file: str = None


# argparse `type=` converters; their messages end up as "argument --flag: <message>"


def _real(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a real number (got {text!r})") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise argparse.ArgumentTypeError(f"must be finite (got {text!r})")
    return value


def positive(text):
    value = _real(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0 (got {text})")
    return value


def non_negative(text):
    value = _real(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0 (got {text})")
    return value


def non_zero(text):
    value = _real(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be non-zero")
    return value


def count(minimum, maximum=None):
    def convert(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer (got {text!r})") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum} (got {value})")
        if maximum is not None and value > maximum:
            raise argparse.ArgumentTypeError(f"must be <= {maximum} (got {value})")
        return value

    convert.__name__ = "integer"
    return convert


def u64(text):
    return count(0, 2**64 - 1)(text)


def _common_flags():
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("output")
    group.add_argument("-o", "--output", default=None, help="output file (default: standard output)")
    group.add_argument("--format", choices=("csv", "svg"), default="csv", help="output format")
    group.add_argument("--precision", type=count(1, 17), default=12,
                       help="significant digits of CSV values")
    group.add_argument("--log-file", default=None, help="write an INFO log to this file (e.g. logs/openph.log)")
    return common


def build_parser():
    parser = argparse.ArgumentParser(
        prog="openph",
        description="Quantum and classical mechanics experiments with CSV and SVG output.",
    )
    subparsers = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    subparsers.required = True
    common = _common_flags()
    fmt = argparse.ArgumentDefaultsHelpFormatter

    def sub(name, help_text):
        return subparsers.add_parser(name, help=help_text, description=help_text,
                                     parents=[common], formatter_class=fmt)

    p = sub("photo", "Photoelectric effect: stopping voltage, kinetic energy and speed of the fastest electron.")
    p.add_argument("--freq", type=positive, required=True, help="incident light frequency f (Hz)")
    p.add_argument("--threshold", type=positive, required=True, help="threshold frequency f0 of the surface (Hz)")
    p.add_argument("--freq-max", type=positive, default=None,
                   help="sweep f from --freq up to this frequency (Hz)")
    p.add_argument("--points", type=count(2), default=11, help="sweep samples")

    p = sub("decay", "Monte Carlo radioactive decay against N0 exp(-lambda t) (carbon-11 by default).")
    p.add_argument("--n0", type=count(1), default=10000, help="initial number of nuclei")
    rate = p.add_mutually_exclusive_group()
    rate.add_argument("--half-life", type=positive, default=1220.0, help="half-life (s)")
    rate.add_argument("--lambda", dest="decay_constant", type=non_negative, default=None,
                      help="decay constant lambda (1/s); overrides --half-life")
    p.add_argument("--dt", type=positive, default=10.0, help="simulation step (s)")
    p.add_argument("--tmax", type=positive, default=6100.0, help="simulated time span (s)")
    p.add_argument("--seed", type=u64, default=1, help="unsigned 64-bit random seed")
    p.add_argument("--ensemble", type=count(1), default=1,
                   help="number of runs with consecutive seeds; output holds their mean and std")
    p.add_argument("--workers", type=count(1), default=1, help="threads used for ensembles")

    p = sub("schrodinger", "Bound states of a particle in a 1D box (natural units by default).")
    p.add_argument("--potential", choices=("square", "double", "parabolic", "tabulated"), default="square",
                   help="potential inside the box")
    p.add_argument("--levels", type=count(1), default=4, help="number of lowest states")
    p.add_argument("--points", type=count(3), default=2001, help="grid points including both walls")
    p.add_argument("--x-min", type=_real, default=0.0, help="left wall position")
    p.add_argument("--x-max", type=_real, default=1.0, help="right wall position")
    p.add_argument("--hbar", type=positive, default=1.0, help="reduced Planck constant")
    p.add_argument("--mass", type=positive, default=1.0, help="particle mass")
    p.add_argument("--omega", type=positive, default=None, help="parabolic: angular frequency")
    p.add_argument("--barrier-height", type=non_negative, default=None, help="double: barrier height (energy)")
    p.add_argument("--barrier-width", type=positive, default=None, help="double: barrier width (length)")
    p.add_argument("--potential-file", default=None,
                   help="tabulated: file of 'x,V' lines, '#' comments, x strictly increasing")

    p = sub("circular", "Uniform circular motion x = R cos(wt), y = R sin(wt).")
    p.add_argument("--radius", type=positive, required=True, help="radius R (m)")
    p.add_argument("--omega", type=non_zero, required=True, help="angular speed (rad/s)")
    p.add_argument("--t0", type=_real, default=0.0, help="start time (s)")
    p.add_argument("--t1", type=_real, default=None, help="end time (s); default one period after t0")
    p.add_argument("--samples", type=count(2), default=100, help="samples along the path")

    p = sub("oscillator", "Forced damped oscillator m x'' + r x' + k x = F0 cos(w t).")
    p.add_argument("--mass", type=positive, default=1.0, help="mass m (kg)")
    p.add_argument("--damping", type=non_negative, default=0.2, help="damping coefficient r (kg/s)")
    p.add_argument("--stiffness", type=positive, default=1.0, help="spring constant k (N/m)")
    p.add_argument("--force", type=non_negative, default=1.0, help="drive amplitude F0 (N)")
    p.add_argument("--drive-omega", type=non_negative, default=0.5, help="drive angular frequency (rad/s)")
    p.add_argument("--x0", type=_real, default=0.0, help="initial position (m)")
    p.add_argument("--v0", type=_real, default=0.0, help="initial velocity (m/s)")
    p.add_argument("--dt", type=positive, default=None,
                   help="time step (s); default 1/1000 of the shortest of the natural and drive periods")
    p.add_argument("--tmax", type=positive, default=60.0, help="simulated time span (s)")
    p.add_argument("--mode", choices=("simulate", "compare", "response"), default="compare",
                   help="x/v/a series, numeric vs analytic comparison, or amplitude-vs-omega scan")
    p.add_argument("--points", type=count(2), default=400, help="response: frequency samples")

    p = sub("pendulum", "Simple pendulum, nonlinear RK4 against the small-angle solution.")
    p.add_argument("--length", type=positive, default=1.0, help="length L (m)")
    p.add_argument("--g", type=positive, default=9.80665, help="gravitational acceleration (m/s^2)")
    p.add_argument("--theta0", type=_real, default=0.5, help="initial angle (rad)")
    p.add_argument("--omega0", type=_real, default=0.0, help="initial angular velocity (rad/s)")
    p.add_argument("--dt", type=positive, default=1e-3, help="time step (s)")
    p.add_argument("--tmax", type=positive, default=10.0, help="simulated time span (s)")

    p = sub("string", "Standing wave on a fixed-fixed string: resonance frequency, nodes, animation frames.")
    p.add_argument("--tension", type=positive, default=100.0, help="tension tau (N)")
    p.add_argument("--mu", type=positive, default=0.01, help="linear mass density rho (kg/m)")
    p.add_argument("--length", type=positive, default=1.0, help="string length L (m)")
    p.add_argument("--mode", type=count(1), default=1, help="mode number n")
    p.add_argument("--amplitude", type=positive, default=0.01, help="mode amplitude y_m (m)")
    p.add_argument("--frames", type=count(1), default=9, help="frames over one period")
    p.add_argument("--points", type=count(2), default=101, help="positions along the string")

    p = sub("tables", "Fahrenheit-Celsius conversion table or factorial vs Stirling table.")
    p.add_argument("--kind", choices=("temperature", "stirling"), default="temperature", help="table to build")
    p.add_argument("--start", type=_real, default=-40.0, help="temperature: first Celsius value")
    p.add_argument("--stop", type=_real, default=120.0, help="temperature: last Celsius value (inclusive)")
    p.add_argument("--step", type=positive, default=10.0, help="temperature: Celsius step")
    p.add_argument("--n-max", type=count(1, 170), default=20, help="stirling: largest n")
    return parser, subparsers


def _check_constraints(sub_parser, name, params):
    """Cross-flag constraints that argparse cannot express."""
    fail = sub_parser.error
    if name == "decay":
        if params["tmax"] < params["dt"]:
            fail(f"argument --tmax: must be >= --dt (got {params['tmax']} < {params['dt']})")
    elif name == "schrodinger":
        if params["x_max"] <= params["x_min"]:
            fail(f"argument --x-max: must be > --x-min (got {params['x_max']} <= {params['x_min']})")
        if params["levels"] > params["points"] - 2:
            fail(f"argument --levels: must be <= points - 2 = {params['points'] - 2} (got {params['levels']})")
        kind = params["potential"]
        if kind == "parabolic" and params["omega"] is None:
            fail("argument --omega: required with --potential parabolic")
        if kind == "double":
            for flag in ("barrier_height", "barrier_width"):
                if params[flag] is None:
                    fail(f"argument --{flag.replace('_', '-')}: required with --potential double")
            box = Grid1D(params["x_min"], params["x_max"], params["points"])
            if params["barrier_width"] >= box.x_max - box.x_min:
                fail(f"argument --barrier-width: must be < box width {box.x_max - box.x_min} "
                     f"(got {params['barrier_width']})")
        if kind == "tabulated" and params["potential_file"] is None:
            fail("argument --potential-file: required with --potential tabulated")
    elif name == "circular":
        if params["t1"] is not None and params["t1"] <= params["t0"]:
            fail(f"argument --t1: must be > --t0 (got {params['t1']} <= {params['t0']})")
    elif name in ("oscillator", "pendulum"):
        if params.get("dt") is not None and params["tmax"] < params["dt"]:
            fail(f"argument --tmax: must be >= --dt (got {params['tmax']} < {params['dt']})")
        if name == "oscillator" and params["damping"] == 0 and params["force"] > 0 \
                and params["mass"] * params["drive_omega"] ** 2 == params["stiffness"] \
                and params["mode"] != "simulate":
            fail("argument --drive-omega: undamped resonance (--damping 0 and m*omega**2 = k) "
                 "has no bounded steady state")
    elif name == "photo":
        if params["freq_max"] is not None and params["freq_max"] <= params["freq"]:
            fail(f"argument --freq-max: must be > --freq (got {params['freq_max']})")
    elif name == "tables":
        if params["stop"] < params["start"]:
            fail(f"argument --stop: must be >= --start (got {params['stop']} < {params['start']})")


def parse_args(argv=None):
    """
    Parse and validate a command line.

    Args:
        argv (list[str]): Arguments without the program name (default: sys.argv[1:])

    Returns:
        RunConfig: Validated configuration

    Raises:
        SystemExit: With code 2 on any usage error (message printed by argparse)
    """
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)
    params = vars(args).copy()
    name = params.pop("subcommand")
    output = params.pop("output")
    fmt = params.pop("format")
    precision = params.pop("precision")
    log_file = params.pop("log_file")
    _check_constraints(subparsers.choices[name], name, params)
    return RunConfig(
        subcommand=name,
        parameters=params,
        output_path=output,
        format=fmt,
        seed=params.get("seed"),
        precision=precision,
        log_file=log_file,
    )


def run(config):
    """
    Run one experiment and serialize its result.

    Args:
        config (RunConfig): Validated configuration

    Returns:
        int: 0 on success, 1 when the experiment raised an error
    """
    try:
        result = experiments.build(config.subcommand, config.parameters)
        sink = config.output_path
        if config.format == "csv":
            written = write_csv(result.table, config.precision, sink)
        elif len(result.plots) == 1:
            written = write_svg(result.plots[0], sink)
        else:
            written = write_svg_panels(result.plots, sink)
    except (OpenPhError, OSError) as e:
        logging.error(f"Error in {config.subcommand}: {str(e)}")
        print(f"openph {config.subcommand}: error: {e}", file=sys.stderr)
        return 1

    print(
        f"openph {config.subcommand}: {len(result.table)} rows written ({written} bytes); {result.summary}",
        file=sys.stderr,
    )
    logging.info(f"Successfully completed {config.subcommand}")
    return 0


def main(argv=None):
    try:
        config = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    setup_logging(config.log_file)
    return run(config)
