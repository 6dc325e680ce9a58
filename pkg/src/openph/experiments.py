"""
One builder per CLI subcommand. Each turns validated parameters into an
ExperimentResult: the numeric table that CSV output serializes, a one-line
summary and the plots that SVG output renders. Output format never reaches the
builders, so CSV and SVG runs consume the same numbers.
"""

import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np

from openph import mechanics, quantum, tables
from openph.numcore import Grid1D, Table
from openph.output import SvgPlot, SvgSeries


@dataclass
class ExperimentResult:
    name: str
    table: Table
    summary: str
    plots: list = field(default_factory=list)


def result_digest(result):
    """sha256 over the labels and raw float64 bytes of the result table."""
    digest = hashlib.sha256()
    digest.update(",".join(result.table.labels).encode("utf-8"))
    digest.update(np.ascontiguousarray(result.table.rows, dtype="<f8").tobytes())
    return digest.hexdigest()


def _g(value, digits=6):
    return f"{value:.{digits}g}"


def photo(params):
    inp = quantum.PhotoelectricInput(params["freq"], params["threshold"])
    if params.get("freq_max") is None:
        freqs = np.array([inp.f])
    else:
        freqs = np.linspace(inp.f, params["freq_max"], params["points"])

    rows = []
    for f in freqs:
        point = quantum.PhotoelectricInput(float(f), inp.f0)
        rows.append((
            f,
            quantum.max_kinetic_energy(point),
            quantum.max_speed(point),
            quantum.stopping_voltage(point),
        ))
    table = Table(["f", "kinetic_energy", "max_speed", "stopping_voltage"], np.array(rows))
    first = table.rows[0]
    summary = (
        f"V_stop = {_g(first[3])} V, E_k = {_g(first[1])} J, v_max = {_g(first[2])} m/s "
        f"at f = {_g(first[0])} Hz"
    )
    plot = SvgPlot(
        [SvgSeries("stopping voltage", table.column("f"), table.column("stopping_voltage"))],
        title="Photoelectric effect", x_label="frequency (Hz)", y_label="stopping voltage (V)",
    )
    return ExperimentResult("photo", table, summary, [plot])


def decay(params):
    if params.get("decay_constant") is not None:
        model = quantum.DecayModel(params["n0"], params["decay_constant"], params["dt"], params["tmax"])
    else:
        model = quantum.DecayModel.from_half_life(
            params["n0"], params["half_life"], params["dt"], params["tmax"]
        )
    seed = params["seed"]
    ensemble = params.get("ensemble", 1)
    if ensemble > 1:
        seeds = [(seed + i) % 2**64 for i in range(ensemble)]
        table = quantum.decay_ensemble(model, seeds, params.get("workers", 1))
        simulated = table.column("mean_remaining")
        simulated_label = f"mean of {ensemble} runs"
    else:
        table = quantum.decay_simulate(model, seed)
        simulated = table.column("n_remaining")
        simulated_label = "simulated"

    summary = (
        f"N(t_max) = {_g(simulated[-1])} (analytic {_g(table.column('n_analytic')[-1])}), "
        f"lambda = {_g(model.decay_constant)} 1/s, half-life = {_g(model.half_life)} s, seed = {seed}"
    )
    t = table.column("t")
    plot = SvgPlot(
        [
            SvgSeries(simulated_label, t, simulated),
            SvgSeries("N0 exp(-lambda t)", t, table.column("n_analytic")),
        ],
        title="Simulated radioactive decay", x_label="t (s)", y_label="nuclei",
    )
    return ExperimentResult("decay", table, summary, [plot])


def _potential_spec(params):
    kind = params["potential"]
    if kind == "square":
        return quantum.SquareWell()
    if kind == "double":
        return quantum.DoubleWell(params["barrier_height"], params["barrier_width"])
    if kind == "parabolic":
        return quantum.Parabolic(params["omega"])
    return quantum.read_potential_file(params["potential_file"])


def schrodinger(params):
    grid = Grid1D(params["x_min"], params["x_max"], params["points"])
    spec = _potential_spec(params)
    solution = quantum.solve_bound_states(
        spec, grid, params["levels"], hbar=params["hbar"], mass=params["mass"]
    )
    x = grid.points()
    labels = ["x", "V"] + [f"psi_{j}" for j in range(solution.levels)]
    table = Table(labels, np.column_stack([x, solution.potential, solution.wavefunctions.T]))
    nodes = [quantum.count_nodes(psi) for psi in solution.wavefunctions]
    energies = ", ".join(f"E{j} = {_g(e, 8)}" for j, e in enumerate(solution.energies))
    summary = f"{energies}; nodes {nodes}"

    # wavefunctions drawn on top of the potential, offset by their energies
    energies_arr = solution.energies
    spacing = np.diff(energies_arr).min() if energies_arr.size > 1 else abs(energies_arr[0]) or 1.0
    scale = 0.4 * spacing / max(float(np.abs(solution.wavefunctions).max()), 1e-300)
    top = energies_arr[-1] + spacing
    series = [SvgSeries("V(x)", x, np.minimum(solution.potential, top), color="#000000")]
    for j, psi in enumerate(solution.wavefunctions):
        series.append(SvgSeries(f"psi_{j} (E = {_g(energies_arr[j], 5)})", x, energies_arr[j] + scale * psi))
    plot = SvgPlot(series, title=f"Particle in a box: {params['potential']} potential",
                   x_label="x", y_label="energy")
    return ExperimentResult("schrodinger", table, summary, [plot])


def circular(params):
    p = mechanics.CircularMotionParams(params["radius"], params["omega"])
    t1 = params.get("t1")
    if t1 is None:
        t1 = params["t0"] + mechanics.circular_period(p)
    series = mechanics.circular_trajectory(p, params["t0"], t1, params["samples"])
    summary = (
        f"speed = {_g(mechanics.circular_speed(p))} m/s, "
        f"a_c = {_g(mechanics.centripetal_acceleration(p))} m/s^2, "
        f"period = {_g(mechanics.circular_period(p))} s"
    )
    plot = SvgPlot(
        [SvgSeries("path", series.column("x"), series.column("y"))],
        title="Uniform circular motion", x_label="x (m)", y_label="y (m)", width=600, height=600,
    )
    return ExperimentResult("circular", series, summary, [plot])


def _oscillator_params(params):
    return mechanics.OscillatorParams(
        params["mass"], params["damping"], params["stiffness"], params["force"],
        params["drive_omega"], params["x0"], params["v0"],
    )


def oscillator(params):
    p = _oscillator_params(params)
    dt = params.get("dt") or mechanics.default_time_step(p)
    mode = params["mode"]

    if mode == "response":
        w0 = mechanics.natural_frequency(p)
        omegas = np.linspace(0.0, 3.0 * max(w0, p.omega_d), params["points"])
        table = mechanics.frequency_response(p, omegas)
        peak = mechanics.resonance_peak_frequency(p)
        summary = f"omega_peak = {_g(peak) if peak is not None else 'none'} rad/s, omega_0 = {_g(w0)} rad/s"
        plots = [
            SvgPlot([SvgSeries("amplitude", omegas, table.column("amplitude"))],
                    title="Steady-state amplitude", x_label="omega (rad/s)", y_label="A (m)"),
            SvgPlot([SvgSeries("phase", omegas, table.column("phase"))],
                    title="Steady-state phase", x_label="omega (rad/s)", y_label="phi (rad)"),
        ]
        return ExperimentResult("oscillator", table, summary, plots)

    if mode == "simulate":
        series = mechanics.simulate_oscillator(p, dt, params["tmax"])
        t = series.column("t")
        summary = f"{len(series)} rows, dt = {_g(dt)} s, x(t_max) = {_g(series.column('x')[-1])} m"
        plots = [
            SvgPlot([SvgSeries(label, t, series.column(label))], title=title,
                    x_label="t (s)", y_label=unit)
            for label, title, unit in (
                ("x", "Displacement", "x (m)"),
                ("v", "Velocity", "v (m/s)"),
                ("a", "Acceleration", "a (m/s^2)"),
            )
        ]
        return ExperimentResult("oscillator", series, summary, plots)

    comparison = mechanics.compare_analytic_numeric(p, dt, params["tmax"])
    series = comparison.series
    t = series.column("t")
    numeric = SvgSeries("numerical", t, series.column("x_numeric"), color="#1f77b4")
    analytic = SvgSeries("analytic", t, series.column("x_analytic"), color="#d62728")
    summary = (
        f"A = {_g(mechanics.steady_state_amplitude(p))} m, "
        f"phi = {_g(mechanics.steady_state_phase(p))} rad, "
        f"max |error| (last 20%) = {_g(comparison.tail_max_error, 3)} m"
    )
    plots = [
        SvgPlot([numeric], title="Numerical solution", x_label="t (s)", y_label="x (m)"),
        SvgPlot([analytic], title="Analytic solution", x_label="t (s)", y_label="x (m)"),
        SvgPlot([numeric, analytic], title="Overlay", x_label="t (s)", y_label="x (m)"),
        SvgPlot([SvgSeries("|error|", t, series.column("abs_error"))],
                title="Absolute error", x_label="t (s)", y_label="m"),
    ]
    return ExperimentResult("oscillator", series, summary, plots)


def pendulum(params):
    p = mechanics.PendulumParams(params["length"], params["g"], params["theta0"], params["omega0"])
    series = mechanics.simulate_pendulum(p, params["dt"], params["tmax"])
    t = series.column("t")
    period = mechanics.zero_crossing_period(t, series.column("omega"))
    summary = (
        f"period = {_g(period) if period is not None else 'n/a'} s, "
        f"small-angle period = {_g(mechanics.small_angle_period(p))} s"
    )
    plot = SvgPlot(
        [
            SvgSeries("nonlinear", t, series.column("theta")),
            SvgSeries("small angle", t, series.column("theta_small_angle")),
        ],
        title="Simple pendulum", x_label="t (s)", y_label="theta (rad)",
    )
    return ExperimentResult("pendulum", series, summary, [plot])


def string(params):
    p = mechanics.StringParams(
        params["length"], params["tension"], params["mu"], params["amplitude"], params["mode"]
    )
    frames = mechanics.string_animation_frames(p, params["frames"], params["points"])
    f = mechanics.resonance_frequency(p)
    summary = (
        f"f_{p.n} = {_g(f)} Hz, v = {_g(mechanics.wave_speed(p.tension, p.mu))} m/s, "
        f"{p.n + 1} nodes"
    )
    series = [
        SvgSeries(f"t = {_g(row[0], 4)} s", frames.positions, row[1:], color="#1f77b4", opacity=0.35)
        for row in frames.series.rows
    ]
    nodes = mechanics.node_positions(p)
    plot = SvgPlot(
        series, title=f"Fixed-fixed string, mode {p.n}", x_label="x (m)", y_label="y (m)",
        markers=[(x, 0.0) for x in nodes], marker_label="nodes",
    )
    return ExperimentResult("string", frames.series, summary, [plot])


def temperature_or_stirling(params):
    if params["kind"] == "stirling":
        table = tables.stirling_table(params["n_max"])
        last = table.rows[-1]
        summary = f"n = {int(last[0])}: relative error {_g(last[3])} (1/(12n) = {_g(1 / (12 * last[0]))})"
        plot = SvgPlot(
            [SvgSeries("relative error", table.column("n"), table.column("relative_error"))],
            title="Factorial vs Stirling approximation", x_label="n", y_label="relative error",
        )
        return ExperimentResult("tables", table, summary, [plot])

    spec = tables.TableSpec(params["start"], params["stop"], params["step"])
    table = tables.fahrenheit_celsius_table(spec)
    summary = f"{len(table)} rows from {_g(spec.start)} C to {_g(table.rows[-1][0])} C"
    plot = SvgPlot(
        [SvgSeries("F = 9C/5 + 32", table.column("celsius"), table.column("fahrenheit"))],
        title="Fahrenheit-Celsius conversion", x_label="Celsius", y_label="Fahrenheit",
    )
    return ExperimentResult("tables", table, summary, [plot])


BUILDERS = {
    "photo": photo,
    "decay": decay,
    "schrodinger": schrodinger,
    "circular": circular,
    "oscillator": oscillator,
    "pendulum": pendulum,
    "string": string,
    "tables": temperature_or_stirling,
}


def build(subcommand, params):
    logging.info(f"Running {subcommand} with {params}")
    return BUILDERS[subcommand](params)
