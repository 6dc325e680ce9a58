import xml.etree.ElementTree as ET

import numpy as np
import pandas as pd
import pytest

from openph import mechanics
from openph.cli import SUBCOMMANDS, main, parse_args
from openph.experiments import build, result_digest

SVG = "{http://www.w3.org/2000/svg}"

SMALL_RUNS = {
    "photo": ["photo", "--freq", "1.5e15", "--threshold", "1e15", "--freq-max", "2e15", "--points", "5"],
    "decay": ["decay", "--n0", "500", "--half-life", "30", "--dt", "5", "--tmax", "100", "--seed", "11"],
    "decay_ensemble": ["decay", "--n0", "300", "--half-life", "30", "--dt", "5", "--tmax", "60",
                       "--ensemble", "4", "--workers", "2"],
    "schrodinger": ["schrodinger", "--points", "101", "--levels", "3"],
    "schrodinger_double": ["schrodinger", "--potential", "double", "--barrier-height", "100",
                           "--barrier-width", "0.1", "--points", "101", "--levels", "2"],
    "circular": ["circular", "--radius", "2", "--omega", "-1.5", "--samples", "20"],
    "oscillator": ["oscillator", "--tmax", "5", "--dt", "0.01"],
    "oscillator_simulate": ["oscillator", "--mode", "simulate", "--tmax", "5", "--dt", "0.01"],
    "oscillator_response": ["oscillator", "--mode", "response", "--points", "50"],
    "pendulum": ["pendulum", "--tmax", "3", "--dt", "0.01"],
    "string": ["string", "--mode", "2", "--frames", "3", "--points", "21"],
    "temperature": ["tables"],
    "stirling": ["tables", "--kind", "stirling", "--n-max", "30"],
}


GOLDEN_RUNS = {
    "circular.csv": ["circular", "--radius", "1", "--omega", "1", "--samples", "5",
                     "--t1", "6.283185307179586"],
    "decay_no_decay.csv": ["decay", "--n0", "100", "--lambda", "0", "--dt", "1", "--tmax", "5", "--seed", "7"],
    "decay_instant.csv": ["decay", "--n0", "100", "--lambda", "50", "--dt", "1", "--tmax", "2", "--seed", "7"],
    "decay_single_seed.csv": ["decay", "--n0", "10000", "--half-life", "1200", "--dt", "10",
                              "--tmax", "2400", "--seed", "2024"],
    "temperature.csv": ["tables", "--kind", "temperature"],
    "stirling.csv": ["tables", "--kind", "stirling", "--n-max", "20"],
    "photo.csv": ["photo", "--freq", "1.5e15", "--threshold", "1e15", "--precision", "6"],
    "photo_sweep.csv": ["photo", "--freq", "1.5e15", "--threshold", "1e15", "--freq-max", "3e15",
                        "--points", "7"],
    "schrodinger_square.csv": ["schrodinger", "--points", "41", "--levels", "3"],
    "schrodinger_double.csv": ["schrodinger", "--potential", "double", "--barrier-height", "100",
                               "--barrier-width", "0.1", "--points", "41", "--levels", "2"],
    "oscillator_compare.csv": ["oscillator", "--tmax", "2", "--dt", "0.01"],
    "oscillator_simulate.csv": ["oscillator", "--mode", "simulate", "--tmax", "2", "--dt", "0.01"],
    "oscillator_response.csv": ["oscillator", "--mode", "response", "--points", "25"],
    "pendulum.csv": ["pendulum", "--tmax", "1", "--dt", "0.01"],
    "string.csv": ["string", "--mode", "2", "--frames", "4", "--points", "11"],
}


def _run(tmp_path, argv, name="out.csv"):
    target = tmp_path / name
    status = main([*argv, "--output", str(target)])
    return status, target


class TestParseArgs:
    def test_defaults(self):
        config = parse_args(["decay"])
        assert config.subcommand == "decay"
        assert config.format == "csv"
        assert config.precision == 12
        assert config.output_path is None
        assert config.seed == 1
        assert config.parameters["n0"] == 10000
        assert config.parameters["half_life"] == 1220.0
        assert config.parameters["decay_constant"] is None

    def test_values(self):
        config = parse_args(["photo", "--freq", "1.5e15", "--threshold", "1e15", "--format", "svg", "-o", "p.svg"])
        assert config.parameters["freq"] == 1.5e15
        assert config.parameters["threshold"] == 1e15
        assert config.format == "svg"
        assert config.output_path == "p.svg"

    def test_lambda_flag(self):
        config = parse_args(["decay", "--lambda", "0.5", "--seed", "18446744073709551615"])
        assert config.parameters["decay_constant"] == 0.5
        assert config.seed == 2**64 - 1

    @pytest.mark.parametrize(
        "argv,fragment",
        [
            (["decay", "--n0", "0"], "--n0"),
            (["nonsense"], "invalid choice"),
            (["photo", "--freq", "1e15"], "--threshold"),
            (["circular", "--radius", "1", "--omega", "0"], "--omega"),
            (["decay", "--half-life", "10", "--lambda", "0.1"], "not allowed"),
            (["decay", "--seed", "-1"], "--seed"),
            (["schrodinger", "--points", "5", "--levels", "4"], "--levels"),
            (["schrodinger", "--potential", "parabolic"], "--omega"),
            (["schrodinger", "--potential", "double", "--barrier-height", "1"], "--barrier-width"),
            (["schrodinger", "--potential", "tabulated"], "--potential-file"),
            (["pendulum", "--dt", "1", "--tmax", "0.5"], "--tmax"),
            (["oscillator", "--damping", "0", "--drive-omega", "1"], "undamped resonance"),
            (["tables", "--n-max", "171"], "--n-max"),
            (["photo", "--freq", "abc", "--threshold", "1e15"], "--freq"),
        ],
    )
    def test_usage_errors_exit_2(self, argv, fragment, capsys):
        with pytest.raises(SystemExit) as excinfo:
            parse_args(argv)
        assert excinfo.value.code == 2
        assert fragment in capsys.readouterr().err

    def test_count_message(self, capsys):
        assert main(["decay", "--n0", "0"]) == 2
        err = capsys.readouterr().err
        assert "--n0" in err
        assert ">= 1" in err

    def test_help(self, capsys):
        assert main(["--help"]) == 0
        assert main(["schrodinger", "--help"]) == 0
        assert "--potential-file" in capsys.readouterr().out


class TestGoldenOutputs:
    @pytest.mark.parametrize("golden", sorted(GOLDEN_RUNS))
    def test_matches_golden(self, tmp_path, assert_golden, golden):
        status, target = _run(tmp_path, GOLDEN_RUNS[golden])
        assert status == 0
        assert_golden(golden, target.read_bytes())

    def test_every_subcommand_is_pinned(self):
        assert {argv[0] for argv in GOLDEN_RUNS.values()} == set(SUBCOMMANDS)
        assert {"simulate", "compare", "response"} <= {
            parse_args(argv).parameters["mode"] for argv in GOLDEN_RUNS.values() if argv[0] == "oscillator"
        }

    def test_hand_checked_goldens_are_committed(self, golden_dir):
        for name in ("circular.csv", "decay_no_decay.csv", "decay_instant.csv", "temperature.csv", "photo.csv"):
            assert (golden_dir / name).is_file(), name

    def test_photo_summary(self, tmp_path, capsys):
        status, target = _run(tmp_path, ["photo", "--freq", "1.5e15", "--threshold", "1.0e15"])
        assert status == 0
        err = capsys.readouterr().err
        assert "V_stop = 2.0678" in err
        assert "1 rows written" in err
        frame = pd.read_csv(target)
        assert list(frame.columns) == ["f", "kinetic_energy", "max_speed", "stopping_voltage"]
        assert frame["stopping_voltage"][0] == pytest.approx(2.0678338484619, rel=1e-11)

    def test_string_summary(self, tmp_path, capsys):
        status, _ = _run(tmp_path, ["string"])
        assert status == 0
        assert "f_1 = 50 Hz" in capsys.readouterr().err


class TestRuntimeErrors:
    def test_below_threshold_exits_1(self, tmp_path, capsys):
        status, target = _run(tmp_path, ["photo", "--freq", "1e14", "--threshold", "1e15"])
        assert status == 1
        assert "threshold" in capsys.readouterr().err
        assert not target.exists()

    def test_missing_potential_file_exits_1(self, tmp_path, capsys):
        missing = tmp_path / "missing.csv"
        status, _ = _run(tmp_path, ["schrodinger", "--potential", "tabulated",
                                    "--potential-file", str(missing)])
        assert status == 1
        assert "openph schrodinger: error:" in capsys.readouterr().err

    def test_uncovered_potential_file_exits_1(self, tmp_path, fixtures_dir):
        status, _ = _run(tmp_path, ["schrodinger", "--potential", "tabulated", "--x-max", "2",
                                    "--potential-file", str(fixtures_dir / "symmetric_well.csv")])
        assert status == 1

    def test_log_file(self, tmp_path):
        log_file = tmp_path / "logs" / "openph.log"
        status, _ = _run(tmp_path, ["tables", "--log-file", str(log_file)])
        assert status == 0
        assert "Successfully completed tables" in log_file.read_text()


class TestDeterminism:
    @pytest.mark.parametrize("name", sorted(SMALL_RUNS))
    def test_two_runs_identical(self, tmp_path, name):
        argv = SMALL_RUNS[name]
        first_status, first = _run(tmp_path, argv, "first.csv")
        second_status, second = _run(tmp_path, argv, "second.csv")
        assert first_status == second_status == 0
        assert first.read_bytes() == second.read_bytes()

        svg_status, svg = _run(tmp_path, [*argv, "--format", "svg"], "plot.svg")
        assert svg_status == 0
        assert svg.read_text().startswith("<?xml")

    @pytest.mark.parametrize("name", sorted(SMALL_RUNS))
    def test_csv_round_trip(self, tmp_path, name):
        argv = SMALL_RUNS[name]
        config = parse_args(argv)
        result = build(config.subcommand, config.parameters)
        _, target = _run(tmp_path, argv)
        frame = pd.read_csv(target)
        assert list(frame.columns) == result.table.labels
        np.testing.assert_allclose(frame.to_numpy(), result.table.rows, rtol=1e-11, atol=1e-300)

    @pytest.mark.parametrize("name", ["decay", "schrodinger", "oscillator"])
    def test_format_does_not_change_numbers(self, name):
        argv = SMALL_RUNS[name]
        csv_config = parse_args([*argv, "--format", "csv"])
        svg_config = parse_args([*argv, "--format", "svg"])
        assert csv_config.parameters == svg_config.parameters
        csv_result = build(csv_config.subcommand, csv_config.parameters)
        svg_result = build(svg_config.subcommand, svg_config.parameters)
        assert result_digest(csv_result) == result_digest(svg_result)

    def test_ensemble_workers_do_not_change_output(self, tmp_path):
        base = SMALL_RUNS["decay_ensemble"][:-2]
        _, one = _run(tmp_path, [*base, "--workers", "1"], "one.csv")
        _, three = _run(tmp_path, [*base, "--workers", "3"], "three.csv")
        assert one.read_bytes() == three.read_bytes()

    def test_oscillator_compare_renders_four_panels(self, tmp_path):
        _, svg = _run(tmp_path, [*SMALL_RUNS["oscillator"], "--format", "svg"], "compare.svg")
        assert svg.read_text().count("<svg") == 5


class TestSvgOutput:
    @staticmethod
    def _svg_root(tmp_path, argv):
        status, target = _run(tmp_path, [*argv, "--format", "svg"], "plot.svg")
        assert status == 0
        return ET.fromstring(target.read_bytes())

    @pytest.mark.parametrize("levels", [1, 3, 5])
    def test_schrodinger_legend_lists_potential_and_levels(self, tmp_path, levels):
        root = self._svg_root(tmp_path, ["schrodinger", "--points", "101", "--levels", str(levels)])
        legend = root.find(f"{SVG}g[@class='legend']")
        texts = [t.text for t in legend.findall(f"{SVG}text")]
        assert len(texts) == levels + 1
        assert texts[0] == "V(x)"
        assert [t.split(" ")[0] for t in texts[1:]] == [f"psi_{j}" for j in range(levels)]

    @pytest.mark.parametrize("mode,length", [(2, "1"), (3, "0.1"), (13, "1.3")])
    def test_string_markers_sit_on_nodes(self, tmp_path, mode, length):
        argv = ["string", "--mode", str(mode), "--length", length, "--frames", "3", "--points", "21"]
        root = self._svg_root(tmp_path, argv)
        markers = root.findall(f"{SVG}circle[@class='node']")
        assert len(markers) == mode + 1

        config = parse_args(argv)
        plot = build(config.subcommand, config.parameters).plots[0]
        p = mechanics.StringParams(
            config.parameters["length"], config.parameters["tension"], config.parameters["mu"],
            config.parameters["amplitude"], mode,
        )
        px, py = plot.to_pixel(mechanics.node_positions(p), np.zeros(mode + 1))
        np.testing.assert_allclose([float(m.get("cx")) for m in markers], px, atol=0.006)
        np.testing.assert_allclose([float(m.get("cy")) for m in markers], py, atol=0.006)
