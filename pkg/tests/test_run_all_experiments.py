import pytest

from run_all_experiments import cleanup_folder, experiments, run_all


def test_cleanup_folder(tmp_path):
    (tmp_path / "old").mkdir()
    (tmp_path / "old" / "stale.csv").write_text("x\n")
    (tmp_path / "stale.svg").write_text("<svg/>")
    cleanup_folder(tmp_path)
    assert list(tmp_path.iterdir()) == []


def test_run_subset(tmp_path, golden_dir):
    out = tmp_path / "figures"
    out.mkdir()
    (out / "leftover.txt").write_text("old run")
    written = run_all(out, names=["temperature", "circular"])
    assert [p.name for p in written] == ["temperature.csv", "temperature.svg", "circular.csv", "circular.svg"]
    assert sorted(p.name for p in out.iterdir()) == sorted(p.name for p in written)
    assert (out / "temperature.csv").read_bytes() == (golden_dir / "temperature.csv").read_bytes()


def test_log_file_is_passed_on(tmp_path):
    log_file = tmp_path / "logs" / "run.log"
    run_all(tmp_path / "figures", names=["stirling"], log_file=log_file)
    assert "Successfully completed tables" in log_file.read_text()


def test_every_experiment_is_a_valid_command():
    from openph.cli import parse_args

    for name, argv in experiments.items():
        assert parse_args(argv).subcommand == argv[0], name


def test_unknown_experiment(tmp_path):
    with pytest.raises(KeyError):
        run_all(tmp_path, names=["nope"])
