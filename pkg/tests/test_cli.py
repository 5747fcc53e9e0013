"""Command-line front end tests, driven through main() with argv lists."""

import pytest

from cornerwalk.cli import main
from cornerwalk.config import ExperimentConfig, load_config


def write_micro_config(path, extra=""):
    path.write_text(
        "[campaign]\n"
        "depth = 3\n"
        "walkers = 6000\n"
        "seed = 311\n"
        "[stats]\n"
        "count_floor = 20\n"
        "bootstrap_reps = 16\n" + extra
    )
    return str(path)


def test_config_reference_prints_loadable_ini(tmp_path, capsys):
    assert main(["config-reference"]) == 0
    out = capsys.readouterr().out
    path = tmp_path / "ref.ini"
    path.write_text(out)
    assert load_config(path) == ExperimentConfig()


def test_sample_command_writes_files(tmp_path, capsys):
    cfg = write_micro_config(tmp_path / "c.ini")
    code = main(["sample", "--config", cfg, "--out", str(tmp_path / "out")])
    assert code == 0
    out = capsys.readouterr().out
    assert "n_effective = 6000" in out
    assert "wrote sample_table.csv" in out
    assert (tmp_path / "out" / "sample_metrics.json").exists()


def test_dims_command_with_plots(tmp_path, capsys):
    cfg = write_micro_config(tmp_path / "c.ini")
    code = main(
        ["dims", "--config", cfg, "--out", str(tmp_path / "out"), "--plots"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "estimate = " in out
    assert (tmp_path / "out" / "dims_ratios.svg").exists()


def test_seed_override_changes_output(tmp_path):
    cfg = write_micro_config(tmp_path / "c.ini")
    main(["sample", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "1"])
    main(["sample", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "2"])
    a = (tmp_path / "a" / "sample_table.csv").read_text()
    b = (tmp_path / "b" / "sample_table.csv").read_text()
    assert a != b


def test_bad_config_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[campaign]\nnonsense = 1\n")
    assert main(["sample", "--config", str(path)]) == 2
    assert "cornerwalk:" in capsys.readouterr().err


def test_invalid_parameters_exit_2(tmp_path, capsys):
    # epsilon beyond the validator's range fails cleanly, not with a traceback
    path = tmp_path / "c.ini"
    path.write_text("[campaign]\ndepth = 2\nwalkers = 100\n[wos]\nabsorb_epsilon = 0.9\n")
    assert main(["sample", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert "absorb_epsilon" in capsys.readouterr().err


def test_delta_command_micro(tmp_path, capsys):
    cfg = write_micro_config(tmp_path / "c.ini", "[harnack]\nk_max = 2\n")
    code = main(["delta", "--config", cfg, "--out", str(tmp_path / "out")])
    assert code == 0
    assert (tmp_path / "out" / "delta_decay.csv").exists()


def test_missing_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
