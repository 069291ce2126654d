import json
import os

import numpy as np
import pytest

from iftem import cli
from iftem.config import dump_config, load_config, parse_config_text
from iftem.experiments import ConfigError, ExperimentConfig, write_atomic

MINIMAL = "M = 2\nL = 8\nb3db_tsym = 1.0\nebn0_db = 6\ntrials = 1\nseed = 3\n"


@pytest.fixture
def cfg_file(tmp_path):
    p = tmp_path / "exp.cfg"
    p.write_text(MINIMAL)
    return p


def run_cli(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestConfigFiles:
    def test_parse(self):
        vals = parse_config_text("# header\nM = 4  # inline\nebn0_db = 0, 2.5,5\n\n")
        assert vals == {"M": 4, "ebn0_db": (0.0, 2.5, 5.0)}

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="line|unknown"):
            parse_config_text("bogus = 1\n")

    def test_bad_value(self):
        with pytest.raises(ConfigError):
            parse_config_text("trials = many\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            parse_config_text("trials 3\n")

    def test_overrides_win(self, cfg_file):
        cfg = load_config(cfg_file, {"trials": 7})
        assert cfg.trials == 7 and cfg.L == 8

    def test_dump_round_trip(self):
        cfg = ExperimentConfig(M=4, b3db_tsym=(0.3, 1.0), ebn0_db=(0.0, 1.5))
        assert load_config(None, parse_config_text(dump_config(cfg))) == cfg


class TestCommands:
    def test_version(self, capsys):
        code, out, _ = run_cli(["version"], capsys)
        assert code == 0 and out.startswith("iftem ")

    def test_missing_config(self, tmp_path, capsys):
        missing = tmp_path / "nope.cfg"
        code, _, err = run_cli(["run", "-c", missing, "-o", tmp_path], capsys)
        assert code == 2
        assert str(missing) in err

    def test_invalid_config_value(self, tmp_path, capsys):
        code, _, err = run_cli(["validate-config", "--M", "3"], capsys)
        assert code == 2 and "M" in err

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as e:
            cli.main(["frobnicate"])
        assert e.value.code == 2

    def test_validate(self, cfg_file, capsys):
        code, out, _ = run_cli(["validate-config", "-c", cfg_file, "--trials", "9"], capsys)
        assert code == 0
        assert "trials = 9" in out and "L = 8" in out

    def test_run_minimal(self, cfg_file, tmp_path, capsys):
        out_dir = tmp_path / "out"
        code, out, _ = run_cli(["run", "-c", cfg_file, "-o", out_dir], capsys)
        assert code == 0
        lines = (out_dir / "sep.csv").read_text().strip().split("\n")
        assert len(lines) == 2
        assert (out_dir / "sep_vs_ebn0.svg").read_text().lstrip().startswith("<?xml")
        assert "SEP" in out

    def test_run_twice_identical(self, cfg_file, tmp_path, capsys):
        run_cli(["run", "-c", cfg_file, "-o", tmp_path / "a", "--no-plot"], capsys)
        run_cli(["run", "-c", cfg_file, "-o", tmp_path / "b", "--no-plot", "-j", "2"], capsys)
        assert (tmp_path / "a" / "sep.csv").read_bytes() == (tmp_path / "b" / "sep.csv").read_bytes()

    def test_outdir_from_environment(self, cfg_file, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path / "envdir"))
        code, _, _ = run_cli(["run", "-c", cfg_file, "--no-plot"], capsys)
        assert code == 0
        assert (tmp_path / "envdir" / "sep.csv").exists()

    def test_dashed_flags(self, capsys):
        code, out, _ = run_cli(["validate-config", "--ebn0-db", "1,2"], capsys)
        assert code == 0 and "ebn0_db = 1.0, 2.0" in out


class TestTrace:
    def trace(self, capsys, *extra):
        code, out, _ = run_cli(["trace", "--L", "8", "--ebn0_db", "inf", *extra], capsys)
        assert code == 0
        return json.loads(out)

    def test_noiseless_self_consistent(self, capsys):
        data = self.trace(capsys)
        ymb = np.array(data["y_minus_b"])
        np.testing.assert_allclose(ymb, data["P_times_s"], atol=1e-5)
        assert data["symbol_errors"] == 0
        assert data["hard"] == data["symbol_indices"]
        for key in ("firings", "encodings", "counts", "t_min", "t_max", "P", "condition", "soft"):
            assert key in data

    def test_stable_across_runs(self, capsys):
        a = run_cli(["trace", "--L", "8", "--ebn0_db", "3", "--trial", "4"], capsys)
        b = run_cli(["trace", "--L", "8", "--ebn0_db", "3", "--trial", "4"], capsys)
        assert a == b

    def test_trace_to_file(self, tmp_path, capsys):
        target = tmp_path / "trace.json"
        code, _, _ = run_cli(["trace", "--L", "4", "--out", target], capsys)
        assert code == 0 and json.loads(target.read_text())["trial"] == 0

    def test_bad_grid_index(self, capsys):
        code, _, _ = run_cli(["trace", "--b-index", "5"], capsys)
        assert code == 2


def test_atomic_write_leaves_nothing_on_failure(tmp_path, monkeypatch):
    target = tmp_path / "sep.csv"

    class Boom(Exception):
        pass

    real_replace = os.replace

    def failing_replace(src, dst):
        raise Boom

    monkeypatch.setattr(os, "replace", failing_replace)
    with pytest.raises(Boom):
        write_atomic(str(target), "a,b\n1,2\n")
    monkeypatch.setattr(os, "replace", real_replace)
    assert list(tmp_path.iterdir()) == []
