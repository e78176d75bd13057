import json

import pytest

from pbopt.cli import main


class TestList:
    def test_lists_problems_and_optimizers(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        for name in ("parabola", "rosenbrock10", "lorenz_oscillator",
                     "pbo", "es", "cmaes"):
            assert name in out


class TestBaseline:
    def test_prints_reward_levels(self, capsys):
        assert main(["baseline"]) == 0
        out = capsys.readouterr().out
        assert "stabilizer reward (u=0):" in out
        assert "oscillator sign changes (u=0):" in out

    def test_csv_export(self, tmp_path, capsys):
        path = tmp_path / "ref.csv"
        assert main(["baseline", "--csv", str(path)]) == 0
        lines = path.read_text().splitlines()
        assert lines[0] == "t,x,y,z,u"
        assert len(lines) == 3002


class TestRun:
    def test_campaign_from_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "problem": "parabola", "optimizer": "cmaes",
            "runs": 2, "generations": 3, "out_dir": str(tmp_path / "out")}))
        assert main(["run", "--config", str(cfg)]) == 0
        out_dir = tmp_path / "out"
        assert (out_dir / "parabola_cmaes_run0.csv").exists()
        assert (out_dir / "parabola_cmaes_aggregate.csv").exists()
        assert "best cost" in capsys.readouterr().out

    def test_flag_overrides(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "problem": "parabola", "optimizer": "es",
            "runs": 5, "generations": 2, "out_dir": str(tmp_path / "a")}))
        override = tmp_path / "b"
        assert main(["run", "--config", str(cfg), "--runs", "1",
                     "--out", str(override), "--seed", "7"]) == 0
        assert (override / "parabola_es_run0.csv").exists()
        assert not (override / "parabola_es_run1.csv").exists()

    def test_error_exit_code_and_message(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"problem": "unknown", "optimizer": "pbo"}))
        assert main(["run", "--config", str(cfg)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        missing = tmp_path / "nope.json"
        with pytest.raises(SystemExit):
            main(["run"])  # --config is required
        rc = None
        try:
            rc = main(["run", "--config", str(missing)])
        except FileNotFoundError:
            pytest.fail("file errors must be reported, not raised")
        assert rc == 1
        assert "error:" in capsys.readouterr().err
