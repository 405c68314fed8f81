import json
import math
import os
import subprocess
import sys

import pytest

from noma_fbl import DomainError, SweepSpec, SystemConfig, run_figure, run_sweep
from noma_fbl.harness import SEED_ENV_VAR


FAST = {"n_samples": 5000}


class TestSystemConfig:
    def test_defaults_assemble(self):
        cfg = SystemConfig()
        assert cfg.num_users == 10 and (cfg.weak_rank, cfg.strong_rank) == (2, 8)
        assert cfg.rho_linear == pytest.approx(10.0 ** 1.5)
        assert cfg.power.alpha_strong == 0.2
        assert cfg.fbl.blocklength == 400

    def test_env_seed_override(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "777")
        assert SystemConfig().seed == 777
        assert SystemConfig(seed=3).seed == 3
        monkeypatch.delenv(SEED_ENV_VAR)
        assert SystemConfig().seed == 1

    def test_validation(self):
        with pytest.raises(DomainError):
            SystemConfig(weak_rank=8, strong_rank=2)
        with pytest.raises(DomainError):
            SystemConfig(num_users=7, strong_rank=9)
        with pytest.raises(DomainError):
            SystemConfig(alpha_weak=0.6, alpha_strong=0.2)
        with pytest.raises(DomainError):
            SystemConfig().replace(bogus_field=1)

    def test_from_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"rho_db": 20.0, "n_samples": 1234, "seed": 5}))
        cfg = SystemConfig.from_json(str(path))
        assert cfg.rho_db == 20.0 and cfg.n_samples == 1234 and cfg.seed == 5


class TestSweepSpec:
    def test_validation(self):
        with pytest.raises(DomainError):
            SweepSpec("frequency", (1.0,), ("mc",), "x.csv")
        with pytest.raises(DomainError):
            SweepSpec("rho_db", (1.0, 1.0), ("mc",), "x.csv")
        with pytest.raises(DomainError):
            SweepSpec("rho_db", (1.0, 2.0), ("magic",), "x.csv")
        with pytest.raises(DomainError):
            SweepSpec("rho_db", (1.0, 2.0), (), "x.csv")
        # decreasing grids are still strictly monotone
        SweepSpec("epsilon", (0.9, 0.1, 0.01), ("closed",), "x.csv")


class TestRunSweep:
    def test_single_point_asymptotic(self, tmp_path):
        cfg = SystemConfig(**FAST)
        out = str(tmp_path / "one.csv")
        run_sweep(cfg, SweepSpec("rho_db", (20.0,), ("asymptotic",), out))
        header, row = open(out).read().strip().split("\n")
        assert header == "rho_db,strong_asymptotic,weak_asymptotic"
        vals = [float(tok) for tok in row.split(",")]
        assert vals[0] == 20.0
        assert vals[1] == pytest.approx(-math.log(1e-5) / 4.0, rel=1e-12)

    def test_byte_identical_reruns(self, tmp_path):
        cfg = SystemConfig(**FAST)
        spec_a = SweepSpec("rho_db", (5.0, 15.0), ("mc", "closed"), str(tmp_path / "a.csv"))
        spec_b = SweepSpec("rho_db", (5.0, 15.0), ("mc", "closed"), str(tmp_path / "b.csv"))
        run_sweep(cfg, spec_a)
        run_sweep(cfg, spec_b)
        assert open(spec_a.output_path, "rb").read() == open(spec_b.output_path, "rb").read()

    def test_csv_round_trip_exact(self, tmp_path):
        from noma_fbl import ec_weak_closed

        cfg = SystemConfig(**FAST)
        out = str(tmp_path / "rt.csv")
        run_sweep(cfg, SweepSpec("rho_db", (7.0, 23.0), ("closed",), out))
        lines = open(out).read().strip().split("\n")
        cols = lines[0].split(",")
        for line in lines[1:]:
            vals = dict(zip(cols, (float(tok) for tok in line.split(","))))
            rho = 10.0 ** (vals["rho_db"] / 10.0)
            expected = ec_weak_closed(
                cfg.weak_rank, cfg.num_users, cfg.power, cfg.fbl, cfg.theta_weak, rho
            ).value
            assert vals["weak_closed"] == expected  # exact: repr round-trips

    def test_epsilon_sweep_weak_column_vanishes(self, tmp_path):
        cfg = SystemConfig(rho_db=20.0, **FAST)
        out = str(tmp_path / "eps.csv")
        grid = (1e-8, 1e-5, 1e-2, 0.5, 0.9)
        run_sweep(cfg, SweepSpec("epsilon", grid, ("closed",), out))
        lines = open(out).read().strip().split("\n")
        weak = [float(line.split(",")[2]) for line in lines[1:]]
        assert all(a > b for a, b in zip(weak, weak[1:]))
        assert weak[-1] < 0.05

    def test_failure_identifies_grid_point(self, tmp_path):
        cfg = SystemConfig(**FAST)
        spec = SweepSpec("theta", (0.01, -0.5), ("closed",), str(tmp_path / "bad.csv"))
        with pytest.raises(DomainError, match=r"theta=-0\.5"):
            run_sweep(cfg, spec)


class TestRunFigure:
    def test_unknown_id(self):
        with pytest.raises(DomainError):
            run_figure(11)

    def test_figure2_schema(self, tmp_path):
        out = run_figure(2, FAST, str(tmp_path / "f2.csv"))
        lines = open(out).read().strip().split("\n")
        header = lines[0].split(",")
        assert header[0] == "rho_db"
        for col in (
            "strong_mc", "strong_mc_hw", "weak_mc", "weak_mc_hw",
            "strong_closed", "weak_closed", "strong_high_snr", "weak_high_snr",
        ):
            assert col in header
        assert len(lines) == 22  # 0..40 dB in 2 dB steps

    def test_figure3_pairing_columns(self, tmp_path):
        out = run_figure(3, FAST, str(tmp_path / "f3.csv"))
        header = open(out).readline().strip().split(",")
        assert header[0] == "rho_db"
        assert "tec_16_25_34" in header and "tec_12_34_56" in header

    def test_figure7_floor_column_and_bound(self, tmp_path):
        out = run_figure(7, FAST, str(tmp_path / "f7.csv"))
        lines = open(out).read().strip().split("\n")
        cols = lines[0].split(",")
        fl = cols.index("floor")
        for line in lines[1:]:
            vals = [float(tok) for tok in line.split(",")]
            for j, col in enumerate(cols):
                if col.startswith("dv_"):
                    assert vals[j] >= vals[fl] - 1e-12

    def test_figure9_runs(self, tmp_path):
        out = run_figure(9, FAST, str(tmp_path / "f9.csv"))
        assert open(out).readline().startswith("epsilon,dv_strong_theta0.001")

    def test_overrides_change_output(self, tmp_path):
        a = run_figure(2, FAST, str(tmp_path / "a.csv"))
        b = run_figure(2, {**FAST, "seed": 2}, str(tmp_path / "b.csv"))
        assert open(a).read() != open(b).read()


CLI = [sys.executable, "-m", "noma_fbl.cli"]


class TestCli:
    def test_figure_and_determinism(self, tmp_path):
        out1, out2 = str(tmp_path / "c1.csv"), str(tmp_path / "c2.csv")
        for out in (out1, out2):
            res = subprocess.run(
                CLI + ["figure", "2", "--set", "n_samples=2000", "--out", out],
                capture_output=True, text=True,
            )
            assert res.returncode == 0, res.stderr
        assert open(out1, "rb").read() == open(out2, "rb").read()

    def test_sweep_command(self, tmp_path):
        out = str(tmp_path / "sw.csv")
        res = subprocess.run(
            CLI + ["sweep", "--axis", "rho_db", "--grid", "0:10:5",
                   "--evaluators", "closed,asymptotic", "--out", out],
            capture_output=True, text=True,
        )
        assert res.returncode == 0, res.stderr
        assert len(open(out).read().strip().split("\n")) == 4

    def test_pairing_command(self):
        res = subprocess.run(
            CLI + ["pairing", "--num-users", "4", "--rho-db", "20",
                   "--samples", "20000", "--exhaustive"],
            capture_output=True, text=True,
        )
        assert res.returncode == 0, res.stderr
        assert "best pairing" in res.stdout

    def test_error_is_machine_readable(self):
        res = subprocess.run(
            CLI + ["sweep", "--axis", "rho_db", "--grid", "5:0:1",
                   "--evaluators", "closed", "--out", "/tmp/x.csv"],
            capture_output=True, text=True,
        )
        assert res.returncode != 0
        err = json.loads(res.stderr.strip().split("\n")[-1])
        assert "error" in err and "message" in err

    def test_env_seed_respected(self, tmp_path):
        out1, out2 = str(tmp_path / "e1.csv"), str(tmp_path / "e2.csv")
        env = dict(os.environ, **{SEED_ENV_VAR: "42"})
        subprocess.run(CLI + ["figure", "2", "--set", "n_samples=2000", "--out", out1],
                       capture_output=True, env=env, check=True)
        subprocess.run(CLI + ["figure", "2", "--set", "n_samples=2000", "--set", "seed=42",
                              "--out", out2], capture_output=True, check=True)
        assert open(out1, "rb").read() == open(out2, "rb").read()
