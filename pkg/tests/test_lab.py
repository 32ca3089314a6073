import json
import os

import numpy as np
import pytest

from couette_lab.cli import main
from couette_lab.lab import (RunManifest, SimConfig, config_to_text,
                             fit_power_law, initial_vorticity, build_grid,
                             parse_config, run_self_convergence,
                             run_simulate, verify_inequality_suite)
from couette_lab.grid import compute_E0, l2_norm, to_spectral


class TestConfig:
    def test_roundtrip(self):
        cfg = SimConfig(nu=3e-3, n_x=64, n_y=40, amp=0.25, label="abc")
        assert parse_config(config_to_text(cfg)) == cfg

    def test_comments_and_blanks(self):
        cfg = parse_config("# header\n\nnu = 0.005  # inline\nn_x = 32\n")
        assert cfg.nu == 0.005 and cfg.n_x == 32

    def test_unknown_key(self):
        with pytest.raises(ValueError):
            parse_config("bogus = 1\n")

    def test_missing_equals(self):
        with pytest.raises(ValueError):
            parse_config("just words\n")

    def test_validation(self):
        with pytest.raises(ValueError):
            SimConfig(nu=2.0)
        with pytest.raises(ValueError):
            SimConfig(theta=0.25)
        with pytest.raises(ValueError):
            SimConfig(amp=-1.0)
        with pytest.raises(ValueError):
            SimConfig(y_profile="square")

    def test_initial_profile_shape(self):
        # odd n_y so the channel centerline y=0 is a collocation node
        # and the profile peak is sampled exactly
        cfg = SimConfig(n_x=32, n_y=25, L_x=20.0, sigma=2.0, amp=0.3)
        grid = build_grid(cfg)
        f = initial_vorticity(cfg, grid)
        assert np.abs(f.data).max() == pytest.approx(0.3, rel=1e-6)
        assert np.abs(f.data[:, [0, -1]]).max() < 1e-15


class TestPowerLawFit:
    def test_exact_power(self):
        ts = np.linspace(1.0, 100.0, 60)
        pairs = list(zip(ts, 5.0 * ts ** -1.5))
        s, b, r = fit_power_law(pairs, (1.0, 100.0))
        assert s == pytest.approx(-1.5, abs=1e-12)
        assert np.exp(b) == pytest.approx(5.0, rel=1e-10)
        assert r < 1e-12

    def test_constant_series(self):
        ts = np.linspace(2.0, 50.0, 30)
        s, _, _ = fit_power_law(list(zip(ts, np.full(30, 3.0))), (2.0, 50.0))
        assert s == pytest.approx(0.0, abs=1e-12)

    def test_window_restricts_samples(self):
        ts = np.linspace(1.0, 100.0, 200)
        vals = ts ** -0.75
        vals[ts > 50.0] = 1e-8  # garbage outside the window
        s, _, _ = fit_power_law(list(zip(ts, vals)), (1.0, 50.0))
        assert s == pytest.approx(-0.75, abs=1e-10)

    def test_noisy_recovery(self):
        rng = np.random.default_rng(7)
        ts = np.geomspace(1.0, 1000.0, 120)
        vals = ts ** -0.75 * np.exp(0.01 * rng.standard_normal(120))
        s, _, _ = fit_power_law(list(zip(ts, vals)), (1.0, 1000.0))
        assert s == pytest.approx(-0.75, abs=0.01)

    def test_requires_enough_samples(self):
        with pytest.raises(ValueError):
            fit_power_law([(1.0, 1.0), (2.0, 0.5)], (1.0, 2.0))

    def test_rejects_nonpositive(self):
        ts = np.linspace(1.0, 10.0, 20)
        pairs = [(t, 0.0) for t in ts]
        with pytest.raises(ValueError):
            fit_power_law(pairs, (1.0, 10.0))


class TestManifest:
    def test_save_json_and_csv(self, tmp_path):
        man = RunManifest(kind="demo", config={"nu": 1e-2})
        man.time = [0.0, 1.0, 2.0]
        man.series = {"l2": [3.0, 2.0, 1.0]}
        man.fits = {"l2": {"slope": -1.0}}
        path = man.save(str(tmp_path), "demo")
        with open(path) as fh:
            d = json.load(fh)
        assert d["kind"] == "demo"
        assert d["schema_version"] == 1
        assert d["series"]["l2"] == [3.0, 2.0, 1.0]
        csv = (tmp_path / "demo__l2.csv").read_text().splitlines()
        assert csv[0] == "time,l2"
        assert [float(x) for x in csv[2].split(",")] == [1.0, 2.0]


class TestDrivers:
    def test_simulate_amp_zero_is_trivial(self):
        cfg = SimConfig(nu=1e-2, L_x=20.0, n_x=32, n_y=24, amp=0.0,
                        T_final=2.0)
        res = run_simulate(cfg)
        assert res["status"] == "ok"
        assert max(res["l2_omega"]) == 0.0

    def test_simulate_decaying_norm(self):
        cfg = SimConfig(nu=1e-2, L_x=20.0, n_x=32, n_y=24, amp=0.05,
                        sigma=2.0, T_final=5.0)
        res = run_simulate(cfg)
        assert res["status"] == "ok"
        assert res["l2_omega"][-1] < res["norm0"]

    def test_e0_scales_linearly_with_amp(self):
        cfg = SimConfig(nu=1e-2, L_x=20.0, n_x=48, n_y=32, sigma=2.0)
        grid = build_grid(cfg)
        e1 = compute_E0(initial_vorticity(cfg, grid))
        cfg2 = SimConfig(nu=1e-2, L_x=20.0, n_x=48, n_y=32, sigma=2.0,
                         amp=0.02)
        e2 = compute_E0(initial_vorticity(cfg2, grid))
        assert e2 == pytest.approx(2.0 * e1, rel=1e-10)

    def test_verify_single_suite(self):
        man = verify_inequality_suite(SimConfig(), suite=["weight_submult"])
        assert list(man.constants) == ["weight_submult"]
        assert man.passed

    def test_verify_rejects_unknown_suite(self):
        with pytest.raises(ValueError):
            verify_inequality_suite(SimConfig(), suite=["nope"])


class TestCli:
    def test_verify_subcommand_exit_zero(self, tmp_path, capsys):
        rc = main(["--outdir", str(tmp_path), "--name", "v",
                   "verify", "--suite", "weight_submult"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "PASS" in out
        assert (tmp_path / "v.json").exists()

    def test_simulate_subcommand_writes_manifest(self, tmp_path):
        rc = main(["--outdir", str(tmp_path), "--name", "s",
                   "--set", "L_x=20.0", "--set", "n_x=32",
                   "--set", "n_y=24", "--set", "T_final=2.0",
                   "--set", "amp=0.01", "--set", "sigma=2.0",
                   "simulate"])
        # k_min = 2 pi / 20 > nu: resolution-guard flag, exit code 3
        assert rc == 3
        with open(tmp_path / "s.json") as fh:
            d = json.load(fh)
        assert d["kind"] == "simulate"
        assert d["extra"]["status"] == "ok"
        assert d["resolution"]["guard_k_min_le_nu"] is False

    def test_bad_set_key(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["--outdir", str(tmp_path), "--set", "bogus=1",
                  "simulate"])

    def test_config_file(self, tmp_path):
        cfgfile = tmp_path / "c.cfg"
        cfgfile.write_text("nu = 0.01\nL_x = 640.0\nn_x = 32\nn_y = 24\n"
                           "T_final = 1.0\namp = 0.0\n")
        rc = main(["--config", str(cfgfile), "--outdir", str(tmp_path),
                   "--name", "cf", "simulate"])
        assert rc == 0  # k_min <= nu, no flags, trivial run passes


class TestSelfConvergence:
    def test_second_order(self):
        cfg = SimConfig(nu=1e-2, n_x=32, n_y=24, amp=0.05, sigma=2.0)
        man = run_self_convergence(cfg)
        assert 3.5 <= man.extra["ratio"] <= 4.5
