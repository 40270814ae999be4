import dataclasses
import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from wulffflow import (
    CosineInitial,
    FlowConfig,
    HermiteInitial,
    PRESET_NAMES,
    Pinched,
    SteadyCylinder,
    preset,
    run,
    write_outputs,
)
from wulffflow.cli import main as cli_main


def tiny_config(**overrides):
    base = dict(
        epsilon=0.2,
        n_intervals=16,
        tau=1e-4,
        horizon=0.01,
        initial=CosineInitial(0.8, 0.1, 2),
    )
    base.update(overrides)
    return FlowConfig(**base)


class TestInitialProfiles:
    def test_hermite_values(self):
        init = HermiteInitial(0.7, 0.4)
        assert init(0.0) == 0.7
        assert init(1.0) == pytest.approx(0.4)
        assert init(0.5) == pytest.approx(0.55)

    def test_hermite_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            HermiteInitial(0.0, 0.4)
        with pytest.raises(ValueError):
            HermiteInitial(0.5, -0.1)

    def test_cosine_values_and_flat_ends(self):
        init = CosineInitial(1.0, 0.25, 8)
        z = np.linspace(0, 1, 9)
        np.testing.assert_allclose(init(z), 1.0 + 0.25 * np.cos(8 * np.pi * z))
        h = 1e-7
        assert abs(init(h) - init(0.0)) / h < 1e-4
        assert abs(init(1.0) - init(1.0 - h)) / h < 1e-4

    def test_cosine_validation(self):
        with pytest.raises(ValueError):
            CosineInitial(0.2, 0.3, 2)  # would dip below zero
        with pytest.raises(ValueError):
            CosineInitial(1.0, 0.1, 3)  # odd wavenumber tilts the ends
        with pytest.raises(ValueError):
            CosineInitial(1.0, 0.1, 0)

    def test_describe(self):
        assert HermiteInitial(0.7, 0.4).describe() == {
            "kind": "hermite",
            "r0": 0.7,
            "r1": 0.4,
        }
        assert CosineInitial(1.0, 0.25, 8).describe()["wavenumber"] == 8


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            tiny_config(epsilon=1.2)
        with pytest.raises(ValueError):
            tiny_config(n_intervals=2)
        with pytest.raises(ValueError):
            tiny_config(tau=0.0)
        with pytest.raises(ValueError):
            tiny_config(horizon=-1.0)

    def test_describe_round_trips_through_json(self):
        cfg = tiny_config(snapshot_times=(0.0, 0.005), notes=("a note",))
        text = json.dumps(cfg.describe())
        back = json.loads(text)
        assert back["epsilon"] == 0.2
        assert back["initial"]["kind"] == "cosine"
        assert back["snapshot_times"] == [0.0, 0.005]
        assert back["notes"] == ["a note"]

    def test_presets(self):
        assert PRESET_NAMES == tuple(f"exp{i}" for i in range(1, 8))
        cfg = preset("exp1")
        assert cfg.epsilon == 0.2
        assert cfg.n_intervals == 500
        assert cfg.tau == 1e-4
        assert cfg.horizon == 3.0
        assert cfg.initial == HermiteInitial(0.7, 0.4)
        assert preset("exp5").epsilon == 0.4
        assert preset("exp6").epsilon == -0.2
        assert preset("exp4").n_intervals == 1000

    def test_exp7_flags_default_parameters(self):
        cfg = preset("exp7")
        assert cfg.initial == CosineInitial(1.0, 0.25, 8)
        assert any("defaults" in note for note in cfg.notes)

    def test_unknown_preset(self):
        with pytest.raises(ValueError, match="exp1"):
            preset("exp99")


class TestRun:
    def test_cylinder_is_immediately_steady(self):
        cfg = tiny_config(initial=CosineInitial(0.5, 0.0, 2), horizon=1.0)
        history = run(cfg)
        assert isinstance(history.outcome, SteadyCylinder)
        assert history.outcome.radius == pytest.approx(0.5, abs=1e-10)
        assert history.times[-1] <= 2 * cfg.tau

    def test_pinch_outcome(self):
        # a permissive pinch tolerance makes the thin end trip on step one
        cfg = tiny_config(
            initial=HermiteInitial(0.4, 0.2), pinch_tolerance=0.25, horizon=1.0
        )
        history = run(cfg)
        assert isinstance(history.outcome, Pinched)
        assert history.outcome.z_location == pytest.approx(1.0, abs=0.1)
        assert history.outcome.time <= cfg.tau

    def test_history_shape_and_monotone_times(self):
        cfg = tiny_config(horizon=0.05, record_limit=20)
        history = run(cfg)
        n = history.times.size
        assert n <= 20 + 2  # initial sample plus the closing record
        for name in ("energy", "volume", "lambda_bar", "l2_residual",
                     "min_radius", "max_slope"):
            assert getattr(history, name).shape == (n,)
        assert np.all(np.diff(history.times) > 0)
        assert history.nodes.size == cfg.n_intervals + 1

    def test_default_snapshots_cover_the_horizon(self):
        cfg = tiny_config(horizon=0.02, steady_tolerance=0.0)
        history = run(cfg)
        assert len(history.snapshots) == 9
        assert history.snapshots[0][0] == 0.0
        assert history.snapshots[-1][0] == pytest.approx(0.02, abs=cfg.tau)

    def test_progress_callback(self):
        seen = []
        cfg = tiny_config(horizon=0.002, steady_tolerance=0.0)
        run(cfg, progress=lambda k, total: seen.append((k, total)))
        assert seen[0] == (1, 20)
        assert seen[-1] == (20, 20)

    def test_deterministic(self):
        cfg = tiny_config(horizon=0.02)
        a, b = run(cfg), run(cfg)
        np.testing.assert_array_equal(a.energy, b.energy)
        np.testing.assert_array_equal(a.volume, b.volume)
        assert a.outcome == b.outcome

    def test_residual_tracking(self):
        history = run(tiny_config(horizon=0.005, check_residuals=True))
        assert 0 < history.max_scheme_residual <= 1e-9
        assert run(tiny_config(horizon=0.005)).max_scheme_residual == 0.0


class TestOutputs:
    def test_files_and_manifest(self, tmp_path):
        cfg = tiny_config(horizon=0.01, snapshot_times=(0.0, 0.005))
        history = run(cfg)
        written = write_outputs(history, cfg, tmp_path)
        assert (tmp_path / "history.csv") in written
        assert (tmp_path / "manifest.json") in written
        assert (tmp_path / "snapshots" / "profile_0.000000.csv").exists()
        assert (tmp_path / "snapshots" / "profile_0.005000.csv").exists()

        manifest = json.loads((tmp_path / "manifest.json").read_text())
        for key in ("config", "outcome", "final_energy", "final_volume",
                    "initial_volume", "volume_drift_percent", "threshold_radius"):
            assert key in manifest
        assert manifest["config"]["epsilon"] == 0.2
        assert manifest["threshold_radius"] == pytest.approx(0.3766, abs=1e-4)
        assert manifest["initial_volume"] == pytest.approx(
            history.volume[0], rel=1e-15
        )

    def test_history_round_trips_exactly(self, tmp_path):
        cfg = tiny_config(horizon=0.01)
        history = run(cfg)
        write_outputs(history, cfg, tmp_path)
        data = np.genfromtxt(tmp_path / "history.csv", delimiter=",", names=True)
        np.testing.assert_array_equal(data["time"], history.times)
        np.testing.assert_array_equal(data["energy"], history.energy)
        np.testing.assert_array_equal(data["volume"], history.volume)

    def test_snapshot_round_trips_exactly(self, tmp_path):
        cfg = tiny_config(horizon=0.004, snapshot_times=(0.002,))
        history = run(cfg)
        write_outputs(history, cfg, tmp_path)
        t, values, slopes = history.snapshots[0]
        data = np.genfromtxt(
            tmp_path / "snapshots" / f"profile_{t:.6f}.csv",
            delimiter=",", names=True,
        )
        np.testing.assert_array_equal(data["z"], history.nodes)
        np.testing.assert_array_equal(data["r"], values)
        np.testing.assert_array_equal(data["r_z"], slopes)

    def test_empty_history(self, tmp_path):
        cfg = tiny_config()
        history = run(cfg)
        empty = dataclasses.replace(
            history,
            times=np.empty(0), energy=np.empty(0), volume=np.empty(0),
            lambda_bar=np.empty(0), l2_residual=np.empty(0),
            min_radius=np.empty(0), max_slope=np.empty(0), snapshots=[],
        )
        write_outputs(empty, cfg, tmp_path)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert math.isnan(manifest["final_energy"])
        assert math.isnan(manifest["volume_drift_percent"])


class TestCli:
    def test_run_explicit_args(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(cli_main, [
            "run", "--epsilon", "0.2", "--n", "32", "--tau", "1e-4",
            "--horizon", "0.01", "--init", "cosine:0.8,0.1,2",
            "--out", str(tmp_path / "out"),
        ])
        assert result.exit_code == 0, result.output
        assert "outcome:" in result.output
        assert (tmp_path / "out" / "manifest.json").exists()

    def test_run_preset_with_overrides(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(cli_main, [
            "run", "--preset", "exp1", "--n", "16", "--tau", "1e-3",
            "--horizon", "0.05", "--out", str(tmp_path / "out"),
        ])
        assert result.exit_code == 0, result.output
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["config"]["n_intervals"] == 16
        assert any("override" in n for n in manifest["config"]["notes"])

    def test_run_missing_args(self):
        result = CliRunner().invoke(cli_main, ["run", "--out", "unused"])
        assert result.exit_code != 0
        assert "--epsilon" in result.output

    def test_bad_initial_spec(self, tmp_path):
        result = CliRunner().invoke(cli_main, [
            "run", "--epsilon", "0.2", "--n", "16", "--tau", "1e-4",
            "--horizon", "0.01", "--init", "blob:1,2",
            "--out", str(tmp_path),
        ])
        assert result.exit_code != 0
        assert "hermite" in result.output

    def test_run_pinch_exit_code(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(cli_main, [
            "run", "--epsilon", "0.2", "--n", "100", "--tau", "1e-4",
            "--horizon", "3", "--init", "hermite:0.3,0.2",
            "--out", str(tmp_path / "out"),
        ])
        assert result.exit_code == 2, result.output
        assert "pinched at" in result.output
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["outcome"]["kind"] == "Pinched"

    def test_sweep(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(cli_main, [
            "sweep", "--epsilon", "0.2", "--radii", "0.5:0.6:0.1",
            "--perturb", "0.0", "--n", "16", "--tau", "1e-3",
            "--horizon", "0.05", "--out", str(tmp_path / "sweep"),
        ])
        assert result.exit_code == 0, result.output
        summary = (tmp_path / "sweep" / "summary.csv").read_text().splitlines()
        assert summary[0] == "radius,outcome,final_min_radius,threshold_radius"
        assert len(summary) == 3
        assert (tmp_path / "sweep" / "r_0.5000" / "manifest.json").exists()
        assert (tmp_path / "sweep" / "r_0.6000" / "manifest.json").exists()
        assert "threshold radius: 0.3766" in result.output

    def test_check(self):
        result = CliRunner().invoke(cli_main, ["check"])
        assert result.exit_code == 0, result.output
        assert "all checks passed" in result.output
        assert "FAIL" not in result.output
