"""Tests for the configuration layer and the per-run CLI configuration."""

import json
import math
from pathlib import Path

import pytest

from csqs_lab.cli.run_config import build_run_config
from csqs_lab.core.config import (
    ConfigManager,
    current_config,
    current_tolerances,
    get_config_manager,
    set_config_manager,
)
from csqs_lab.core.config_models import GridConfig, LabConfig, Tolerances
from csqs_lab.core.config_sources import (
    ConfigPriority,
    EnvironmentConfigSource,
    FileConfigSource,
    deep_merge,
)
from csqs_lab.core.exceptions import (
    ConfigSourceError,
    ConfigValidationError,
    UsageError,
)


class TestDefaults:
    def test_lab_defaults(self):
        config = LabConfig()
        assert config.tolerances.eps_tail == 1e-12
        assert config.tolerances.eps_grid == 1e-3
        assert (config.grid.half_width, config.grid.points) == (6.0, 401)
        assert config.oracle.wigner_headroom == 16
        assert config.threads is None

    def test_even_points_rejected(self):
        with pytest.raises(ValueError):
            GridConfig(points=400)

    def test_tolerances_are_frozen(self):
        with pytest.raises(ValueError):
            Tolerances().eps_tail = 1e-6

    def test_current_tolerances(self):
        explicit = Tolerances(eps_tail=1e-9)
        assert current_tolerances(explicit) is explicit
        assert current_tolerances() == Tolerances()


class TestFileSources:
    @pytest.mark.parametrize(
        "name, text",
        [
            ("lab.yaml", "grid:\n  points: 201\ntolerances:\n  eps_grid: 0.002\n"),
            ("lab.json", json.dumps({"grid": {"points": 201}, "tolerances": {"eps_grid": 0.002}})),
            ("lab.toml", "[grid]\npoints = 201\n[tolerances]\neps_grid = 0.002\n"),
        ],
    )
    def test_formats(self, tmp_path, name, text):
        path = tmp_path / name
        path.write_text(text)
        config = ConfigManager(path, use_environment=False).get_config()
        assert config.grid.points == 201
        assert config.tolerances.eps_grid == 0.002
        assert config.grid.half_width == 6.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigSourceError) as excinfo:
            ConfigManager(tmp_path / "absent.yaml")
        assert excinfo.value.code == "config_missing"
        assert excinfo.value.exit_code == 2

    def test_unsupported_suffix(self, tmp_path):
        with pytest.raises(ConfigSourceError) as excinfo:
            FileConfigSource(tmp_path / "lab.ini")
        assert excinfo.value.code == "config_format"

    def test_unparsable(self, tmp_path):
        path = tmp_path / "lab.json"
        path.write_text("{not json")
        with pytest.raises(ConfigSourceError) as excinfo:
            ConfigManager(path, use_environment=False)
        assert excinfo.value.code == "config_parse"

    def test_invalid_value(self, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text("tolerances:\n  eps_tail: -1\n")
        with pytest.raises(ConfigValidationError):
            ConfigManager(path, use_environment=False)

    def test_file_data_keeps_run_keys(self, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text("alpha: 0.5\nt: 0.0\n")
        manager = ConfigManager(path, use_environment=False)
        assert manager.file_data() == {"alpha": 0.5, "t": 0.0}
        assert manager.raw["alpha"] == 0.5


class TestEnvironment:
    def test_nested_override(self, monkeypatch, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text("grid:\n  points: 201\n")
        monkeypatch.setenv("CSQS_LAB_GRID__POINTS", "101")
        monkeypatch.setenv("CSQS_LAB_THREADS", "2")
        config = ConfigManager(path).get_config()
        assert config.grid.points == 101
        assert config.threads == 2

    def test_scalar_parsing(self, monkeypatch):
        monkeypatch.setenv("CSQS_LAB_FLAG", "yes")
        monkeypatch.setenv("CSQS_LAB_RATIO", "0.25")
        data = EnvironmentConfigSource().load()
        assert data["flag"] is True
        assert data["ratio"] == 0.25

    def test_overrides_win(self, monkeypatch):
        monkeypatch.setenv("CSQS_LAB_GRID__POINTS", "101")
        manager = ConfigManager(overrides={"grid": {"points": 51}})
        assert manager.get_config().grid.points == 51

    def test_priorities(self):
        assert ConfigPriority.FILE.value < ConfigPriority.ENVIRONMENT.value < ConfigPriority.RUNTIME.value


class TestManager:
    def test_deep_merge(self):
        base = {"grid": {"points": 401, "half_width": 6.0}, "threads": 1}
        merged = deep_merge(base, {"grid": {"points": 201}})
        assert merged == {"grid": {"points": 201, "half_width": 6.0}, "threads": 1}
        assert base["grid"]["points"] == 401

    def test_reload(self, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text("grid:\n  points: 201\n")
        manager = ConfigManager(path, use_environment=False)
        path.write_text("grid:\n  points: 301\n")
        assert manager.reload().grid.points == 301

    def test_global_manager_switches_on_new_path(self, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text("threads: 3\n")
        set_config_manager(None)
        first = get_config_manager()
        assert get_config_manager() is first
        switched = get_config_manager(path)
        assert switched is not first
        assert current_config().threads == 3


class TestRunConfig:
    def test_flags_beat_file(self):
        run = build_run_config("wigner", {"alpha": 1.0, "t": None}, {"alpha": 0.5, "t": 0.0})
        assert run.alpha == 1.0
        assert run.t == 0.0

    def test_weight_flag_replaces_file_weight(self):
        run = build_run_config("wigner", {"r": 0.6}, {"alpha": 0.5, "t": 0.0})
        assert run.t is None
        assert run.state_params().t == pytest.approx(0.8)

    @pytest.mark.parametrize("flags", [{}, {"t": 0.6, "r": 0.8}])
    def test_exactly_one_weight(self, flags):
        with pytest.raises(UsageError) as excinfo:
            build_run_config("measures", {"alpha": 1.0, **flags})
        assert excinfo.value.exit_code == 2

    def test_sweep_needs_no_weight(self):
        run = build_run_config("sweep", {})
        assert run.r_values == [0.25, 0.5, 0.75, 1.0]

    def test_even_points(self):
        with pytest.raises(UsageError):
            build_run_config("wigner", {"t": 1.0, "alpha": 0.5, "points": 100})

    def test_negative_branch(self):
        run = build_run_config("wigner", {"alpha": 0.5, "r": 0.6, "t_negative": True})
        assert run.state_params().t == pytest.approx(-0.8)

    def test_describe_loss(self):
        run = build_run_config("loss", {"alpha": 1.5, "t": 1.0, "kappa_t": 0.5})
        meta = run.describe()
        assert meta["kappa_t"] == 0.5
        assert meta["T"] == pytest.approx(1 - math.exp(-1.0))

    def test_grid_override(self):
        run = build_run_config("wigner", {"alpha": 2.5, "t": 1.0, "half_width": 4.0, "points": 81})
        grid = run.grid()
        assert (grid.x_min, grid.x_max, grid.nx) == (-1.5, 6.5, 81)

    def test_output_path(self):
        run = build_run_config("wigner", {"alpha": 0.5, "t": 1.0, "output": "w.json"})
        assert run.output == Path("w.json")
