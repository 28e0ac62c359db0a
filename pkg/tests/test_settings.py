"""分层配置测试：字段默认值、YAML 层、环境变量与命令行覆盖"""

import pytest
from pydantic import ValidationError

from ipi.core.settings import Settings, get_settings, load_yaml_layers


@pytest.fixture
def config_dir(isolated_settings, monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    (isolated_settings / "default.yaml").write_text(
        "solver:\n  tol: 1.0e-7\n  inner: jacobi\nio:\n  output_dir: out\n",
        encoding="utf-8",
    )
    (isolated_settings / "benchmark.yaml").write_text(
        "solver:\n  tol: 1.0e-8\n  max_inner_iters: 300\n", encoding="utf-8"
    )
    return isolated_settings


class TestSettings:
    def test_field_defaults(self, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)

        settings = Settings()

        assert settings.solver.method == "ipi"
        assert settings.solver.inner == "gmres"
        assert settings.solver.tol == 1e-8
        assert settings.solver.time_budget_s == 500.0
        assert settings.threads >= 1

    def test_default_yaml_layer(self, config_dir):
        settings = Settings()

        assert settings.solver.tol == 1e-7
        assert settings.solver.inner == "jacobi"
        assert settings.io.output_dir == "out"

    def test_environment_layer_overrides_default(self, config_dir, monkeypatch):
        monkeypatch.setenv("IPI_ENV", "benchmark")

        settings = Settings()

        assert settings.solver.tol == 1e-8
        assert settings.solver.max_inner_iters == 300
        assert settings.solver.inner == "jacobi"

    def test_environment_variables_win(self, config_dir, monkeypatch):
        monkeypatch.setenv("IPI_SOLVER__TOL", "1e-6")
        monkeypatch.setenv("IPI_THREADS", "3")

        settings = Settings()

        assert settings.solver.tol == 1e-6
        assert settings.solver.inner == "jacobi"
        assert settings.threads == 3

    def test_with_overrides_merges_deeply(self, config_dir):
        settings = Settings().with_overrides({"solver": {"method": "pi", "alpha": 0.3}})

        assert settings.solver.method == "pi"
        assert settings.solver.alpha == 0.3
        assert settings.solver.tol == 1e-7

    def test_invalid_override(self, config_dir):
        with pytest.raises(ValidationError):
            Settings().with_overrides({"solver": {"alpha": 1.5}})

    def test_get_settings_is_cached(self, config_dir):
        assert get_settings() is get_settings()

    def test_missing_layers_are_skipped(self, tmp_path):
        assert load_yaml_layers(tmp_path, "benchmark") == {}
