"""依赖注入容器测试"""

from ipi.container import create_container
from ipi.core.settings import Settings
from ipi.dp import OuterConfig, inexact_pi, policy_iteration
from ipi.solvers import Gmres, Sor


class TestSolverContainer:
    def test_defaults_select_ipi_with_gmres(self, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        container = create_container(Settings(threads=2))

        config = container.outer_config()

        assert container.outer_solver() is inexact_pi
        assert isinstance(config, OuterConfig)
        assert config.inner_method.kind == "gmres"
        assert config.workers == 2
        assert isinstance(container.inner_solver(), Gmres)

    def test_overrides_flow_into_providers(self, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        settings = Settings().with_overrides(
            {"solver": {"method": "pi", "inner": "sor", "omega": 1.3, "tol": 1e-6, "opi_w": 7}}
        )
        container = create_container(settings)

        config = container.outer_config()
        inner = container.inner_solver()

        assert container.outer_solver() is policy_iteration
        assert config.tol == 1e-6
        assert config.opi_w == 7
        assert isinstance(inner, Sor)
        assert inner.label == "sor(omega=1.3)"

    def test_configured_solver_runs(self, e1_model, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        container = create_container(Settings().with_overrides({"solver": {"method": "vi"}}))

        report = container.outer_solver()(e1_model, None, container.outer_config())

        assert report.solver == "vi"
        assert report.converged
