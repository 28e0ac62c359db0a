"""共享测试夹具：E1 两状态模型、恒等链、带种子的随机模型、隔离的配置环境"""

import os
from typing import Callable

import numpy as np
import pytest

from ipi.core.settings import get_settings
from ipi.mdp import MdpModel, model_from_dense
from ipi.models import generate_random_model, random_mdp_spec

SWAP = [[0.0, 1.0], [1.0, 0.0]]


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path_factory):
    """每个测试使用空的配置目录，避免读取仓库内的 YAML 与 .env"""
    for key in list(os.environ):
        if key.startswith("IPI_"):
            monkeypatch.delenv(key, raising=False)
    config_dir = tmp_path_factory.mktemp("config")
    monkeypatch.setenv("IPI_CONFIG_DIR", str(config_dir))
    get_settings.cache_clear()
    yield config_dir
    get_settings.cache_clear()


@pytest.fixture
def e1_model() -> MdpModel:
    """动作 0: P = I, g = [0, 2]；动作 1: P = 交换, g = [1, 1]；γ = 0.5。V* = [0, 1]，π* = (0, 1)"""
    P = np.array([np.eye(2), SWAP])
    g = np.array([[0.0, 1.0], [2.0, 1.0]])
    return model_from_dense(P, g, 0.5)


@pytest.fixture
def identity_chain() -> MdpModel:
    """单动作 P = I，g = [1, 2]，γ = 0.5，V^π = [2, 4]"""
    return model_from_dense(np.eye(2)[None], [[1.0], [2.0]], 0.5)


@pytest.fixture
def random_model() -> Callable[..., MdpModel]:
    def factory(
        n: int = 20,
        m: int = 3,
        gamma: float = 0.9,
        density: float = 1.0,
        seed: int = 0,
        ensure_regular: bool = False,
    ) -> MdpModel:
        spec = random_mdp_spec(
            n=n,
            m=m,
            gamma=gamma,
            density=density,
            seed=seed,
            ensure_regular=ensure_regular,
        )
        return generate_random_model(spec)

    return factory
