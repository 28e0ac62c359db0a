"""
MDP 文件读写
============

支持两种格式：
- JSON: {"n", "m", "gamma", "transitions": [{"action": a, "triplets": [[i, j, p], ...]}], "costs"}
  索引从 0 开始，三元组顺序任意，同一动作内 (i, j) 重复视为错误
- .npz: 压缩二进制格式，按动作保存 CSR 的 data / indices / indptr，适合 N=10⁴ 量级的模型

写 JSON 时非零元个数超过上限会抛出 TooLarge，提示改用 .npz。
"""

import json
import logging
import zipfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import scipy.sparse as sp

from ipi.core.exceptions import IpiError, ModelValidationError, TooLarge
from ipi.core.fileio import atomic_write_text
from ipi.core.settings import get_settings
from ipi.mdp.model import MdpModel, build_model

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def model_to_dict(model: MdpModel) -> Dict[str, Any]:
    """把模型转换为 JSON 兼容字典，三元组按 (i, j) 排序"""
    transitions: List[Dict[str, Any]] = []
    for a, P in enumerate(model.transitions):
        coo = P.tocoo()
        order = np.lexsort((coo.col, coo.row))
        triplets = [
            [int(i), int(j), float(p)]
            for i, j, p in zip(coo.row[order], coo.col[order], coo.data[order])
        ]
        transitions.append({"action": a, "triplets": triplets})
    return {
        "n": model.n,
        "m": model.m,
        "gamma": model.gamma,
        "transitions": transitions,
        "costs": model.costs.tolist(),
    }


def model_from_dict(data: Dict[str, Any]) -> MdpModel:
    """从 JSON 字典构建并校验模型"""
    try:
        n, m, gamma = data["n"], data["m"], data["gamma"]
        quads = [
            (i, block["action"], j, p)
            for block in data["transitions"]
            for i, j, p in block["triplets"]
        ]
        costs = data["costs"]
    except (KeyError, TypeError, ValueError) as e:
        raise ModelValidationError(f"MDP JSON 结构非法: {e}") from e
    return build_model(n, m, gamma, quads, costs)


def _write_json(path: Path, model: MdpModel, max_json_nonzeros: int) -> None:
    if model.nnz > max_json_nonzeros:
        raise TooLarge(
            f"模型共有 {model.nnz} 个非零元，超过 JSON 上限 {max_json_nonzeros}，请改用 .npz"
        )
    atomic_write_text(path, json.dumps(model_to_dict(model), separators=(",", ":")))


def _write_npz(path: Path, model: MdpModel) -> None:
    arrays: Dict[str, Any] = {
        "shape": np.array([model.n, model.m]),
        "gamma": np.array(model.gamma),
        "costs": model.costs,
    }
    for a, P in enumerate(model.transitions):
        arrays[f"data_{a}"] = P.data
        arrays[f"indices_{a}"] = P.indices
        arrays[f"indptr_{a}"] = P.indptr
    with open(path, "wb") as f:
        np.savez_compressed(f, **arrays)


def _read_npz(path: Path) -> MdpModel:
    try:
        loaded = np.load(path)
        if not isinstance(loaded, np.lib.npyio.NpzFile):
            raise ModelValidationError(f"{path} 不是 .npz 归档")
        with loaded as archive:
            n, m = (int(v) for v in archive["shape"])
            matrices = [
                sp.csr_matrix(
                    (archive[f"data_{a}"], archive[f"indices_{a}"], archive[f"indptr_{a}"]),
                    shape=(n, n),
                )
                for a in range(m)
            ]
            return MdpModel.from_matrices(matrices, archive["costs"], float(archive["gamma"]))
    except IpiError:
        raise
    except (zipfile.BadZipFile, KeyError, ValueError, TypeError, EOFError) as e:
        raise ModelValidationError(f"无法解析 MDP npz 文件 {path}: {e}") from e


def write_model(
    path: PathLike, model: MdpModel, max_json_nonzeros: Optional[int] = None
) -> Path:
    """按后缀 (.json / .npz) 写出模型"""
    target = Path(path)
    if target.suffix == ".npz":
        _write_npz(target, model)
    else:
        limit = (
            get_settings().io.max_json_nonzeros if max_json_nonzeros is None else max_json_nonzeros
        )
        _write_json(target, model, limit)
    logger.info(
        "模型已写出",
        extra={"path": str(target), "n": model.n, "m": model.m, "nnz": model.nnz},
    )
    return target


def read_model(path: PathLike) -> MdpModel:
    """按后缀 (.json / .npz) 读取并校验模型"""
    source = Path(path)
    if source.suffix == ".npz":
        model = _read_npz(source)
    else:
        with open(source, "r", encoding="utf-8") as f:
            try:
                data = json.load(f)
            except (json.JSONDecodeError, UnicodeDecodeError) as e:
                raise ModelValidationError(f"无法解析 MDP JSON 文件 {source}: {e}") from e
        model = model_from_dict(data)
    logger.debug("模型已读取", extra={"path": str(source), "n": model.n, "m": model.m})
    return model


__all__ = ["read_model", "write_model", "model_to_dict", "model_from_dict"]
