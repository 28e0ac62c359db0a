"""
参数扫描命令
============

sweep 读取扫描规格 (JSON / YAML)，对 axis 的每个取值与每个求解器配置组成的单元求解一次：
- gamma:      基础模型换用该折扣因子
- alpha:      覆盖求解器的 α (仅影响 iPI)
- population: 按该人口规模重新生成 SIS 模型

规格示例：
    {
      "axis": "gamma",
      "values": [0.1, 0.5],
      "sis": {"population": 200},
      "solvers": [{"method": "pi"}, {"method": "ipi", "inner": "gmres", "alpha": 0.1}]
    }

单元在线程池中并行运行 (上限为 threads 配置)，各自拥有自己的模型与报告；
每个单元的摘要原子写出到 <out>/cell-XXX.summary.json，
汇总 CSV <out>/sweep.csv 按 (取值, 求解器) 的规格顺序排列。单元失败只记录，不中断扫描。
"""

import argparse
import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from apps.bench_cli.commands.common import (
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    output_prefix,
    resolve_solver,
)
from ipi.core.exceptions import IpiError, InvalidSpec
from ipi.core.fileio import atomic_write_text
from ipi.core.settings import InnerMethodName, OuterMethodName, get_settings
from ipi.dp import SolveSummary, TerminatedBy
from ipi.mdp import MdpModel, read_model
from ipi.models import build_sis_mdp, sis_params

logger = logging.getLogger("ipi.cli")

SWEEP_HEADER = (
    "axis",
    "value",
    "solver",
    "wall_time_s",
    "outer_iters",
    "total_inner_iters",
    "terminated_by",
    "final_residual_inf",
    "error",
)


class SweepSolver(BaseModel):
    """扫描中的一个求解器配置"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    method: OuterMethodName
    inner: Optional[InnerMethodName] = None
    alpha: Optional[float] = Field(None, gt=0, lt=1)
    nu: Optional[float] = Field(None, gt=0)
    omega: Optional[float] = Field(None, gt=0, lt=2)
    restart: Optional[int] = Field(None, ge=1)
    opi_w: Optional[int] = Field(None, ge=1)
    label: Optional[str] = None

    def display_name(self, alpha: Optional[float] = None) -> str:
        if self.label:
            return self.label
        if self.method == "opi" and self.opi_w:
            return f"opi(w={self.opi_w})"
        if self.method != "ipi":
            return self.method
        alpha = alpha if alpha is not None else self.alpha
        inner = self.inner or get_settings().solver.inner
        return f"ipi-{inner}" if alpha is None else f"ipi-{inner}(alpha={alpha:g})"

    def overrides(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"label"}, exclude_none=True)


class SweepSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    axis: Literal["gamma", "alpha", "population"]
    values: List[float] = Field(..., min_length=1)
    solvers: List[SweepSolver] = Field(..., min_length=1)
    model: Optional[str] = None
    sis: Optional[Dict[str, Any]] = None
    defaults: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_axis(self) -> "SweepSpec":
        if self.axis == "population":
            if self.model is not None:
                raise ValueError("population 扫描需要 SIS 参数而不是模型文件")
            if any(v < 1 or v != int(v) for v in self.values):
                raise ValueError("population 取值必须为正整数")
        elif (self.model is None) == (self.sis is None):
            raise ValueError("model 与 sis 必须且只能给出一个")
        if self.axis in ("gamma", "alpha") and any(not 0 < v < 1 for v in self.values):
            raise ValueError(f"{self.axis} 取值必须位于 (0, 1) 内")
        return self


def sweep_spec(**values: Any) -> SweepSpec:
    """构造 SweepSpec，非法时抛出 InvalidSpec"""
    try:
        return SweepSpec(**values)
    except ValidationError as e:
        error = e.errors()[0]
        field = ".".join(str(part) for part in error["loc"])
        raise InvalidSpec(f"扫描规格 {field} 非法: {error['msg']}") from e


def load_sweep_spec(path: str) -> SweepSpec:
    source = Path(path)
    with open(source, "r", encoding="utf-8") as f:
        try:
            data = json.load(f) if source.suffix == ".json" else yaml.safe_load(f)
        except (json.JSONDecodeError, yaml.YAMLError, UnicodeDecodeError) as e:
            raise InvalidSpec(f"无法解析扫描规格 {source}: {e}") from e
    if not isinstance(data, dict):
        raise InvalidSpec(f"扫描规格 {source} 必须是对象")
    return sweep_spec(**data)


@dataclass
class SweepCell:
    index: int
    value: float
    solver: SweepSolver


@dataclass
class CellResult:
    cell: SweepCell
    solver_name: str
    summary: Optional[SolveSummary] = None
    error: str = ""

    def row(self, axis: str) -> List[Any]:
        value: Any = int(self.cell.value) if axis == "population" else self.cell.value
        if self.summary is None:
            return [axis, value, self.solver_name, "", "", "", "", "", self.error]
        s = self.summary
        return [
            axis,
            value,
            self.solver_name,
            s.wall_time_s,
            s.outer_iters,
            s.total_inner_iters,
            s.terminated_by.value,
            s.final_residual_inf,
            "",
        ]


def expand_cells(spec: SweepSpec) -> List[SweepCell]:
    """按 (取值, 求解器) 顺序展开扫描单元"""
    cells = []
    for value in spec.values:
        for solver in spec.solvers:
            cells.append(SweepCell(index=len(cells), value=value, solver=solver))
    return cells


class SweepRunner:
    """运行扫描单元；基础模型文件只读取一次，每个单元得到自己的模型"""

    def __init__(self, spec: SweepSpec, out_dir: Path):
        self.spec = spec
        self.out_dir = out_dir
        self._base_model: Optional[MdpModel] = None
        if spec.model is not None:
            self._base_model = read_model(spec.model)

    def cell_model(self, cell: SweepCell) -> MdpModel:
        if self.spec.axis == "population":
            params = sis_params(**{**(self.spec.sis or {}), "population": int(cell.value)})
            return build_sis_mdp(params)
        if self._base_model is not None:
            base = self._base_model
        else:
            base = build_sis_mdp(sis_params(**(self.spec.sis or {})))
        if self.spec.axis == "gamma":
            return base.with_gamma(cell.value)
        return base

    def cell_overrides(self, cell: SweepCell) -> Dict[str, Any]:
        solver = {**self.spec.defaults, **cell.solver.overrides(), "reference": "none"}
        if self.spec.axis == "alpha":
            solver["alpha"] = cell.value
        return {"solver": solver}

    def run_cell(self, cell: SweepCell) -> CellResult:
        alpha = cell.value if self.spec.axis == "alpha" else None
        result = CellResult(cell=cell, solver_name=cell.solver.display_name(alpha))
        try:
            settings = get_settings().with_overrides(self.cell_overrides(cell))
            resolved = resolve_solver(settings)
            report = resolved.run(self.cell_model(cell), None, resolved.config)
            result.summary = report.to_summary()
            path = self.out_dir / f"cell-{cell.index:03d}.summary.json"
            atomic_write_text(path, result.summary.model_dump_json(indent=2) + "\n")
        except (IpiError, ValidationError, OSError) as e:
            result.error = f"{type(e).__name__}: {e}"
            logger.error(
                "扫描单元失败",
                extra={"cell": cell.index, "value": cell.value, "error": result.error},
            )
        return result

    def run(self, workers: int) -> List[CellResult]:
        cells = expand_cells(self.spec)
        workers = max(1, min(workers, len(cells)))
        logger.info(
            "扫描开始",
            extra={"axis": self.spec.axis, "cells": len(cells), "workers": workers},
        )
        if workers == 1:
            return [self.run_cell(cell) for cell in cells]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.run_cell, cells))


def sweep_csv(axis: str, results: List[CellResult]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    writer.writerows(result.row(axis) for result in results)
    return buffer.getvalue()


def worker_count(requested: Optional[int], threads: int) -> int:
    """并行单元数：默认取 threads 配置，显式给出时也不超过它"""
    return max(1, min(requested or threads, threads))


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("sweep", help="按 γ / α / 人口规模扫描求解器矩阵")
    parser.add_argument("spec", type=str, help="扫描规格文件 (.json / .yaml)")
    parser.add_argument("--out", type=str, help="输出目录 (默认 <output_dir>/sweep)")
    parser.add_argument("--workers", type=int, help="并行单元数 (默认且最多取 threads 配置)")
    parser.set_defaults(handler=sweep)


def sweep(args: argparse.Namespace) -> int:
    spec = load_sweep_spec(args.spec)
    out_dir = output_prefix(args.out, "sweep")
    out_dir.mkdir(parents=True, exist_ok=True)
    runner = SweepRunner(spec, out_dir)
    results = runner.run(worker_count(args.workers, get_settings().threads))

    atomic_write_text(out_dir / "sweep.csv", sweep_csv(spec.axis, results))
    failed = sum(1 for r in results if r.summary is None)
    converged = sum(
        1
        for r in results
        if r.summary is not None and r.summary.terminated_by is TerminatedBy.TOLERANCE
    )
    print(json.dumps({"cells": len(results), "converged": converged, "failed": failed}))
    return EXIT_OK if converged == len(results) else EXIT_NOT_CONVERGED
