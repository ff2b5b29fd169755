"""参数扫描: 单参数曲线、(a, d_s) 曲面、构型对比与趋势判定"""
import logging
import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from collector import run_jobs
from errors import InvalidArgumentError
from mechanism.geometry import GeometryParams
from mechanism.limits import JointLimits
from workspace.grid import COMPLETE_THRESHOLD, GridSpec, sample_position_workspace
from workspace.orientation import capability_indices
from workspace.report import Resolution, grid_metrics, scan_regions

logger = logging.getLogger(__name__)

SWEEP_SCHEMA = "ppr-workspace/sweep@1"

SWEEPABLE = ("a", "d_s", "eta_s", "l_s")
TABLE_RANGE = (10.0, 100.0)
GRID_METRICS = ("volume", "boundary_completeness", "cavity_fraction", "coverage_area", "vertical_range")
ORIENTATION_METRICS = ("TI1", "TI2")
METRICS = GRID_METRICS + ORIENTATION_METRICS
SURFACE_FRACTION = 0.95


class Trend(str, Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    RISE_THEN_FALL = "rise-then-fall"
    RISE_THEN_PLATEAU = "rise-then-plateau"
    OTHER = "non-monotonic-other"


@dataclass(frozen=True)
class ParameterRange:
    """闭区间 [lo, hi],步长 step;eta_s 以度计"""

    name: str
    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise InvalidArgumentError(f"不可扫描的参数: {self.name}")
        if self.step <= 0:
            raise InvalidArgumentError(f"{self.name}: 步长必须 > 0")
        if self.lo > self.hi:
            raise InvalidArgumentError(f"{self.name}: 下界 {self.lo} 大于上界 {self.hi}")
        if self.lo < TABLE_RANGE[0] or self.hi > TABLE_RANGE[1]:
            raise InvalidArgumentError(f"{self.name}: 区间 [{self.lo}, {self.hi}] 超出 {list(TABLE_RANGE)}")

    def values(self) -> List[float]:
        n = int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return [round(self.lo + k * self.step, 9) for k in range(n)]


@dataclass(frozen=True)
class SweepSpec:
    parameters: Tuple[ParameterRange, ...]
    base: GeometryParams
    metrics: Tuple[str, ...] = ("volume",)
    resolution: Resolution = Resolution(spacing=2.5)

    def __post_init__(self):
        if not 1 <= len(self.parameters) <= 2:
            raise InvalidArgumentError("扫描参数必须是一个或两个")
        names = [p.name for p in self.parameters]
        if len(set(names)) != len(names):
            raise InvalidArgumentError(f"扫描参数重复: {names}")
        unknown = [m for m in self.metrics if m not in METRICS]
        if unknown or not self.metrics:
            raise InvalidArgumentError(f"未知指标: {unknown}")

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(p.name for p in self.parameters)

    def points(self) -> List[Tuple[float, ...]]:
        """参数网格,按字典序"""
        grids = [p.values() for p in self.parameters]
        if len(grids) == 1:
            return [(v,) for v in grids[0]]
        return [(u, v) for u in grids[0] for v in grids[1]]


@dataclass
class SweepRow:
    values: Tuple[float, ...]
    metrics: Dict[str, float] = field(default_factory=dict)
    runtime: float = 0.0
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: List[SweepRow]
    verdicts: Dict[str, str] = field(default_factory=dict)
    argmax: Optional[Tuple[float, ...]] = None
    region_mask: List[bool] = field(default_factory=list)
    schema: str = SWEEP_SCHEMA

    def column(self, metric: str) -> List[float]:
        return [row.metrics[metric] for row in self.rows if row.ok and metric in row.metrics]

    def summary(self) -> Dict[str, Any]:
        return {
            "schema": self.schema,
            "parameters": list(self.spec.names),
            "metrics": list(self.spec.metrics),
            "verdicts": dict(self.verdicts),
            "argmax": list(self.argmax) if self.argmax is not None else None,
            "region_95": [list(row.values) for row, hit in zip(self.rows, self.region_mask) if hit],
            "failed_rows": [{"values": list(row.values), "error": row.error} for row in self.rows if not row.ok],
        }


def evaluate_configuration(g: GeometryParams, metrics: Sequence[str], resolution: Resolution) -> Dict[str, float]:
    """在一个构型上计算所需指标

    行程限制总是由该构型自身推出,扫描时不叠加覆盖值。
    """
    limits = JointLimits.from_geometry(g)
    values: Dict[str, float] = {}
    if any(m in GRID_METRICS for m in metrics):
        gridv = sample_position_workspace(
            g,
            limits,
            grid_spec=GridSpec(spacing=resolution.spacing, floor=resolution.base_clearance),
            eta_steps=resolution.eta_steps,
            voxel_budget=resolution.voxel_budget,
        )
        computed = grid_metrics(gridv, resolution.azimuth_bins)
        values.update({m: float(computed[m]) for m in GRID_METRICS if m in metrics})
    if any(m in ORIENTATION_METRICS for m in metrics):
        ti1, ti2 = capability_indices(scan_regions(g, limits, resolution))
        if "TI1" in metrics:
            values["TI1"] = ti1
        if "TI2" in metrics:
            values["TI2"] = ti2
    return values


def _timed_row(
    evaluator: Callable,
    base: GeometryParams,
    changes: Sequence[Tuple[str, float]],
    metrics: Sequence[str],
    resolution: Resolution,
):
    """构造构型并评估;非法构型在这里抛错,只影响本行"""
    start = time.perf_counter()
    g = base
    for name, value in changes:
        g = g.with_parameter(name, value)
    values = evaluator(g, metrics, resolution)
    return values, time.perf_counter() - start


def _median3(values: Sequence[float]) -> List[float]:
    smoothed = list(values)
    for k in range(1, len(values) - 1):
        smoothed[k] = float(np.median(values[k - 1:k + 2]))
    return smoothed


def classify_trend(values: Sequence[float], plateau_tol: float = 0.02, noise_tol: float = 0.01) -> Trend:
    """由有序数值判断趋势

    先做 3 点中值平滑;末尾连续落在终值 plateau_tol × 值域 之内的样本
    超过 25% 且此前有上升时判为 rise-then-plateau;
    否则按相邻差分符号 (|差分| ≤ noise_tol × 值域 视为平) 的变化模式判定。

    Raises:
        InvalidArgumentError: 少于 4 个值
    """
    if len(values) < 4:
        raise InvalidArgumentError(f"趋势判定至少需要 4 个值: {len(values)}")
    v = _median3([float(x) for x in values])
    span = max(v) - min(v)
    if span <= 0:
        return Trend.OTHER

    diffs = np.diff(v)
    signs = [0 if abs(d) <= noise_tol * span else (1 if d > 0 else -1) for d in diffs]

    run = 1
    for x in reversed(v[:-1]):
        if abs(x - v[-1]) > plateau_tol * span:
            break
        run += 1
    head = signs[: len(v) - run]
    if run > 0.25 * len(v) and 1 in head and -1 not in head:
        return Trend.RISE_THEN_PLATEAU

    pattern = []
    for s in signs:
        if s != 0 and (not pattern or pattern[-1] != s):
            pattern.append(s)
    if pattern == [1]:
        return Trend.INCREASING
    if pattern == [-1]:
        return Trend.DECREASING
    if pattern == [1, -1]:
        return Trend.RISE_THEN_FALL
    return Trend.OTHER


def run_sweep(spec: SweepSpec, workers: int = 1, evaluator: Callable = evaluate_configuration) -> SweepResult:
    """在参数网格上逐点评估指标

    单行失败只记录在该行;单参数扫描对每个指标给出趋势判定。
    """
    points = spec.points()
    jobs = []
    for point in points:
        changes = tuple(zip(spec.names, point))
        jobs.append((point, _timed_row, (evaluator, spec.base, changes, spec.metrics, spec.resolution)))

    logger.info(f"📊 参数扫描 {spec.names}: 共 {len(jobs)} 个构型")
    data = run_jobs(jobs, workers)

    rows = []
    for point in points:
        if point in data["results"]:
            values, runtime = data["results"][point]
            rows.append(SweepRow(values=point, metrics=values, runtime=runtime))
        else:
            rows.append(SweepRow(values=point, error=data["errors"].get(point, "unknown error")))
    rows.sort(key=lambda row: row.values)

    result = SweepResult(spec=spec, rows=rows)
    if len(spec.parameters) == 1:
        for metric in spec.metrics:
            column = result.column(metric)
            if len(column) >= 4:
                result.verdicts[metric] = classify_trend(column).value
    failed = sum(1 for row in rows if not row.ok)
    if failed:
        logger.warning(f"⚠️ {failed} 行评估失败")
    logger.info(f"✅ 参数扫描完成: {len(rows) - failed}/{len(rows)}")
    return result


def run_surface(spec: SweepSpec, workers: int = 1, evaluator: Callable = evaluate_configuration) -> SweepResult:
    """双参数曲面,附带最大值所在格点与 95% 区域"""
    if len(spec.parameters) != 2:
        raise InvalidArgumentError("曲面扫描需要两个参数")
    result = run_sweep(spec, workers, evaluator)
    metric = spec.metrics[0]
    scored = [(row.metrics[metric], row.values) for row in result.rows if row.ok and metric in row.metrics]
    if not scored:
        return result
    best = max(value for value, _ in scored)
    result.argmax = next(values for value, values in scored if value == best)
    threshold = SURFACE_FRACTION * best if best >= 0 else best / SURFACE_FRACTION
    result.region_mask = [
        bool(row.ok and metric in row.metrics and row.metrics[metric] >= threshold) for row in result.rows
    ]
    return result


def compare_configurations(
    base: GeometryParams,
    variants: Mapping[str, Mapping[str, float]],
    metrics: Sequence[str] = ("volume", "boundary_completeness", "cavity_fraction", "TI1", "TI2"),
    resolution: Resolution = Resolution(spacing=2.5),
    workers: int = 1,
    evaluator: Callable = evaluate_configuration,
) -> List[Dict[str, Any]]:
    """命名构型对比,每个构型只改动少数参数

    Returns:
        每个构型一行: name、参数改动、指标、complete 判定或 error
    """
    jobs = []
    for name, changes in variants.items():
        jobs.append((name, _timed_row, (evaluator, base, tuple(changes.items()), tuple(metrics), resolution)))
    data = run_jobs(jobs, workers)

    rows = []
    for name, changes in variants.items():
        row: Dict[str, Any] = {"name": name, "changes": dict(changes)}
        if name in data["results"]:
            values, runtime = data["results"][name]
            row["metrics"] = values
            row["runtime"] = runtime
            if "boundary_completeness" in values:
                row["complete"] = values["boundary_completeness"] >= COMPLETE_THRESHOLD
        else:
            row["error"] = data["errors"].get(name, "unknown error")
        rows.append(row)
    return rows


def spec_with_fixed(spec: SweepSpec, **overrides: float) -> SweepSpec:
    """把 base 中若干参数固定为给定值 (eta_s 以度计)"""
    base = spec.base
    for name, value in overrides.items():
        base = base.with_parameter(name, value)
    return replace(spec, base=base)
