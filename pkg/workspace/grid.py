"""体素化位置工作空间及其指标: 体积、边界完整度、空腔比例"""
import logging
import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from collector import run_jobs
from errors import BudgetError, ConfigError, InvalidArgumentError, UndefinedMetricError
from mechanism.geometry import GeometryParams, Pose
from mechanism.limits import JointLimits
from mechanism.reachability import DEFAULT_ETA_STEPS, reachable_batch

logger = logging.getLogger(__name__)

COMPLETE_THRESHOLD = 0.99
SLICES_PER_JOB = 4


class VoxelLabel(IntEnum):
    UNREACHABLE = 0
    REACHABLE = 1
    CAVITY = 2


@dataclass(frozen=True)
class GridSpec:
    """体素网格设置,origin/dims 缺省时自动覆盖解析外包络

    floor 为动平台中心离基座平面的最小高度,低于它的位置不计入工作空间。
    """

    spacing: float = 2.0
    origin: Optional[Tuple[float, float, float]] = None
    dims: Optional[Tuple[int, int, int]] = None
    floor: float = 0.0


@dataclass(eq=False)
class VoxelGrid:
    """规则三维体素网格

    origin 是下标 (0, 0, 0) 体素的中心,labels 形状为 dims。
    sealed_floor 为真时最底层是基座 (或离地间隙) 平面,空腔泛洪不从底面进入。
    """

    origin: np.ndarray
    spacing: float
    dims: Tuple[int, int, int]
    labels: np.ndarray = field(repr=False)
    sealed_floor: bool = False

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=float).reshape(3)
        self.dims = tuple(int(n) for n in self.dims)
        if self.spacing <= 0:
            raise InvalidArgumentError(f"spacing 必须 > 0: {self.spacing}")
        if any(n < 2 for n in self.dims):
            raise InvalidArgumentError(f"每个维度至少 2 个体素: {self.dims}")
        if self.labels.shape != self.dims:
            raise InvalidArgumentError(f"labels 形状 {self.labels.shape} 与 dims {self.dims} 不一致")

    @classmethod
    def empty(cls, origin, spacing: float, dims, sealed_floor: bool = False) -> "VoxelGrid":
        dims = tuple(int(n) for n in dims)
        return cls(origin=origin, spacing=spacing, dims=dims, labels=np.zeros(dims, dtype=np.int8), sealed_floor=sealed_floor)

    def axis_centers(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.spacing * np.arange(self.dims[axis])

    def centers(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """体素中心坐标,ij 索引"""
        return np.meshgrid(self.axis_centers(0), self.axis_centers(1), self.axis_centers(2), indexing="ij")

    @property
    def reachable(self) -> np.ndarray:
        return self.labels == VoxelLabel.REACHABLE

    def count(self, label: VoxelLabel) -> int:
        return int(np.count_nonzero(self.labels == label))

    def descriptor(self) -> Dict[str, Any]:
        return {
            "origin": [float(v) for v in self.origin],
            "spacing": float(self.spacing),
            "dims": list(self.dims),
            "sealed_floor": self.sealed_floor,
        }


def analytic_bound(g: GeometryParams, limits: JointLimits) -> Tuple[float, float, float]:
    """动平台中心位置的解析外包络 (radius, z_lo, z_hi)

    六个铰点相对中心的偏移之和为零,总有一根支链的偏移背离外推方向,
    所以中心水平距离不超过滑台点最大半径加 l_hi;z 同理不超过 l_hi。
    """
    max_radial = max(abs(g.r - limits.d_lo), abs(g.r - limits.d_hi))
    radius = math.hypot(max_radial, g.b / 2.0) + limits.l_hi
    return radius, 0.0, limits.l_hi


def resolve_grid(g: GeometryParams, limits: JointLimits, spec: GridSpec) -> VoxelGrid:
    """按 spec 生成空网格并检查是否覆盖解析外包络

    自动网格的最底层落在 max(0, floor) 上并视为封闭的基座平面。

    Raises:
        ConfigError: 网格过小,或 floor 高于外包络顶部
    """
    s = float(spec.spacing)
    if s <= 0:
        raise ConfigError(f"spacing 必须 > 0: {s}", field="resolution.spacing")
    radius, z_lo, z_hi = analytic_bound(g, limits)
    if spec.floor >= z_hi:
        raise ConfigError(f"离地间隙 {spec.floor} 不低于外包络顶部 {z_hi:.6g}", field="resolution.base_clearance")
    z_lo = max(z_lo, float(spec.floor))
    tol = 1e-9

    if spec.origin is None or spec.dims is None:
        half = int(math.ceil(radius / s))
        n_z = int(math.ceil((z_hi - z_lo) / s)) + 1
        return VoxelGrid.empty(
            (-half * s, -half * s, z_lo), s, (2 * half + 1, 2 * half + 1, max(n_z, 2)), sealed_floor=True
        )

    origin = np.asarray(spec.origin, dtype=float)
    dims = np.asarray(spec.dims, dtype=int)
    top = origin + (dims - 1) * s
    covered = (
        origin[0] <= -radius + tol
        and origin[1] <= -radius + tol
        and origin[2] <= z_lo + tol
        and top[0] >= radius - tol
        and top[1] >= radius - tol
        and top[2] >= z_hi - tol
    )
    if not covered:
        raise ConfigError(
            f"网格 [{origin.tolist()} .. {top.tolist()}] 未覆盖外包络 (半径 {radius:.6g}, z ∈ [{z_lo:.6g}, {z_hi:.6g}])",
            field="grid",
        )
    return VoxelGrid.empty(origin, s, tuple(dims), sealed_floor=abs(origin[2] - z_lo) <= tol)


def label_slab(
    g: GeometryParams,
    limits: JointLimits,
    rotation: np.ndarray,
    origin: np.ndarray,
    spacing: float,
    dims: Tuple[int, int, int],
    z_indices: Sequence[int],
    eta_steps: int,
    floor: float = 0.0,
) -> np.ndarray:
    """计算若干 z 层的可达标记,低于 floor 的层全部不可达

    Returns:
        形状 (nx, ny, len(z_indices)) 的布尔数组
    """
    radius, _, _ = analytic_bound(g, limits)
    xs = origin[0] + spacing * np.arange(dims[0])
    ys = origin[1] + spacing * np.arange(dims[1])
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    inside = X * X + Y * Y <= (radius + 1e-9) ** 2
    out = np.zeros((dims[0], dims[1], len(z_indices)), dtype=bool)
    flat_x = X[inside]
    flat_y = Y[inside]
    for k, z_index in enumerate(z_indices):
        z = origin[2] + spacing * z_index
        if z < floor - 1e-9:
            continue
        positions = np.stack([flat_x, flat_y, np.full(flat_x.shape, z)], axis=1)
        layer = np.zeros((dims[0], dims[1]), dtype=bool)
        layer[inside] = reachable_batch(g, limits, positions, rotation, eta_steps)
        out[:, :, k] = layer
    return out


def sample_position_workspace(
    g: GeometryParams,
    limits: JointLimits,
    orientation: Tuple[float, float, float] = (0.0, 0.0, 0.0),
    grid_spec: Optional[GridSpec] = None,
    eta_steps: int = DEFAULT_ETA_STEPS,
    workers: int = 1,
    voxel_budget: Optional[int] = None,
) -> VoxelGrid:
    """固定姿态下的位置工作空间体素化

    Args:
        orientation: 固定欧拉角 (φ, θ, ψ),弧度
        grid_spec: 网格设置
        workers: 并行进程数,结果与进程数无关
        voxel_budget: 体素数上限

    Returns:
        标记好的 VoxelGrid

    Raises:
        ConfigError: 网格未覆盖外包络
        BudgetError: 体素数超过预算
    """
    spec = grid_spec or GridSpec()
    grid = resolve_grid(g, limits, spec)
    total = int(np.prod(grid.dims))
    if voxel_budget is not None and total > voxel_budget:
        raise BudgetError(f"体素数 {total} 超过预算 {voxel_budget}")

    rotation = Pose(np.zeros(3), orientation).rotation
    n_z = grid.dims[2]
    jobs = []
    for start in range(0, n_z, SLICES_PER_JOB):
        z_indices = list(range(start, min(start + SLICES_PER_JOB, n_z)))
        jobs.append(
            (start, label_slab, (g, limits, rotation, grid.origin, grid.spacing, grid.dims, z_indices, eta_steps, spec.floor))
        )

    logger.info(f"📊 体素化位置工作空间: dims={grid.dims}, spacing={grid.spacing}, 共 {total} 个体素")
    data = run_jobs(jobs, workers)
    if data["errors"]:
        raise RuntimeError(f"体素标记失败: {data['errors']}")

    for start, slab in data["results"].items():
        grid.labels[:, :, start:start + slab.shape[2]] = np.where(slab, VoxelLabel.REACHABLE, VoxelLabel.UNREACHABLE)
    logger.info(f"✅ 可达体素 {grid.count(VoxelLabel.REACHABLE)} 个")
    return grid


def volume(gridv: VoxelGrid) -> float:
    """可达体素数 × spacing³"""
    return gridv.count(VoxelLabel.REACHABLE) * gridv.spacing ** 3


def cavity_fraction(gridv: VoxelGrid) -> float:
    """空腔比例 cavity / (cavity + reachable)

    从网格边界出发 6-连通泛洪不可达体素,剩下的不可达体素即为空腔,
    并就地改写标签。sealed_floor 网格的底面不作为泛洪起点。
    """
    unreachable = gridv.labels != VoxelLabel.REACHABLE
    structure = ndimage.generate_binary_structure(3, 1)
    components, _ = ndimage.label(unreachable, structure=structure)

    faces = [
        components[0], components[-1],
        components[:, 0], components[:, -1],
        components[:, :, -1],
    ]
    if not gridv.sealed_floor:
        faces.append(components[:, :, 0])
    faces = np.concatenate([face.ravel() for face in faces])
    exterior_ids = np.unique(faces[faces > 0])
    cavity = unreachable & ~np.isin(components, exterior_ids)

    gridv.labels[unreachable] = VoxelLabel.UNREACHABLE
    gridv.labels[cavity] = VoxelLabel.CAVITY

    n_cavity = int(np.count_nonzero(cavity))
    n_reachable = gridv.count(VoxelLabel.REACHABLE)
    if n_cavity + n_reachable == 0:
        return 0.0
    return n_cavity / (n_cavity + n_reachable)


def slice_coverage(gridv: VoxelGrid, k: int, azimuth_bins: int) -> Optional[float]:
    """第 k 层可达体素占据的方位角分箱比例,空层返回 None"""
    layer = gridv.reachable[:, :, k]
    if not layer.any():
        return None
    ii, jj = np.nonzero(layer)
    x = gridv.origin[0] + gridv.spacing * ii
    y = gridv.origin[1] + gridv.spacing * jj
    off_axis = np.hypot(x, y) >= gridv.spacing / 2.0
    if not off_axis.any():
        return 0.0
    azimuth = np.mod(np.arctan2(y[off_axis], x[off_axis]), 2.0 * math.pi)
    bins = np.minimum((azimuth / (2.0 * math.pi) * azimuth_bins).astype(int), azimuth_bins - 1)
    return len(np.unique(bins)) / azimuth_bins


def vertical_range(gridv: VoxelGrid) -> Optional[Tuple[float, float]]:
    """可达体素的 z 范围"""
    layers = np.flatnonzero(gridv.reachable.any(axis=(0, 1)))
    if layers.size == 0:
        return None
    zs = gridv.axis_centers(2)
    return float(zs[layers[0]]), float(zs[layers[-1]])


def default_z_band(gridv: VoxelGrid) -> Optional[Tuple[float, float]]:
    """可达 z 范围的中间 80%"""
    span = vertical_range(gridv)
    if span is None:
        return None
    z_min, z_max = span
    margin = 0.1 * (z_max - z_min)
    return z_min + margin, z_max - margin


def boundary_completeness(gridv: VoxelGrid, z_band: Optional[Tuple[float, float]] = None, azimuth_bins: int = 72) -> float:
    """边界完整度: z 区间内各层方位角覆盖率的最小值

    Args:
        z_band: (z_lo, z_hi),缺省取可达 z 范围的中间 80%
        azimuth_bins: 方位角分箱数 (≥ 8)

    Raises:
        UndefinedMetricError: 区间内没有含可达体素的层
    """
    if azimuth_bins < 8:
        raise InvalidArgumentError(f"azimuth_bins 必须 ≥ 8: {azimuth_bins}")
    band = z_band if z_band is not None else default_z_band(gridv)
    if band is None:
        raise UndefinedMetricError("网格中没有可达体素")
    zs = gridv.axis_centers(2)
    tol = 1e-9 * gridv.spacing
    coverages = []
    for k in np.flatnonzero((zs >= band[0] - tol) & (zs <= band[1] + tol)):
        coverage = slice_coverage(gridv, int(k), azimuth_bins)
        if coverage is not None:
            coverages.append(coverage)
    if not coverages:
        raise UndefinedMetricError(f"z 区间 {band} 内没有可达体素")
    return float(min(coverages))


def horizontal_coverage(gridv: VoxelGrid) -> float:
    """俯视投影面积"""
    return int(np.count_nonzero(gridv.reachable.any(axis=2))) * gridv.spacing ** 2
