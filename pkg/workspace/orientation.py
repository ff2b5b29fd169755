"""沿对称轴的方向工作空间扫描与 TI₁/TI₂ 能力指标

三条扫描线:
    z  轴: x = y′ = 0,沿 z 变化
    y′ 轴: 方向 (1/2, √3/2, 0),z = 扫描高度
    x  轴: z = 扫描高度,沿 x 变化
三种转角:
    phi: 绕 z 扭转,rotation_zyx(0, 0, φ)
    tau: 绕 y′ 倾斜,Euler-Rodrigues 旋转换算为欧拉角
    psi: 绕 x 倾斜,rotation_zyx(ψ, 0, 0)
角度单位为度,TI 为 度 × 长度。
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from collector import run_jobs
from errors import InvalidArgumentError, SingularityError
from mechanism.geometry import GeometryParams, euler_from_matrix, rotation_about_axis, rotation_zyx
from mechanism.limits import JointLimits
from mechanism.reachability import DEFAULT_ETA_STEPS, reachable_batch
from workspace.grid import analytic_bound

logger = logging.getLogger(__name__)

Y_PRIME_DIR = np.array([0.5, math.sqrt(3.0) / 2.0, 0.0])
EULER_LIMIT = math.pi / 2 - 1e-9


class ScanAxis(str, Enum):
    Z = "z"
    Y_PRIME = "y'"
    X = "x"


class AngleMode(str, Enum):
    PHI = "phi"
    TAU = "tau"
    PSI = "psi"


@dataclass(frozen=True)
class RegionSample:
    """一个坐标采样点上的可行角度

    angle_min/angle_max 为凸包,空集时为 None;intervals 记录不连通的各段。
    clipped 表示可行区间碰到了扫描角度范围的端点,真实范围可能更宽。
    """

    coordinate: float
    angle_min: Optional[float]
    angle_max: Optional[float]
    intervals: Tuple[Tuple[float, float], ...] = ()
    clipped: bool = False

    @property
    def empty(self) -> bool:
        return self.angle_min is None

    @property
    def width(self) -> float:
        return 0.0 if self.empty else self.angle_max - self.angle_min


@dataclass(eq=False)
class OrientationRegion:
    axis: ScanAxis
    angle_mode: AngleMode
    samples: List[RegionSample]
    coordinate_step: float
    skipped: List[Tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        self.samples = sorted(self.samples, key=lambda s: s.coordinate)

    def coordinates(self) -> Tuple[float, ...]:
        return tuple(s.coordinate for s in self.samples)

    def area(self) -> float:
        """Σ (max − min) × coord_step"""
        return float(sum(s.width for s in self.samples) * self.coordinate_step)

    def clipped_count(self) -> int:
        return sum(1 for s in self.samples if s.clipped)


def default_coord_range(
    g: GeometryParams,
    limits: JointLimits,
    axis: ScanAxis,
    coord_step: float,
    fixed_height: float = 130.0,
    eta_steps: int = DEFAULT_ETA_STEPS,
) -> Tuple[float, float]:
    """扫描坐标范围: 零姿态下扫描线上可达段的首尾

    z 扫描取对称轴上的可达高度范围,y′、x 扫描取 fixed_height 处沿该方向的可达范围。
    扫描线上没有可达点时退回解析外包络。
    """
    radius, z_lo, z_hi = analytic_bound(g, limits)
    if axis == ScanAxis.Z:
        candidates = _inclusive_range(z_lo, z_lo + math.floor((z_hi - z_lo) / coord_step) * coord_step, coord_step)
    else:
        half = math.floor(radius / coord_step) * coord_step
        candidates = _inclusive_range(-half, half, coord_step)

    positions = scan_positions(axis, candidates, fixed_height)
    ok = np.flatnonzero(reachable_batch(g, limits, positions, np.eye(3), eta_steps))
    if ok.size == 0:
        logger.warning(f"⚠️ {axis.value} 扫描线上零姿态不可达,坐标范围退回解析外包络")
        return float(candidates[0]), float(candidates[-1])
    return float(candidates[ok[0]]), float(candidates[ok[-1]])


def _inclusive_range(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0:
        raise InvalidArgumentError(f"步长必须 > 0: {step}")
    if hi < lo:
        raise InvalidArgumentError(f"区间下界大于上界: [{lo}, {hi}]")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def scan_positions(axis: ScanAxis, coords: np.ndarray, fixed_height: float) -> np.ndarray:
    zeros = np.zeros_like(coords)
    if axis == ScanAxis.Z:
        return np.stack([zeros, zeros, coords], axis=1)
    if axis == ScanAxis.Y_PRIME:
        return coords[:, None] * Y_PRIME_DIR[None, :] + np.array([0.0, 0.0, fixed_height])
    return np.stack([coords, zeros, np.full_like(coords, fixed_height)], axis=1)


def mode_rotations(mode: AngleMode, angles_deg: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """每个角度采样对应的旋转矩阵

    Returns:
        (rotations (K, 3, 3), usable (K,)): tau 模式换算欧拉角时 |θ| ≥ π/2 的采样不可用
    """
    rotations = np.zeros((len(angles_deg), 3, 3))
    usable = np.ones(len(angles_deg), dtype=bool)
    for k, angle in enumerate(np.radians(angles_deg)):
        if mode == AngleMode.PHI:
            rotations[k] = rotation_zyx(0.0, 0.0, angle)
        elif mode == AngleMode.PSI:
            rotations[k] = rotation_zyx(angle, 0.0, 0.0)
        else:
            try:
                phi, theta, psi = euler_from_matrix(rotation_about_axis(Y_PRIME_DIR, angle))
            except SingularityError:
                usable[k] = False
                continue
            if abs(theta) >= EULER_LIMIT:
                usable[k] = False
                continue
            rotations[k] = rotation_zyx(phi, theta, psi)
    return rotations, usable


def _runs(angles: np.ndarray, feasible: np.ndarray) -> Tuple[Tuple[float, float], ...]:
    """相邻可行角度连成的区间"""
    runs = []
    start = None
    for k, ok in enumerate(feasible):
        if ok and start is None:
            start = k
        if not ok and start is not None:
            runs.append((float(angles[start]), float(angles[k - 1])))
            start = None
    if start is not None:
        runs.append((float(angles[start]), float(angles[-1])))
    return tuple(runs)


def orientation_scan(
    g: GeometryParams,
    limits: JointLimits,
    axis: ScanAxis,
    angle_mode: AngleMode,
    coord_range: Optional[Tuple[float, float]] = None,
    coord_step: float = 2.0,
    angle_range: Tuple[float, float] = (-90.0, 90.0),
    angle_step: float = 1.0,
    fixed_height: float = 130.0,
    eta_steps: int = DEFAULT_ETA_STEPS,
) -> OrientationRegion:
    """沿一条对称轴扫描一种转角的可行区间

    Args:
        coord_range: 扫描坐标范围,缺省取零姿态可达段 (见 default_coord_range)
        angle_range: 角度范围 (度)
        angle_step: 角度步长 (度)
        fixed_height: y′、x 扫描所在高度

    Returns:
        OrientationRegion,角度单位为度
    """
    axis = ScanAxis(axis)
    angle_mode = AngleMode(angle_mode)
    if coord_step <= 0 or angle_step <= 0:
        raise InvalidArgumentError(f"步长必须 > 0: coord_step={coord_step}, angle_step={angle_step}")
    if coord_range is None:
        coord_range = default_coord_range(g, limits, axis, coord_step, fixed_height, eta_steps)
    coords = _inclusive_range(coord_range[0], coord_range[1], coord_step)
    angles = _inclusive_range(angle_range[0], angle_range[1], angle_step)

    rotations, usable = mode_rotations(angle_mode, angles)
    skipped = [(float(c), float(a)) for c in coords for a in angles[~usable]]
    if skipped:
        logger.warning(f"⚠️ {axis.value}/{angle_mode.value}: {len(skipped)} 个采样欧拉角奇异,已跳过")

    positions = scan_positions(axis, coords, fixed_height)
    good = np.flatnonzero(usable)
    n_c, n_a = len(coords), len(good)
    feasible = np.zeros((n_c, len(angles)), dtype=bool)
    if n_a:
        batch_pos = np.repeat(positions, n_a, axis=0)
        batch_rot = np.tile(rotations[good], (n_c, 1, 1))
        ok = reachable_batch(g, limits, batch_pos, batch_rot, eta_steps)
        feasible[:, good] = ok.reshape(n_c, n_a)

    samples = []
    for c, row in zip(coords, feasible):
        intervals = _runs(angles, row)
        if intervals:
            clipped = bool(row[0] or row[-1])
            samples.append(RegionSample(float(c), intervals[0][0], intervals[-1][1], intervals, clipped))
        else:
            samples.append(RegionSample(float(c), None, None))
    n_clipped = sum(1 for s in samples if s.clipped)
    if n_clipped:
        logger.warning(
            f"⚠️ {axis.value}/{angle_mode.value}: {n_clipped} 个采样的可行角度碰到扫描范围 "
            f"[{angle_range[0]}, {angle_range[1]}] 端点,面积是下界"
        )
    return OrientationRegion(axis=axis, angle_mode=angle_mode, samples=samples, coordinate_step=coord_step, skipped=skipped)


def scan_all(
    g: GeometryParams,
    limits: JointLimits,
    coord_step: float = 2.0,
    angle_range: Tuple[float, float] = (-90.0, 90.0),
    angle_step: float = 1.0,
    fixed_height: float = 130.0,
    eta_steps: int = DEFAULT_ETA_STEPS,
    workers: int = 1,
    axes: Sequence[ScanAxis] = tuple(ScanAxis),
    modes: Sequence[AngleMode] = tuple(AngleMode),
) -> List[OrientationRegion]:
    """并发执行 轴 × 转角 的全部扫描"""
    jobs = []
    for axis in axes:
        for mode in modes:
            key = (ScanAxis(axis).value, AngleMode(mode).value)
            jobs.append((key, orientation_scan, (g, limits, axis, mode, None, coord_step, angle_range, angle_step, fixed_height, eta_steps)))
    data = run_jobs(jobs, workers)
    if data["errors"]:
        raise RuntimeError(f"方向扫描失败: {data['errors']}")
    return [data["results"][key] for key, _, _ in jobs]


def capability_indices(regions: Sequence[OrientationRegion]) -> Tuple[float, float]:
    """扭转能力指标 TI₁ 与倾斜能力指标 TI₂

    Raises:
        InvalidArgumentError: 缺少 轴 × 转角 组合,或同一轴的采样网格不一致
    """
    by_key: Dict[Tuple[ScanAxis, AngleMode], OrientationRegion] = {}
    for region in regions:
        key = (ScanAxis(region.axis), AngleMode(region.angle_mode))
        if key in by_key:
            raise InvalidArgumentError(f"重复的扫描区域: {key}")
        by_key[key] = region
    missing = [(a, m) for a in ScanAxis for m in AngleMode if (a, m) not in by_key]
    if missing:
        raise InvalidArgumentError(f"缺少扫描区域: {[(a.value, m.value) for a, m in missing]}")

    for axis in ScanAxis:
        reference = by_key[(axis, AngleMode.PHI)]
        for mode in (AngleMode.TAU, AngleMode.PSI):
            other = by_key[(axis, mode)]
            if other.coordinate_step != reference.coordinate_step or other.coordinates() != reference.coordinates():
                raise InvalidArgumentError(f"{axis.value} 轴上各转角的采样网格不一致")

    area = {key: region.area() for key, region in by_key.items()}
    ti1 = sum(area[(axis, AngleMode.PHI)] for axis in ScanAxis) / 3.0
    ti2 = sum(area[(axis, mode)] for axis in ScanAxis for mode in (AngleMode.TAU, AngleMode.PSI)) / 6.0
    return ti1, ti2
