"""参考分析流水线: 位置工作空间 + 指标 + 九组方向扫描 + TI"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import pendulum

from errors import PprError, UndefinedMetricError
from mechanism.diff_kin import condition_number, jacobians
from mechanism.geometry import GeometryParams, Pose
from mechanism.limits import JointLimits
from mechanism.reachability import DEFAULT_ETA_STEPS, pose_reachable
from workspace.grid import (
    COMPLETE_THRESHOLD,
    GridSpec,
    VoxelGrid,
    VoxelLabel,
    boundary_completeness,
    cavity_fraction,
    horizontal_coverage,
    sample_position_workspace,
    vertical_range,
    volume,
)
from workspace.orientation import OrientationRegion, capability_indices, scan_all

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "ppr-workspace/report@1"


@dataclass(frozen=True)
class Resolution:
    """离散化设置,角度单位为度

    base_clearance 是位置工作空间的离地间隙: 动平台中心须高出基座平面这么多。
    """

    spacing: float = 2.0
    angle_step: float = 1.0
    angle_min: float = -90.0
    angle_max: float = 90.0
    eta_steps: int = DEFAULT_ETA_STEPS
    coord_step: float = 2.0
    scan_height: float = 130.0
    voxel_budget: int = 20_000_000
    azimuth_bins: int = 72
    base_clearance: float = 50.0


@dataclass
class WorkspaceReport:
    volume: float
    boundary_completeness: float
    cavity_fraction: float
    TI1: float
    TI2: float
    voxel_count_reachable: int
    grid_descriptor: Dict[str, Any]
    coverage_area: float = 0.0
    z_span: Optional[Tuple[float, float]] = None
    dexterity: Optional[float] = None
    complete: bool = False
    skipped_samples: int = 0
    clipped_samples: int = 0
    geometry: Dict[str, float] = field(default_factory=dict)
    schema: str = REPORT_SCHEMA
    generated_at: str = ""

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["z_span"] = list(self.z_span) if self.z_span else None
        return data


def geometry_dict(g: GeometryParams) -> Dict[str, float]:
    """几何参数,eta_s 以角度给出"""
    return {
        "a": g.a,
        "b": g.b,
        "r": g.r,
        "l_min": g.l_min,
        "l_s": g.l_s,
        "d_s": g.d_s,
        "eta_s_deg": g.eta_s_deg,
    }


def dexterity_at(g: GeometryParams, limits: JointLimits, pose: Pose, eta_steps: int = DEFAULT_ETA_STEPS) -> Optional[float]:
    """可达位姿上齐次化 Jacobian 的条件数

    用 pose_reachable 的见证滑台状态;不可达或奇异时返回 None。
    """
    result = pose_reachable(g, limits, pose, eta_steps)
    if not result.reachable:
        logger.warning(f"⚠️ 灵巧度位姿不可达: {pose}")
        return None
    try:
        return condition_number(jacobians(g, pose, result.witness))
    except ArithmeticError as e:
        logger.warning(f"⚠️ 灵巧度计算失败: {e}")
        return None


def grid_metrics(gridv: VoxelGrid, azimuth_bins: int = 72) -> Dict[str, Any]:
    """位置工作空间的全部标量指标 (就地标记空腔)"""
    try:
        completeness = boundary_completeness(gridv, azimuth_bins=azimuth_bins)
    except UndefinedMetricError as e:
        logger.warning(f"⚠️ 边界完整度无定义: {e}")
        completeness = 0.0
    cavity = cavity_fraction(gridv)
    span = vertical_range(gridv)
    return {
        "volume": volume(gridv),
        "boundary_completeness": completeness,
        "cavity_fraction": cavity,
        "coverage_area": horizontal_coverage(gridv),
        "z_span": span,
        "vertical_range": (span[1] - span[0]) if span else 0.0,
        "voxel_count_reachable": gridv.count(VoxelLabel.REACHABLE),
    }


def scan_regions(g: GeometryParams, limits: JointLimits, resolution: Resolution, workers: int = 1) -> List[OrientationRegion]:
    return scan_all(
        g,
        limits,
        coord_step=resolution.coord_step,
        angle_range=(resolution.angle_min, resolution.angle_max),
        angle_step=resolution.angle_step,
        fixed_height=resolution.scan_height,
        eta_steps=resolution.eta_steps,
        workers=workers,
    )


def analyze_workspace(
    g: GeometryParams,
    limits: JointLimits,
    resolution: Resolution = Resolution(),
    workers: int = 1,
    orientation: Tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> Tuple[WorkspaceReport, VoxelGrid, List[OrientationRegion]]:
    """完整的参考分析

    Returns:
        (report, 标记后的网格, 九个方向扫描区域)
    """
    gridv = sample_position_workspace(
        g,
        limits,
        orientation=orientation,
        grid_spec=GridSpec(spacing=resolution.spacing, floor=resolution.base_clearance),
        eta_steps=resolution.eta_steps,
        workers=workers,
        voxel_budget=resolution.voxel_budget,
    )
    metrics = grid_metrics(gridv, resolution.azimuth_bins)

    logger.info("📊 方向工作空间扫描中...")
    regions = scan_regions(g, limits, resolution, workers)
    ti1, ti2 = capability_indices(regions)

    dexterity = None
    try:
        dexterity = dexterity_at(g, limits, Pose.at(0.0, 0.0, resolution.scan_height), resolution.eta_steps)
    except PprError as e:
        logger.warning(f"⚠️ 灵巧度计算失败: {e}")
    if dexterity is not None and not math.isfinite(dexterity):
        dexterity = None

    report = WorkspaceReport(
        volume=metrics["volume"],
        boundary_completeness=metrics["boundary_completeness"],
        cavity_fraction=metrics["cavity_fraction"],
        TI1=ti1,
        TI2=ti2,
        voxel_count_reachable=metrics["voxel_count_reachable"],
        grid_descriptor=gridv.descriptor(),
        coverage_area=metrics["coverage_area"],
        z_span=metrics["z_span"],
        dexterity=dexterity,
        complete=metrics["boundary_completeness"] >= COMPLETE_THRESHOLD,
        skipped_samples=sum(len(r.skipped) for r in regions),
        clipped_samples=sum(r.clipped_count() for r in regions),
        geometry=geometry_dict(g),
        generated_at=pendulum.now("UTC").to_iso8601_string(),
    )
    logger.info(f"✅ V = {report.volume:.6g}, TI₁ = {ti1:.6g}, TI₂ = {ti2:.6g}")
    return report, gridv, regions
