"""可达性判定: 消解每组滑台的冗余 (d_i, η_i)

对固定的 η,‖B − D(d)‖² 是 d 的首一二次多项式,
满足 l_lo ≤ l ≤ l_hi 的 d 集合可由闭式求根得到 (至多两段区间),
因此只需对 η 做网格扫描。
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from mechanism.geometry import (
    LEG_SIGNS,
    CarriageState,
    GeometryParams,
    Pose,
    leg_lengths,
    platform_frame_points,
    platform_points,
    rot_z,
)
from mechanism.limits import JointLimits

logger = logging.getLogger(__name__)

DEFAULT_ETA_STEPS = 61
FEASIBILITY_TOL = 1e-9
BATCH_CHUNK = 4096

__all__ = [
    "DEFAULT_ETA_STEPS",
    "FeasibilityResult",
    "JointLimits",
    "brute_force_reachable",
    "eta_grid",
    "feasible_d_intervals",
    "group_feasible",
    "pose_reachable",
    "reachable_batch",
]


@dataclass(frozen=True, eq=False)
class FeasibilityResult:
    """位姿可达性结果

    短路后未检查的组在 per_group 中记为 False。
    """

    reachable: bool
    witness: Optional[CarriageState]
    per_group: Tuple[bool, bool, bool]


def eta_grid(limits: JointLimits, eta_steps: int) -> np.ndarray:
    """η 均匀网格,按离行程中心由近到远排序"""
    if eta_steps < 2:
        raise ValueError(f"eta_steps 必须 ≥ 2: {eta_steps}")
    etas = np.linspace(limits.eta_lo, limits.eta_hi, eta_steps)
    order = np.argsort(np.abs(etas - limits.eta_center), kind="stable")
    return etas[order]


def _leg_pieces(Be, Bn, B_sq, sign, g, limits):
    """单根支链的可行 d 集合 [lo1, hi1] ∪ [lo2, hi2]

    Be, Bn 为 B 在滑台径向/切向单位向量上的投影,形状 (N, K)。
    """
    b_half = g.b / 2.0
    base = Be * Be + sign * g.b * Bn - B_sq - b_half * b_half
    center = g.r - Be
    disc_hi = base + limits.l_hi ** 2
    disc_lo = base + limits.l_lo ** 2
    root_hi = np.sqrt(np.maximum(disc_hi, 0.0))
    root_lo = np.sqrt(np.clip(disc_lo, 0.0, None))
    root_lo = np.minimum(root_lo, root_hi)
    valid = disc_hi >= -2.0 * limits.l_hi * FEASIBILITY_TOL
    return (center - root_hi, center - root_lo), (center + root_lo, center + root_hi), valid


def _group_core(g: GeometryParams, limits: JointLimits, B_group: np.ndarray, group: int, etas: np.ndarray):
    """一组两根支链在全部 η 采样上的可行性

    Args:
        B_group: 形状 (N, 2, 3)
        etas: 形状 (K,)

    Returns:
        (ok, d_mid): 形状 (N, K) 的可行标记和对应的区间中点
    """
    varpi = etas + g.gamma[group]
    e = np.stack([np.cos(varpi), np.sin(varpi), np.zeros_like(varpi)], axis=1)
    n = np.stack([-np.sin(varpi), np.cos(varpi), np.zeros_like(varpi)], axis=1)

    pieces = []
    valid = None
    for j, sign in enumerate(LEG_SIGNS):
        B = B_group[:, j, :]
        Be = B @ e.T
        Bn = B @ n.T
        B_sq = np.einsum("nc,nc->n", B, B)[:, None]
        first, second, leg_valid = _leg_pieces(Be, Bn, B_sq, sign, g, limits)
        pieces.append((first, second))
        valid = leg_valid if valid is None else valid & leg_valid

    shape = valid.shape
    ok = np.zeros(shape, dtype=bool)
    d_mid = np.full(shape, np.nan)
    for piece_a in pieces[0]:
        for piece_b in pieces[1]:
            lo = np.maximum(np.maximum(piece_a[0], piece_b[0]), limits.d_lo)
            hi = np.minimum(np.minimum(piece_a[1], piece_b[1]), limits.d_hi)
            hit = valid & (lo <= hi + FEASIBILITY_TOL) & ~ok
            mid = np.clip(0.5 * (lo + hi), limits.d_lo, limits.d_hi)
            d_mid = np.where(hit, mid, d_mid)
            ok |= hit
    return ok, d_mid


def feasible_d_intervals(g: GeometryParams, limits: JointLimits, B1: np.ndarray, B2: np.ndarray, group: int, eta: float):
    """给定 η 时一组的可行 d 区间 (已与 [d_lo, d_hi] 求交)

    Returns:
        区间列表 [(lo, hi), ...],按 lo 升序
    """
    B_group = np.stack([np.asarray(B1, float), np.asarray(B2, float)])[None]
    varpi = eta + g.gamma[group]
    e = np.array([[math.cos(varpi), math.sin(varpi), 0.0]])
    n = np.array([[-math.sin(varpi), math.cos(varpi), 0.0]])
    legs = []
    for j, sign in enumerate(LEG_SIGNS):
        B = B_group[:, j, :]
        first, second, valid = _leg_pieces(B @ e.T, B @ n.T, np.sum(B * B)[None, None], sign, g, limits)
        if not valid[0, 0]:
            return []
        legs.append([(float(first[0][0, 0]), float(first[1][0, 0])), (float(second[0][0, 0]), float(second[1][0, 0]))])
    intervals = []
    for lo_a, hi_a in legs[0]:
        for lo_b, hi_b in legs[1]:
            lo = max(lo_a, lo_b, limits.d_lo)
            hi = min(hi_a, hi_b, limits.d_hi)
            if lo <= hi + FEASIBILITY_TOL:
                intervals.append((lo, max(lo, hi)))
    return sorted(set(intervals))


def group_feasible(
    g: GeometryParams,
    limits: JointLimits,
    B1: np.ndarray,
    B2: np.ndarray,
    group: int,
    eta_steps: int = DEFAULT_ETA_STEPS,
) -> Tuple[bool, Optional[Tuple[float, float]]]:
    """单组滑台可行性

    Args:
        B1, B2: 该组两个动平台铰点 (定坐标系)
        group: 组号 0..2
        eta_steps: η 采样数

    Returns:
        (feasible, (d, eta) 或 None),见证取离行程中心最近的可行 η
    """
    etas = eta_grid(limits, eta_steps)
    B_group = np.stack([np.asarray(B1, float), np.asarray(B2, float)])[None]
    ok, d_mid = _group_core(g, limits, B_group, group, etas)
    hits = np.flatnonzero(ok[0])
    if hits.size == 0:
        return False, None
    k = hits[0]
    return True, (float(d_mid[0, k]), float(etas[k]))


def pose_reachable(
    g: GeometryParams,
    limits: JointLimits,
    pose: Pose,
    eta_steps: int = DEFAULT_ETA_STEPS,
) -> FeasibilityResult:
    """位姿是否可达: 存在满足全部行程的滑台状态即可达"""
    B = platform_points(g, pose)
    per_group = [False, False, False]
    d = np.zeros(3)
    eta = np.zeros(3)
    for i in range(3):
        feasible, witness = group_feasible(g, limits, B[i, 0], B[i, 1], i, eta_steps)
        if not feasible:
            return FeasibilityResult(reachable=False, witness=None, per_group=tuple(per_group))
        per_group[i] = True
        d[i], eta[i] = witness
    return FeasibilityResult(reachable=True, witness=CarriageState(d=d, eta=eta), per_group=tuple(per_group))


def reachable_batch(
    g: GeometryParams,
    limits: JointLimits,
    positions: np.ndarray,
    rotations: np.ndarray,
    eta_steps: int = DEFAULT_ETA_STEPS,
) -> np.ndarray:
    """批量可达性 (无见证)

    Args:
        positions: 形状 (N, 3)
        rotations: 公共姿态 (3, 3) 或逐点姿态 (N, 3, 3)

    Returns:
        形状 (N,) 的布尔数组
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 3)
    rotations = np.asarray(rotations, dtype=float)
    u_bar = platform_frame_points(g)
    etas = eta_grid(limits, eta_steps)
    active = np.ones(len(positions), dtype=bool)

    for i in range(3):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        for start in range(0, idx.size, BATCH_CHUNK):
            chunk = idx[start:start + BATCH_CHUNK]
            if rotations.ndim == 2:
                offsets = (u_bar[i] @ rotations.T)[None]
            else:
                offsets = np.einsum("nab,jb->nja", rotations[chunk], u_bar[i])
            B_group = positions[chunk, None, :] + offsets
            ok, _ = _group_core(g, limits, B_group, i, etas)
            active[chunk] = ok.any(axis=1)
    return active


def brute_force_reachable(
    g: GeometryParams,
    limits: JointLimits,
    pose: Pose,
    d_steps: int = 101,
    eta_steps: int = 101,
) -> bool:
    """穷举 (d_i, η_i) 网格的可达性判定,用作测试基准"""
    if d_steps < 2 or eta_steps < 2:
        raise ValueError("网格步数必须 ≥ 2")
    B = platform_points(g, pose)
    ds = np.linspace(limits.d_lo, limits.d_hi, d_steps)
    etas = np.linspace(limits.eta_lo, limits.eta_hi, eta_steps)
    for i in range(3):
        group_ok = np.ones((d_steps, eta_steps), dtype=bool)
        for j, sign in enumerate(LEG_SIGNS):
            local = np.stack([g.r - ds, np.full(d_steps, sign * g.b / 2.0), np.zeros(d_steps)], axis=1)
            D = np.stack([local @ rot_z(eta + g.gamma[i]).T for eta in etas], axis=1)
            lengths = np.linalg.norm(B[i, j] - D, axis=-1)
            group_ok &= (lengths >= limits.l_lo - FEASIBILITY_TOL) & (lengths <= limits.l_hi + FEASIBILITY_TOL)
        if not group_ok.any():
            return False
    return True


def witness_is_sound(g: GeometryParams, limits: JointLimits, pose: Pose, result: FeasibilityResult, tol: float = 1e-9) -> bool:
    """用 leg_lengths 复核见证"""
    if result.witness is None:
        return not result.reachable
    lengths = leg_lengths(g, pose, result.witness, limits)
    return lengths.admissible(limits, tol)
