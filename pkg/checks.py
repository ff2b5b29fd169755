"""自检: 快速不变量检查

每项检查返回 CheckResult,任意一项失败时命令行以非零退出码结束。
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
from scipy.spatial.transform import Rotation

from errors import LimitViolationError, PprError
from mechanism.diff_kin import carriage_rate_basis, jacobians
from mechanism.geometry import (
    MECHANISM_COUNTS,
    CarriageState,
    GeometryParams,
    Pose,
    carriage_points,
    euler_from_matrix,
    is_rotation,
    leg_lengths,
    mobility,
    rotation_about_axis,
    rotation_zyx,
)
from mechanism.limits import JointLimits
from mechanism.reachability import brute_force_reachable, pose_reachable, witness_is_sound
from workspace.grid import analytic_bound

logger = logging.getLogger(__name__)

FD_STEP = 1e-5
FD_REL_TOL = 1e-6
ORACLE_ETA_STEPS = 201
ORACLE_GRID_STEPS = 101
EXPECTED_MOBILITY = 12

# 有限差分时不校验行程
UNBOUNDED = JointLimits(0.0, math.inf, -math.inf, math.inf, -math.inf, math.inf)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    value: Optional[float] = None


def _random_euler(rng: np.random.Generator, max_angle: float) -> tuple:
    return tuple(float(v) for v in rng.uniform(-max_angle, max_angle, 3))


def _random_carriage(rng: np.random.Generator, limits: JointLimits) -> CarriageState:
    return CarriageState(d=rng.uniform(limits.d_lo, limits.d_hi, 3), eta=rng.uniform(limits.eta_lo, limits.eta_hi, 3))


def _random_pose(rng: np.random.Generator, g: GeometryParams, limits: JointLimits) -> Pose:
    """一半位姿取在工作空间中部,一半取在整个外包络内"""
    radius, z_lo, z_hi = analytic_bound(g, limits)
    angles = _random_euler(rng, math.radians(15.0))
    if rng.random() < 0.5:
        rho, z = 0.3 * radius, (0.6 * z_lo + 0.4 * z_hi, z_hi)
    else:
        rho, z = radius, (z_lo, z_hi)
    x, y = rng.uniform(-rho, rho, 2)
    return Pose.at(x, y, rng.uniform(*z), *angles)


def check_rotations(n: int, rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        phi, theta, psi = _random_euler(rng, math.pi / 2 - 1e-3)
        R = rotation_zyx(phi, theta, psi)
        reference = Rotation.from_euler("ZYX", [psi, theta, phi]).as_matrix()
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        tau = float(rng.uniform(-math.pi, math.pi))
        Q = rotation_about_axis(axis, tau)
        if not (is_rotation(R) and is_rotation(Q)):
            return CheckResult("rotation", False, f"非正交矩阵: Θ=({phi:.6g}, {theta:.6g}, {psi:.6g})")
        back = rotation_zyx(*euler_from_matrix(R))
        worst = max(
            worst,
            float(np.max(np.abs(R - reference))),
            float(np.max(np.abs(Q - Rotation.from_rotvec(axis * tau).as_matrix()))),
            float(np.max(np.abs(back - R))),
        )
    return CheckResult("rotation", worst < 1e-9, f"{n} 组, 最大偏差 {worst:.3g}")


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1.0))


def check_rate_basis(g: GeometryParams, limits: JointLimits, n: int, rng: np.random.Generator) -> CheckResult:
    """h、t 与 D 对 d、η 的中心差分一致"""
    worst = 0.0
    for _ in range(n):
        c = _random_carriage(rng, limits)
        i, j = int(rng.integers(3)), int(rng.integers(2))
        h, t = carriage_rate_basis(g, c, (i, j))
        step = np.zeros(3)
        step[i] = FD_STEP
        d_plus = carriage_points(g, CarriageState(c.d + step, c.eta), UNBOUNDED)[i, j]
        d_minus = carriage_points(g, CarriageState(c.d - step, c.eta), UNBOUNDED)[i, j]
        e_plus = carriage_points(g, CarriageState(c.d, c.eta + step), UNBOUNDED)[i, j]
        e_minus = carriage_points(g, CarriageState(c.d, c.eta - step), UNBOUNDED)[i, j]
        worst = max(
            worst,
            _relative((d_plus - d_minus) / (2 * FD_STEP), h),
            _relative((e_plus - e_minus) / (2 * FD_STEP), t),
        )
    return CheckResult("carriage_rate_basis", worst < FD_REL_TOL, f"{n} 组, 最大相对误差 {worst:.3g}")


def check_rate_identity(g: GeometryParams, limits: JointLimits, n: int, rng: np.random.Generator) -> CheckResult:
    """Jx·ẋ = Jq·q̇,l̇ 由中心差分得到"""
    worst = 0.0
    evaluated = 0
    for _ in range(n):
        pose = Pose.at(*rng.uniform(-30.0, 30.0, 2), rng.uniform(110.0, 150.0), *_random_euler(rng, math.radians(20.0)))
        c = _random_carriage(rng, limits)
        try:
            bundle = jacobians(g, pose, c)
        except PprError as e:
            logger.debug(f"跳过奇异构型: {e}")
            continue
        x_dot = rng.normal(size=6)
        c_dot = rng.normal(size=6)

        def lengths_at(eps: float) -> np.ndarray:
            moved = Pose(pose.position + eps * x_dot[:3], tuple(np.add(pose.theta, eps * x_dot[3:])))
            carriage = CarriageState(c.d + eps * c_dot[:3], c.eta + eps * c_dot[3:])
            return leg_lengths(g, moved, carriage, UNBOUNDED).as_vector()

        l_dot = (lengths_at(FD_STEP) - lengths_at(-FD_STEP)) / (2 * FD_STEP)
        q_dot = np.concatenate([l_dot, c_dot])
        worst = max(worst, _relative(bundle.Jx @ x_dot, bundle.Jq @ q_dot))
        evaluated += 1
    passed = evaluated > 0 and worst < FD_REL_TOL
    return CheckResult("rate_identity", passed, f"{evaluated}/{n} 组, 最大相对误差 {worst:.3g}")


def check_reachability(
    g: GeometryParams,
    limits: JointLimits,
    n: int,
    rng: np.random.Generator,
    reach_fn: Optional[Callable] = None,
) -> CheckResult:
    """解析判定与穷举网格对比

    穷举网格的 η 采样是解析判定 η 网格的子集,所以穷举可达必然解析可达;
    解析可达的见证还要经 leg_lengths 复核。
    """
    reach_fn = reach_fn or pose_reachable
    agree = 0
    missed = 0
    unsound = 0
    for _ in range(n):
        pose = _random_pose(rng, g, limits)
        result = reach_fn(g, limits, pose, ORACLE_ETA_STEPS)
        oracle = brute_force_reachable(g, limits, pose, ORACLE_GRID_STEPS, ORACLE_GRID_STEPS)
        agree += int(result.reachable == oracle)
        missed += int(oracle and not result.reachable)
        try:
            sound = witness_is_sound(g, limits, pose, result)
        except LimitViolationError:
            sound = False
        unsound += int(not sound)
    passed = missed == 0 and unsound == 0
    return CheckResult(
        "reachability",
        passed,
        f"{n} 个位姿, 一致率 {agree / n:.2%}, 漏判 {missed}, 见证不成立 {unsound}",
        value=agree / n,
    )


def check_mobility() -> CheckResult:
    m = mobility(*MECHANISM_COUNTS)
    return CheckResult("mobility", m == EXPECTED_MOBILITY, f"M = {m}")


def run_checks(
    g: GeometryParams,
    limits: JointLimits,
    n_poses: int = 500,
    seed: int = 0,
    reach_fn: Optional[Callable] = None,
) -> List[CheckResult]:
    """运行全部检查

    Args:
        n_poses: 可达性对比的随机位姿数
        seed: 随机种子
        reach_fn: 替换可达性判定 (仅用于故障注入测试)

    Returns:
        CheckResult 列表
    """
    rng = np.random.default_rng(seed)
    results = [
        check_rotations(200, rng),
        check_rate_basis(g, limits, 200, rng),
        check_rate_identity(g, limits, 200, rng),
        check_reachability(g, limits, n_poses, rng, reach_fn),
        check_mobility(),
    ]
    for result in results:
        if result.passed:
            logger.info(f"✅ {result.name}: {result.detail}")
        else:
            logger.error(f"❌ {result.name}: {result.detail}")
    return results
