"""速度级运动学: 滑台点速度基、Jacobian、量纲齐次化与条件数"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from errors import DegenerateConfigurationError, SingularityError
from mechanism.geometry import (
    LEG_SIGNS,
    CarriageState,
    GeometryParams,
    Pose,
    carriage_points,
    platform_points,
    rot_z,
)

logger = logging.getLogger(__name__)

SINGULAR_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class JacobianBundle:
    """某一构型下的 Jacobian 集合

    Jx (6×6) 与 Jq (6×12) 满足 Jx·ẋ = Jq·q̇,
    ẋ = [Ṗ_o, Θ̇],q̇ = [l̇ (6), ḋ (3), η̇ (3)]。
    Jh 为 Jx 后三列除以 L 的齐次化矩阵,J = Jh⁻¹·Jq。
    """

    Jx: np.ndarray
    Jq: np.ndarray
    Jh: np.ndarray
    J: np.ndarray
    legs_unit: np.ndarray
    R2: np.ndarray
    L: float = 1.0

    def twist(self, q_dot: np.ndarray) -> np.ndarray:
        """由 q̇ 求 ẋ = [Ṗ_o, Θ̇] (去掉齐次化缩放)"""
        x_h = self.J @ np.asarray(q_dot, dtype=float)
        return np.concatenate([x_h[:3], x_h[3:] / self.L])


def skew(v: np.ndarray) -> np.ndarray:
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


def euler_rate_map(theta: Tuple[float, float, float]) -> np.ndarray:
    """ω = R₂·Θ̇,对应 R_z(ψ)R_y(θ)R_x(φ) 的角速度映射

    列依次为 φ̇、θ̇、ψ̇ 的贡献。
    """
    _, t, p = theta
    ct, st = math.cos(t), math.sin(t)
    cp, sp = math.cos(p), math.sin(p)
    return np.array([[cp * ct, -sp, 0.0], [sp * ct, cp, 0.0], [-st, 0.0, 1.0]])


def carriage_rate_basis(g: GeometryParams, c: CarriageState, leg: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
    """D_i^j 对 d_i 和 η_i 的偏导 (h, t)

    Args:
        g: 几何参数
        c: 滑台状态
        leg: (i, j),从 0 开始

    Returns:
        (h, t) 两个 3 维向量
    """
    i, j = leg
    varpi = c.eta[i] + g.gamma[i]
    cw, sw = math.cos(varpi), math.sin(varpi)
    radial = g.r - c.d[i]
    lateral = LEG_SIGNS[j] * g.b / 2.0
    h = rot_z(varpi) @ np.array([-1.0, 0.0, 0.0])
    dZ = np.array([[-sw, -cw, 0.0], [cw, -sw, 0.0], [0.0, 0.0, 0.0]])
    t = dZ @ np.array([radial, lateral, 0.0])
    return h, t


def jacobians(g: GeometryParams, pose: Pose, c: CarriageState) -> JacobianBundle:
    """构造 Jx、Jq、Jh 和总体 Jacobian J

    s_i^j 取从 D_i^j 指向 B_i^j 的单位向量,l̇ > 0 表示支链伸长。

    Raises:
        DegenerateConfigurationError: 某根支链长度为 0
        SingularityError: Jh 条件数超过 1e12
    """
    B = platform_points(g, pose)
    D = carriage_points(g, c)
    R2 = euler_rate_map(pose.theta)
    L = g.L

    Jx = np.zeros((6, 6))
    Jq = np.zeros((6, 12))
    Jq[:, :6] = np.eye(6)
    legs_unit = np.zeros((3, 2, 3))

    for i in range(3):
        for j in range(2):
            row = 2 * i + j
            diff = B[i, j] - D[i, j]
            length = np.linalg.norm(diff)
            if length <= 1e-12:
                raise DegenerateConfigurationError(f"支链 ({i}, {j}) 长度为 0: {pose}")
            s = diff / length
            legs_unit[i, j] = s
            u = B[i, j] - pose.position
            Jx[row, :3] = s
            Jx[row, 3:] = -s @ skew(u) @ R2
            h, t = carriage_rate_basis(g, c, (i, j))
            Jq[row, 6 + i] = s @ h
            Jq[row, 9 + i] = s @ t

    Jh = Jx.copy()
    Jh[:, 3:] /= L

    cond = np.linalg.cond(Jh)
    if not np.isfinite(cond) or cond > SINGULAR_CONDITION:
        raise SingularityError(f"Jh 奇异 (cond = {cond:.3g}): {pose}", pose=pose)

    J = np.linalg.solve(Jh, Jq)
    return JacobianBundle(Jx=Jx, Jq=Jq, Jh=Jh, J=J, legs_unit=legs_unit, R2=R2, L=L)


def condition_number(bundle: JacobianBundle) -> float:
    """Jh 的 2-范数条件数,秩亏时返回 inf"""
    sv = np.linalg.svd(bundle.Jh, compute_uv=False)
    if not np.all(np.isfinite(sv)) or sv[-1] <= sv[0] * max(bundle.Jh.shape) * np.finfo(float).eps:
        return math.inf
    return float(sv[0] / sv[-1])
