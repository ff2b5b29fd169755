"""机构几何与逆运动学

3-(P̄P(2-(UP̄S))) 冗余并联机构:
三组底座滑台 (圆弧移动副 η_i + 径向移动副 d_i),每组滑台上两根 UPS 支链。

下标约定: 组号 i ∈ {0, 1, 2},组内支链 j ∈ {0, 1};
j = 0 对应 (−1)^{j+1} = +1 的一侧。
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from errors import InvalidArgumentError, LimitViolationError, SingularityError
from mechanism.limits import JointLimits

logger = logging.getLogger(__name__)

# 每组两根支链的横向符号
LEG_SIGNS = np.array([1.0, -1.0])

# d, n, g, Σf, ν, ξ
MECHANISM_COUNTS = (6, 20, 24, 42, 0, 0)

ORTHONORMAL_TOL = 1e-12
UNIT_AXIS_TOL = 1e-9


def rot_z(angle: float) -> np.ndarray:
    """绕 z 轴的基本旋转 (Z_i / Z′_i)"""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_zyx(phi: float, theta: float, psi: float) -> np.ndarray:
    """z-y-x 欧拉角旋转矩阵 R₁ = R_z(ψ)·R_y(θ)·R_x(φ)

    Args:
        phi: 绕 x 轴转角 (弧度)
        theta: 绕 y 轴转角 (弧度)
        psi: 绕 z 轴转角 (弧度)

    Returns:
        3×3 旋转矩阵
    """
    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cp * ct, -sp * cf + cp * st * sf, sp * sf + cp * st * cf],
            [sp * ct, cp * cf + sp * st * sf, -cp * sf + sp * st * cf],
            [-st, ct * sf, ct * cf],
        ]
    )


def rotation_about_axis(axis: Sequence[float], tau: float) -> np.ndarray:
    """Euler-Rodrigues 公式: 绕单位轴 axis 旋转 tau

    Args:
        axis: 单位 3 维向量
        tau: 转角 (弧度)

    Returns:
        3×3 旋转矩阵

    Raises:
        InvalidArgumentError: axis 不是单位向量
    """
    k = np.asarray(axis, dtype=float)
    if k.shape != (3,) or abs(np.linalg.norm(k) - 1.0) > UNIT_AXIS_TOL:
        raise InvalidArgumentError(f"旋转轴必须是单位向量: {axis}")
    c, s = math.cos(tau), math.sin(tau)
    k_cross = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return c * np.eye(3) + s * k_cross + (1.0 - c) * np.outer(k, k)


def euler_from_matrix(R: np.ndarray) -> Tuple[float, float, float]:
    """rotation_zyx 的逆映射,限定 |θ| < π/2

    Returns:
        (phi, theta, psi)

    Raises:
        SingularityError: cos θ 接近 0
    """
    sin_theta = -float(R[2, 0])
    cos_theta = math.hypot(R[0, 0], R[1, 0])
    if cos_theta < 1e-9:
        raise SingularityError(f"欧拉角奇异: cos θ = {cos_theta:.3g}")
    theta = math.atan2(sin_theta, cos_theta)
    phi = math.atan2(R[2, 1], R[2, 2])
    psi = math.atan2(R[1, 0], R[0, 0])
    return phi, theta, psi


def is_rotation(R: np.ndarray, tol: float = ORTHONORMAL_TOL) -> bool:
    """RᵀR = I 且 det R = +1"""
    return bool(
        np.allclose(R.T @ R, np.eye(3), rtol=0.0, atol=tol)
        and abs(np.linalg.det(R) - 1.0) <= tol
    )


@dataclass(frozen=True)
class GeometryParams:
    """设计参数 (Table I 的七个标量)

    eta_s 内部以弧度保存,界面用 from_degrees 按角度传入。
    """

    a: float
    b: float
    r: float
    l_min: float
    l_s: float
    d_s: float
    eta_s: float

    def __post_init__(self):
        checks = [
            (self.a > 0, "a 必须 > 0"),
            (self.b >= 0, "b 必须 ≥ 0"),
            (self.r > 0, "r 必须 > 0"),
            (self.l_min > 0, "l_min 必须 > 0"),
            (self.l_s >= 0, "l_s 必须 ≥ 0"),
            (self.d_s >= 0, "d_s 必须 ≥ 0"),
            (self.eta_s >= 0, "eta_s 必须 ≥ 0"),
            (self.d_s < self.r, "d_s 必须 < r"),
        ]
        for ok, message in checks:
            if not ok:
                raise InvalidArgumentError(f"{message}: {self}")

    @classmethod
    def from_degrees(cls, a, b, r, l_min, l_s, d_s, eta_s_deg) -> "GeometryParams":
        return cls(a=a, b=b, r=r, l_min=l_min, l_s=l_s, d_s=d_s, eta_s=math.radians(eta_s_deg))

    @classmethod
    def reference(cls) -> "GeometryParams":
        """参考构型"""
        return cls.from_degrees(a=50.0, b=14.0, r=100.0, l_min=114.5, l_s=50.0, d_s=50.0, eta_s_deg=30.0)

    @property
    def l_max(self) -> float:
        return self.l_min + self.l_s

    @property
    def eta_s_deg(self) -> float:
        return math.degrees(self.eta_s)

    @property
    def gamma(self) -> np.ndarray:
        """γ_i = (i−1)·2π/3"""
        return np.arange(3) * 2.0 * math.pi / 3.0

    @property
    def L(self) -> float:
        """特征长度"""
        return self.a / 2.0

    def with_parameter(self, name: str, value: float) -> "GeometryParams":
        """替换单个参数,eta_s 按角度传入"""
        if name == "eta_s":
            return replace(self, eta_s=math.radians(value))
        if name not in ("a", "b", "r", "l_min", "l_s", "d_s"):
            raise InvalidArgumentError(f"未知参数: {name}")
        return replace(self, **{name: float(value)})

    def value_of(self, name: str) -> float:
        """读取参数值,eta_s 返回角度"""
        if name == "eta_s":
            return self.eta_s_deg
        return float(getattr(self, name))


@dataclass(frozen=True, eq=False)
class Pose:
    """动平台位姿: 中心位置 P_o 和 z-y-x 欧拉角 Θ = (φ, θ, ψ)"""

    position: np.ndarray
    theta: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        position = np.asarray(self.position, dtype=float).reshape(3)
        angles = tuple(float(v) for v in self.theta)
        if len(angles) != 3 or not all(math.isfinite(v) for v in angles):
            raise InvalidArgumentError(f"非法欧拉角: {self.theta}")
        if not np.all(np.isfinite(position)):
            raise InvalidArgumentError(f"非法位置: {self.position}")
        if abs(angles[1]) >= math.pi / 2:
            raise InvalidArgumentError(f"|θ| 必须 < π/2: {angles[1]}")
        object.__setattr__(self, "position", position)
        object.__setattr__(self, "theta", angles)

    @classmethod
    def at(cls, x: float, y: float, z: float, phi=0.0, theta=0.0, psi=0.0) -> "Pose":
        return cls(np.array([x, y, z], dtype=float), (phi, theta, psi))

    @property
    def rotation(self) -> np.ndarray:
        return rotation_zyx(*self.theta)

    def __repr__(self):
        x, y, z = self.position
        return f"Pose(P_o=({x:.6g}, {y:.6g}, {z:.6g}), Θ={tuple(round(v, 9) for v in self.theta)})"


@dataclass(frozen=True, eq=False)
class CarriageState:
    """三组底座滑台的冗余变量 (d_i, η_i),η 为弧度"""

    d: np.ndarray = field(default_factory=lambda: np.zeros(3))
    eta: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "d", np.asarray(self.d, dtype=float).reshape(3))
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=float).reshape(3))

    @classmethod
    def zeros(cls) -> "CarriageState":
        return cls()

    def check_within(self, limits: JointLimits, tol: float = 1e-12) -> None:
        """校验行程,越界时抛出带组号的错误"""
        for i in range(3):
            if not (limits.d_lo - tol <= self.d[i] <= limits.d_hi + tol):
                raise LimitViolationError(
                    f"d[{i}] = {self.d[i]:.9g} 超出 [{limits.d_lo:.9g}, {limits.d_hi:.9g}]", index=i
                )
            if not (limits.eta_lo - tol <= self.eta[i] <= limits.eta_hi + tol):
                raise LimitViolationError(
                    f"eta[{i}] = {self.eta[i]:.9g} 超出 [{limits.eta_lo:.9g}, {limits.eta_hi:.9g}]",
                    index=i,
                )


@dataclass(frozen=True, eq=False)
class LegLengths:
    """六根 UPS 支链长度,l[i][j]"""

    l: np.ndarray

    def admissible(self, limits: JointLimits, tol: float = 0.0) -> bool:
        return bool(np.all(self.l >= limits.l_lo - tol) and np.all(self.l <= limits.l_hi + tol))

    def as_vector(self) -> np.ndarray:
        """q₁ 顺序: l_1^1, l_1^2, l_2^1, ..."""
        return self.l.reshape(6).copy()


def platform_frame_points(g: GeometryParams) -> np.ndarray:
    """动平台坐标系下的铰点 ū_i^j,形状 (3, 2, 3)"""
    points = np.empty((3, 2, 3))
    for i, gamma in enumerate(g.gamma):
        Z = rot_z(gamma)
        for j, sign in enumerate(LEG_SIGNS):
            points[i, j] = Z @ np.array([math.sqrt(3.0) * g.a / 2.0, sign * g.a / 2.0, 0.0])
    return points


def platform_points(g: GeometryParams, pose: Pose) -> np.ndarray:
    """B_i^j = P_o + R₁·ū_i^j,形状 (3, 2, 3)"""
    u_bar = platform_frame_points(g)
    return pose.position + u_bar @ pose.rotation.T


def carriage_points(g: GeometryParams, c: CarriageState, limits: Optional[JointLimits] = None) -> np.ndarray:
    """D_i^j = Z′(ϖ_i)·[r − d_i, ±b/2, 0]ᵀ,ϖ_i = η_i + γ_i

    Args:
        g: 几何参数
        c: 滑台状态
        limits: 行程限制,缺省由 g 推出

    Returns:
        形状 (3, 2, 3) 的点集,z 分量恒为 0

    Raises:
        LimitViolationError: 滑台越界
    """
    c.check_within(limits or JointLimits.from_geometry(g))
    points = np.empty((3, 2, 3))
    for i in range(3):
        Z = rot_z(c.eta[i] + g.gamma[i])
        for j, sign in enumerate(LEG_SIGNS):
            points[i, j] = Z @ np.array([g.r - c.d[i], sign * g.b / 2.0, 0.0])
    return points


def leg_lengths(g: GeometryParams, pose: Pose, c: CarriageState, limits: Optional[JointLimits] = None) -> LegLengths:
    """l_i^j = ‖B_i^j − D_i^j‖"""
    B = platform_points(g, pose)
    D = carriage_points(g, c, limits)
    return LegLengths(np.linalg.norm(B - D, axis=-1))


def mobility(d_order: int, n_links: int, g_joints: int, freedom_sum: int, nu: int, xi: int) -> int:
    """修正 Grübler-Kutzbach 公式 M = d(n − g − 1) + Σf + ν − ξ"""
    counts = (d_order, n_links, g_joints, freedom_sum, nu, xi)
    if any(int(v) != v or v < 0 for v in counts):
        raise InvalidArgumentError(f"计数必须是非负整数: {counts}")
    return int(d_order * (n_links - g_joints - 1) + freedom_sum + nu - xi)
