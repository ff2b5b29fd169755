"""关节行程限制"""
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional

from errors import InvalidArgumentError


@dataclass(frozen=True)
class JointLimits:
    """三类主动移动副的行程区间

    长度单位与几何参数一致,eta 为弧度。
    """

    l_lo: float
    l_hi: float
    d_lo: float
    d_hi: float
    eta_lo: float
    eta_hi: float

    def __post_init__(self):
        for name in ("l", "d", "eta"):
            lo = getattr(self, f"{name}_lo")
            hi = getattr(self, f"{name}_hi")
            if lo > hi:
                raise InvalidArgumentError(f"{name}_lo ({lo}) > {name}_hi ({hi})")

    @classmethod
    def from_geometry(cls, g, overrides: Optional[Dict[str, Any]] = None) -> "JointLimits":
        """由几何参数推出默认行程

        d ∈ [0, d_s],η 关于 γ_i 对称取 [−η_s/2, +η_s/2]。

        Args:
            g: GeometryParams
            overrides: 覆盖个别字段 (eta 为弧度)

        Returns:
            JointLimits
        """
        limits = cls(
            l_lo=g.l_min,
            l_hi=g.l_max,
            d_lo=0.0,
            d_hi=g.d_s,
            eta_lo=-g.eta_s / 2.0,
            eta_hi=g.eta_s / 2.0,
        )
        if overrides:
            limits = replace(limits, **overrides)
        return limits

    @property
    def eta_center(self) -> float:
        return 0.5 * (self.eta_lo + self.eta_hi)

    def contains(self, other: "JointLimits") -> bool:
        """other 的每个区间是否都落在本区间内"""
        return (
            self.l_lo <= other.l_lo
            and other.l_hi <= self.l_hi
            and self.d_lo <= other.d_lo
            and other.d_hi <= self.d_hi
            and self.eta_lo <= other.eta_lo
            and other.eta_hi <= self.eta_hi
        )
