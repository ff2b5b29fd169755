"""异常定义

校验类错误继承 ValueError,数值类错误继承 ArithmeticError,
命令行按此区分退出码 (1 / 2)。
"""
from typing import Any, Optional


class PprError(Exception):
    """工具包所有异常的基类"""


class InvalidArgumentError(PprError, ValueError):
    """参数非法"""


class LimitViolationError(InvalidArgumentError):
    """关节行程越界

    Args:
        message: 错误描述
        index: 越界的支链组序号 (从 0 开始)
    """

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class ConfigError(InvalidArgumentError):
    """配置文件错误,带行号和字段名"""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if field:
            prefix += f"{field}: "
        super().__init__(prefix + message)


class SingularityError(PprError, ArithmeticError):
    """Jacobian 奇异或欧拉角进入奇异区"""

    def __init__(self, message: str, pose: Any = None):
        super().__init__(message)
        self.pose = pose


class DegenerateConfigurationError(PprError, ArithmeticError):
    """退化构型 (例如杆长为零)"""


class UndefinedMetricError(PprError, ArithmeticError):
    """指标无定义 (例如空的 z 区间)"""


class BudgetError(PprError, RuntimeError):
    """体素数量超过预算"""
