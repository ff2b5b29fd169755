"""导出器基类"""
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Union

logger = logging.getLogger(__name__)


class BaseExporter(ABC):
    """结果文件导出器基类

    所有输出格式都需要继承这个基类并实现以下方法:
    - render: 把结果渲染成文本 (固定字段顺序、9 位有效数字)
    - export: 写入文件 (可选,默认实现写 UTF-8 文本)
    """

    schema: str = ""
    suffix: str = ".txt"

    @abstractmethod
    def render(self, data: Any) -> str:
        """渲染文本

        Args:
            data: 报告、网格、扫描区域或扫描结果

        Returns:
            str: 文件内容
        """
        pass

    def export(self, data: Any, path: Union[str, Path]) -> bool:
        """写入文件

        Args:
            data: 同 render
            path: 目标路径,父目录不存在时自动创建

        Returns:
            bool: 写入是否成功
        """
        path = Path(path)
        try:
            text = self.render(data)
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            logger.info(f"✅ 已写入 {path}")
            return True
        except OSError as e:
            logger.error(f"❌ 写入 {path} 失败: {e}")
            return False
