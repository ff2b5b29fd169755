"""导出器工厂模块"""
import logging
from typing import Optional

from .base import BaseExporter
from .csv_table import RegionCsvExporter, SweepCsvExporter
from .json_report import JsonReportExporter
from .xyz_cloud import XyzCloudExporter

logger = logging.getLogger(__name__)

EXPORTERS = {
    "json": JsonReportExporter,
    "xyz": XyzCloudExporter,
    "regions_csv": RegionCsvExporter,
    "sweep_csv": SweepCsvExporter,
}


def get_exporter(kind: str) -> Optional[BaseExporter]:
    """创建导出器实例

    Args:
        kind: json / xyz / regions_csv / sweep_csv

    Returns:
        BaseExporter: 导出器实例,类型不支持时返回 None
    """
    exporter_cls = EXPORTERS.get(kind.lower())
    if exporter_cls is None:
        logger.error(f"❌ 不支持的导出类型: {kind}")
        return None
    return exporter_cls()


__all__ = ["get_exporter", "BaseExporter", "JsonReportExporter", "XyzCloudExporter", "RegionCsvExporter", "SweepCsvExporter"]
