"""CSV 表格导出: 方向扫描区域与参数扫描结果"""
import csv
import io
from typing import List, Sequence

from exporters.base import BaseExporter
from utils.message_formatter import format_number
from workspace.orientation import OrientationRegion
from workspace.sweep import SWEEP_SCHEMA, SweepResult

REGION_SCHEMA = "ppr-workspace/regions@1"
REGION_COLUMNS = ["axis", "mode", "coordinate", "angle_min", "angle_max"]


def _header(schema: str, units: str) -> str:
    return f"# schema: {schema}\n# units: {units}\n"


def _table(columns: Sequence[str], rows: List[List[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()


class RegionCsvExporter(BaseExporter):
    """方向扫描区域,每个坐标采样一行;空区间的角度列留空"""

    schema = REGION_SCHEMA
    suffix = ".csv"

    def render(self, regions: Sequence[OrientationRegion]) -> str:
        rows = []
        for region in regions:
            for sample in region.samples:
                rows.append([
                    region.axis.value,
                    region.angle_mode.value,
                    format_number(sample.coordinate),
                    "" if sample.empty else format_number(sample.angle_min),
                    "" if sample.empty else format_number(sample.angle_max),
                ])
        return _header(self.schema, "coordinate=length angle=deg") + _table(REGION_COLUMNS, rows)


class SweepCsvExporter(BaseExporter):
    """参数扫描结果,每个格点一行

    表头为参数名 + 指标名 + error;失败行指标列留空。运行时间不写入,保证重跑逐字节一致。
    """

    schema = SWEEP_SCHEMA
    suffix = ".csv"

    def render(self, result: SweepResult) -> str:
        names = list(result.spec.names)
        metrics = list(result.spec.metrics)
        rows = []
        for row in result.rows:
            cells = [format_number(v) for v in row.values]
            cells += ["" if m not in row.metrics else format_number(row.metrics[m]) for m in metrics]
            cells.append(row.error or "")
            rows.append(cells)
        units = "a,d_s,l_s=length eta_s=deg volume=length^3 TI=deg*length"
        return _header(self.schema, units) + _table(names + metrics + ["error"], rows)
