"""JSON 报告导出"""
import json
from typing import Any, Dict

from exporters.base import BaseExporter
from utils.message_formatter import round_floats

REPORT_UNITS = {
    "length": "geometry length unit",
    "volume": "length^3",
    "angle": "deg",
    "TI": "deg*length",
}


class JsonReportExporter(BaseExporter):
    """字典结果 → JSON

    输入字典必须带 schema 字段;键的顺序保持不变,浮点数取 9 位有效数字。
    """

    suffix = ".json"

    def render(self, data: Dict[str, Any]) -> str:
        if "schema" not in data:
            raise ValueError("JSON 导出需要 schema 字段")
        payload = {"schema": data["schema"], "units": REPORT_UNITS}
        payload.update((k, v) for k, v in data.items() if k != "schema")
        return json.dumps(round_floats(payload), indent=2, ensure_ascii=False) + "\n"
