"""文本摘要格式化工具"""
import math
from typing import Any, Dict, Iterable, List, Optional

import pendulum

from utils.progress_bar import render_bar, render_progress

SEPARATOR = "━━━━━━━━━━━━━━━━━━━━"


def format_number(value: Optional[float]) -> str:
    """9 位有效数字"""
    if value is None:
        return "-"
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    return f"{value:.9g}"


def round_floats(data: Any) -> Any:
    """递归地把浮点数规整到 9 位有效数字,保证输出可复现"""
    if isinstance(data, float):
        if not math.isfinite(data):
            return None
        return float(f"{data:.9g}")
    if isinstance(data, dict):
        return {key: round_floats(value) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [round_floats(value) for value in data]
    return data


def format_report_summary(report: Dict[str, Any]) -> str:
    """一页纸分析摘要

    Args:
        report: WorkspaceReport.to_dict() 的结果

    Returns:
        多行文本
    """
    sections = []

    geometry = report.get("geometry", {})
    header = "🤖 3-(P̄P(2-(UP̄S))) 工作空间分析"
    if geometry:
        header += "\n" + ", ".join(f"{k}={format_number(v)}" for k, v in geometry.items())
    generated = report.get("generated_at") or pendulum.now("UTC").to_iso8601_string()
    header += f"\n生成时间: {generated}"
    sections.append(header)

    sections.append(SEPARATOR)
    lines = ["📦 位置工作空间"]
    lines.append(f"• 体积 V: {format_number(report.get('volume'))}")
    lines.append(f"• 可达体素: {report.get('voxel_count_reachable', 0):,}")
    lines.append(f"• 俯视覆盖面积: {format_number(report.get('coverage_area'))}")
    z_span = report.get("z_span")
    if z_span:
        lines.append(f"• z 范围: [{format_number(z_span[0])}, {format_number(z_span[1])}]")
    completeness = report.get("boundary_completeness", 0.0)
    verdict = "完整 ✅" if report.get("complete") else "不完整 ⚠️"
    lines.append(f"• 边界完整度: {render_bar(completeness)} {verdict}")
    lines.append(f"• 空腔比例: {render_bar(report.get('cavity_fraction', 0.0))}")
    sections.append("\n".join(lines))

    sections.append(SEPARATOR)
    lines = ["🔄 方向能力"]
    lines.append(f"• TI₁ (扭转): {format_number(report.get('TI1'))}")
    lines.append(f"• TI₂ (倾斜): {format_number(report.get('TI2'))}")
    lines.append(f"• 灵巧度 cond(Jh): {format_number(report.get('dexterity'))}")
    skipped = report.get("skipped_samples", 0)
    if skipped:
        lines.append(f"• ⚠️ 跳过的奇异采样: {skipped}")
    clipped = report.get("clipped_samples", 0)
    if clipped:
        lines.append(f"• ⚠️ 碰到角度范围端点的采样: {clipped} (TI 为下界)")
    sections.append("\n".join(lines))

    return "\n\n".join(sections)


def format_sweep_summary(summary: Dict[str, Any], rows_done: int, rows_total: int) -> str:
    """参数扫描摘要"""
    lines = [f"📈 参数扫描 {', '.join(summary.get('parameters', []))}"]
    lines.append(f"• 完成: {render_progress(rows_done, rows_total)}")
    for metric, verdict in summary.get("verdicts", {}).items():
        lines.append(f"• {metric}: {verdict}")
    argmax = summary.get("argmax")
    if argmax is not None:
        lines.append(f"• 最大值位置: {', '.join(format_number(v) for v in argmax)}")
        lines.append(f"• 95% 区域格点数: {len(summary.get('region_95', []))}")
    failed = summary.get("failed_rows", [])
    for item in failed[:3]:
        lines.append(f"• ❌ {item['values']}: {item['error']}")
    return "\n".join(lines)


def format_check_results(results: Iterable[Any]) -> str:
    """自检结果,每项一行"""
    lines: List[str] = ["🩺 自检"]
    for result in results:
        mark = "✅" if result.passed else "❌"
        lines.append(f"{mark} {result.name}: {result.detail}")
    return "\n".join(lines)
