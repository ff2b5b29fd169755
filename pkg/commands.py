"""命令实现: 每个子命令读取 RunConfig,调用计算层,写出结果文件并打印摘要"""
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from checks import CheckResult, run_checks
from config import RunConfig
from errors import ConfigError
from exporters import get_exporter
from mechanism.geometry import MECHANISM_COUNTS, mobility
from workspace.orientation import OrientationRegion, ScanAxis, capability_indices, scan_all
from workspace.report import WorkspaceReport, analyze_workspace
from workspace.sweep import (
    SWEEP_SCHEMA,
    SWEEPABLE,
    SweepResult,
    compare_configurations,
    run_surface,
    run_sweep,
)
from utils.message_formatter import (
    SEPARATOR,
    format_check_results,
    format_number,
    format_report_summary,
    format_sweep_summary,
)

logger = logging.getLogger(__name__)

ORIENTATION_SCHEMA = "ppr-workspace/orientation@1"
COMPARE_SCHEMA = "ppr-workspace/compare@1"
COMPARE_METRICS = ("volume", "boundary_completeness", "cavity_fraction", "TI1", "TI2")
AXIS_FILE_TAGS = {ScanAxis.Z: "z", ScanAxis.Y_PRIME: "yp", ScanAxis.X: "x"}


def _export(kind: str, data: Any, path: Path) -> Path:
    exporter = get_exporter(kind)
    if exporter is None or not exporter.export(data, path):
        raise RuntimeError(f"写入失败: {path}")
    return path


def _export_regions(regions: Sequence[OrientationRegion], out_dir: Path) -> List[Path]:
    """每条扫描轴一个 CSV"""
    paths = []
    for axis, tag in AXIS_FILE_TAGS.items():
        selected = [region for region in regions if region.axis == axis]
        if selected:
            paths.append(_export("regions_csv", selected, out_dir / f"regions_{tag}.csv"))
    return paths


def cmd_analyze(cfg: RunConfig) -> WorkspaceReport:
    """参考分析: 位置工作空间、指标、九组方向扫描、TI,写出 JSON / XYZ / CSV"""
    g = cfg.geometry_params()
    limits = cfg.joint_limits()
    out_dir = cfg.out_dir

    logger.info("📊 开始工作空间分析...")
    report, gridv, regions = analyze_workspace(g, limits, cfg.resolution, cfg.workers)

    _export("json", report.to_dict(), out_dir / "report.json")
    _export("xyz", gridv, out_dir / "workspace.xyz")
    _export_regions(regions, out_dir)

    print(format_report_summary(report.to_dict()))
    return report


def cmd_orientation(cfg: RunConfig) -> List[OrientationRegion]:
    """只做方向工作空间扫描 (scan.axes × scan.modes)"""
    g = cfg.geometry_params()
    limits = cfg.joint_limits()
    res = cfg.resolution
    regions = scan_all(
        g,
        limits,
        coord_step=res.coord_step,
        angle_range=(res.angle_min, res.angle_max),
        angle_step=res.angle_step,
        fixed_height=res.scan_height,
        eta_steps=res.eta_steps,
        workers=cfg.workers,
        axes=[ScanAxis(a) for a in cfg.scan_axes],
        modes=cfg.scan_modes,
    )
    _export_regions(regions, cfg.out_dir)

    summary: Dict[str, Any] = {
        "schema": ORIENTATION_SCHEMA,
        "scan_height": res.scan_height,
        "regions": [
            {"axis": r.axis.value, "mode": r.angle_mode.value, "area": r.area(), "skipped": len(r.skipped), "clipped": r.clipped_count()}
            for r in regions
        ],
    }
    if len(regions) == 9:
        ti1, ti2 = capability_indices(regions)
        summary["TI1"] = ti1
        summary["TI2"] = ti2
    _export("json", summary, cfg.out_dir / "orientation.json")

    lines = ["🔄 方向工作空间"]
    for item in summary["regions"]:
        lines.append(f"• {item['axis']}/{item['mode']}: 面积 {format_number(item['area'])}")
    if "TI1" in summary:
        lines.append(f"• TI₁ = {format_number(summary['TI1'])}, TI₂ = {format_number(summary['TI2'])}")
    print("\n".join(lines))
    return regions


def cmd_sweep(cfg: RunConfig) -> Dict[str, SweepResult]:
    """单参数扫描,每个参数一个 CSV,趋势判定汇总到 sweep.json"""
    studies = cfg.studies or SWEEPABLE
    results: Dict[str, SweepResult] = {}
    for name in studies:
        result = run_sweep(cfg.sweep_spec(name), cfg.workers)
        _export("sweep_csv", result, cfg.out_dir / f"sweep_{name}.csv")
        results[name] = result

    summary = {"schema": SWEEP_SCHEMA, "studies": {name: r.summary() for name, r in results.items()}}
    _export("json", summary, cfg.out_dir / "sweep.json")

    blocks = []
    for result in results.values():
        done = sum(1 for row in result.rows if row.ok)
        blocks.append(format_sweep_summary(result.summary(), done, len(result.rows)))
    print(f"\n{SEPARATOR}\n".join(blocks))
    return results


def cmd_surface(cfg: RunConfig) -> SweepResult:
    """双参数曲面,写出 surface.csv 与带 argmax 的 surface.json"""
    result = run_surface(cfg.surface_spec(), cfg.workers)
    _export("sweep_csv", result, cfg.out_dir / "surface.csv")
    _export("json", result.summary(), cfg.out_dir / "surface.json")
    done = sum(1 for row in result.rows if row.ok)
    print(format_sweep_summary(result.summary(), done, len(result.rows)))
    return result


def cmd_compare(cfg: RunConfig) -> List[Dict[str, Any]]:
    """命名构型对比 (compare.<name> = 参数:值)"""
    if not cfg.compare:
        raise ConfigError("没有可对比的构型", field="compare")
    metrics = cfg.metrics if cfg.metrics != ("volume",) else COMPARE_METRICS
    rows = compare_configurations(
        cfg.geometry_params(),
        cfg.compare,
        metrics=metrics,
        resolution=cfg.resolution,
        workers=cfg.workers,
    )
    _export("json", {"schema": COMPARE_SCHEMA, "metrics": list(metrics), "rows": rows}, cfg.out_dir / "compare.json")

    lines = ["🔍 构型对比"]
    for row in rows:
        if "error" in row:
            lines.append(f"• ❌ {row['name']}: {row['error']}")
            continue
        values = ", ".join(f"{k}={format_number(v)}" for k, v in row["metrics"].items())
        mark = ""
        if "complete" in row:
            mark = " 边界完整 ✅" if row["complete"] else " 边界不完整 ⚠️"
        lines.append(f"• {row['name']}: {values}{mark}")
    print("\n".join(lines))
    return rows


def cmd_check(cfg: RunConfig, n_poses: int = 500, reach_fn: Optional[Callable] = None) -> List[CheckResult]:
    """快速自检,打印每项结果"""
    results = run_checks(cfg.geometry_params(), cfg.joint_limits(), n_poses=n_poses, seed=cfg.run_seed, reach_fn=reach_fn)
    print(format_check_results(results))
    return results


def cmd_mobility(counts: Optional[Sequence[int]] = None) -> int:
    """自由度 M = d(n − g − 1) + Σf + ν − ξ,缺省使用本机构的计数"""
    counts = tuple(counts) if counts else MECHANISM_COUNTS
    m = mobility(*counts)
    print(f"M = {counts[0]}({counts[1]} - {counts[2]} - 1) + {counts[3]} + {counts[4]} - {counts[5]} = {m}")
    return m
