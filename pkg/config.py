"""配置管理模块

两层配置:
- Settings: 进程级默认值,从环境变量 / .env 读取
- RunConfig: 运行配置文件,扁平的 "section.key = value" 文本,角度以度计
优先级: 命令行参数 > 配置文件 > 环境变量默认值
"""
import io
import math
import os
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from dotenv import dotenv_values, load_dotenv

from errors import ConfigError, InvalidArgumentError
from mechanism.geometry import GeometryParams
from mechanism.limits import JointLimits
from workspace.orientation import AngleMode, ScanAxis
from workspace.report import Resolution
from workspace.sweep import METRICS, SWEEPABLE, ParameterRange, SweepSpec

# 加载环境变量
load_dotenv()


class Settings:
    """进程级默认值"""

    LOG_LEVEL = os.getenv("PPR_LOG_LEVEL", "INFO").upper()
    THREADS = int(os.getenv("PPR_THREADS", "1"))
    OUTPUT_DIR = os.getenv("PPR_OUTPUT_DIR", "output")
    SEED = int(os.getenv("PPR_SEED", "0"))

    @classmethod
    def validate(cls):
        """验证环境变量"""
        if cls.THREADS < 1:
            raise ValueError(f"PPR_THREADS 必须 ≥ 1: {cls.THREADS}")
        if cls.LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"不支持的日志级别: {cls.LOG_LEVEL}")


settings = Settings()

# 参考构型 (角度以度计)
DEFAULT_GEOMETRY = {"a": 50.0, "b": 14.0, "r": 100.0, "l_min": 114.5, "l_s": 50.0, "d_s": 50.0, "eta_s": 30.0}
LIMIT_KEYS = ("l_lo", "l_hi", "d_lo", "d_hi", "eta_lo", "eta_hi")
RESOLUTION_TYPES = {f.name: f.type for f in fields(Resolution)}
DEFAULT_RANGE = (10.0, 100.0, 10.0)
SWEEP_SPACING = 2.5
ALL_AXES = tuple(axis.value for axis in ScanAxis)
ALL_MODES = tuple(mode.value for mode in AngleMode)
AXIS_ALIASES = {"z": "z", "x": "x", "y'": "y'", "y_prime": "y'", "yp": "y'"}

_KEY_PATTERN = re.compile(r"^\s*(?:export\s+)?([^=#\s]+)\s*=")


def _line_numbers(text: str) -> Dict[str, int]:
    """每个键首次出现的行号 (从 1 开始)"""
    numbers: Dict[str, int] = {}
    for n, line in enumerate(text.splitlines(), start=1):
        match = _KEY_PATTERN.match(line)
        if match:
            numbers.setdefault(match.group(1), n)
    return numbers


def _check_lines(text: str) -> None:
    """每个非空、非注释行都必须是 键 = 值

    Raises:
        ConfigError: 格式错误的行,带行号
    """
    for n, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if not _KEY_PATTERN.match(line):
            key = re.split(r"[\s:=]", stripped, maxsplit=1)[0]
            raise ConfigError(f"应为 键 = 值: {stripped!r}", field=key, line=n)


def _split_list(value: str) -> Tuple[str, ...]:
    return tuple(item.strip() for item in value.split(",") if item.strip())


@dataclass
class RunConfig:
    """一次运行的全部配置

    geometry / limits 以配置文件单位保存 (长度,角度为度),需要时再换算成模型对象。
    """

    geometry: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_GEOMETRY))
    limits: Dict[str, float] = field(default_factory=dict)
    resolution: Resolution = field(default_factory=Resolution)
    output_dir: Optional[str] = None
    threads: Optional[int] = None
    seed: Optional[int] = None
    studies: Tuple[str, ...] = ()
    metrics: Tuple[str, ...] = ("volume",)
    ranges: Dict[str, Tuple[float, float, float]] = field(default_factory=dict)
    sweep_spacing: float = SWEEP_SPACING
    surface_parameters: Tuple[str, ...] = ()
    scan_axes: Tuple[str, ...] = ALL_AXES
    scan_modes: Tuple[str, ...] = ALL_MODES
    compare: Dict[str, Dict[str, float]] = field(default_factory=dict)

    # ---------- 解析 ----------

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"配置文件不存在: {path}")
        return cls.parse(path.read_text(encoding="utf-8"))

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        """解析配置文本

        Raises:
            ConfigError: 未知键、格式错误或取值非法,带行号和字段名
        """
        _check_lines(text)
        values = dotenv_values(stream=io.StringIO(text), interpolate=False)
        lines = _line_numbers(text)
        cfg = cls()
        for key, raw in values.items():
            line = lines.get(key)
            if raw is None or not raw.strip():
                raise ConfigError("缺少取值", field=key, line=line)
            try:
                cfg._apply(key, raw.strip())
            except (ValueError, LookupError) as e:
                raise ConfigError(str(e), field=key, line=line) from e
        cfg.validate()
        return cfg

    def _apply(self, key: str, raw: str) -> None:
        section, _, name = key.partition(".")
        if section == "geometry" and name in DEFAULT_GEOMETRY:
            self.geometry[name] = float(raw)
        elif section == "limits" and name in LIMIT_KEYS:
            self.limits[name] = float(raw)
        elif section == "resolution" and name in RESOLUTION_TYPES:
            caster = int if RESOLUTION_TYPES[name] in (int, "int") else float
            self.resolution = replace(self.resolution, **{name: caster(raw)})
        elif key == "output.dir":
            self.output_dir = raw
        elif key == "runtime.threads":
            self.threads = int(raw)
            if self.threads < 1:
                raise ValueError("线程数必须 ≥ 1")
        elif key == "runtime.seed":
            self.seed = int(raw)
        elif key == "sweep.studies":
            self.studies = _split_list(raw)
            unknown = [p for p in self.studies if p not in SWEEPABLE]
            if unknown:
                raise ValueError(f"不可扫描的参数: {unknown}")
        elif key == "sweep.metrics":
            self.metrics = _split_list(raw)
            unknown = [m for m in self.metrics if m not in METRICS]
            if unknown or not self.metrics:
                raise ValueError(f"未知指标: {unknown}")
        elif key.startswith("sweep.range."):
            param = key[len("sweep.range."):]
            parts = raw.split(":")
            if len(parts) != 3:
                raise ValueError(f"范围格式应为 min:max:step: {raw}")
            lo, hi, step = (float(p) for p in parts)
            ParameterRange(param, lo, hi, step)
            self.ranges[param] = (lo, hi, step)
        elif key == "sweep.spacing":
            self.sweep_spacing = float(raw)
            if self.sweep_spacing <= 0:
                raise ValueError("spacing 必须 > 0")
        elif key == "surface.parameters":
            self.surface_parameters = _split_list(raw)
            if len(self.surface_parameters) != 2 or any(p not in SWEEPABLE for p in self.surface_parameters):
                raise ValueError(f"曲面扫描需要两个可扫描参数: {raw}")
        elif key == "scan.axes":
            axes = []
            for item in _split_list(raw):
                if item not in AXIS_ALIASES:
                    raise ValueError(f"未知扫描轴: {item}")
                axes.append(AXIS_ALIASES[item])
            self.scan_axes = tuple(axes)
        elif key == "scan.modes":
            self.scan_modes = tuple(AngleMode(item).value for item in _split_list(raw))
        elif key.startswith("compare."):
            self.compare[key[len("compare."):]] = self._parse_changes(raw)
        else:
            raise LookupError("未知配置项")

    @staticmethod
    def _parse_changes(raw: str) -> Dict[str, float]:
        changes = {}
        for item in _split_list(raw):
            name, sep, value = item.partition(":")
            name = name.strip()
            if not sep or name not in DEFAULT_GEOMETRY:
                raise ValueError(f"构型改动格式应为 参数:值: {item}")
            changes[name] = float(value)
        return changes

    def validate(self) -> None:
        """检查配置能构成合法的几何参数与行程限制"""
        self.joint_limits()
        if self.resolution.spacing <= 0 or self.resolution.angle_step <= 0 or self.resolution.coord_step <= 0:
            raise ConfigError("步长必须 > 0", field="resolution")
        if self.resolution.eta_steps < 2:
            raise ConfigError("eta_steps 必须 ≥ 2", field="resolution.eta_steps")
        if self.resolution.base_clearance < 0:
            raise ConfigError("base_clearance 必须 ≥ 0", field="resolution.base_clearance")

    # ---------- 模型对象 ----------

    def geometry_params(self) -> GeometryParams:
        try:
            values = dict(self.geometry)
            return GeometryParams.from_degrees(eta_s_deg=values.pop("eta_s"), **values)
        except InvalidArgumentError as e:
            raise ConfigError(str(e), field="geometry") from e

    def joint_limits(self) -> JointLimits:
        overrides = {k: math.radians(v) if k.startswith("eta") else v for k, v in self.limits.items()}
        try:
            return JointLimits.from_geometry(self.geometry_params(), overrides)
        except ConfigError:
            raise
        except InvalidArgumentError as e:
            raise ConfigError(str(e), field="limits") from e

    def parameter_range(self, name: str) -> ParameterRange:
        return ParameterRange(name, *self.ranges.get(name, DEFAULT_RANGE))

    def sweep_spec(self, name: str) -> SweepSpec:
        """单参数扫描"""
        return SweepSpec(
            parameters=(self.parameter_range(name),),
            base=self.geometry_params(),
            metrics=self.metrics,
            resolution=replace(self.resolution, spacing=self.sweep_spacing),
        )

    def surface_spec(self) -> SweepSpec:
        """双参数曲面,缺省为 (a, d_s)"""
        names = self.surface_parameters or ("a", "d_s")
        return SweepSpec(
            parameters=tuple(self.parameter_range(n) for n in names),
            base=self.geometry_params(),
            metrics=self.metrics,
            resolution=replace(self.resolution, spacing=self.sweep_spacing),
        )

    @property
    def workers(self) -> int:
        return self.threads or settings.THREADS

    @property
    def run_seed(self) -> int:
        return settings.SEED if self.seed is None else self.seed

    @property
    def out_dir(self) -> Path:
        return Path(self.output_dir or settings.OUTPUT_DIR)

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """应用命令行参数,None 表示未指定

        支持 spacing / angle_step / eta_steps (分辨率) 与 threads / seed / output_dir。
        """
        resolution_changes = {k: overrides.pop(k) for k in ("spacing", "angle_step", "eta_steps") if overrides.get(k) is not None}
        changes = {k: v for k, v in overrides.items() if v is not None}
        cfg = replace(self, **changes)
        if resolution_changes:
            cfg = replace(cfg, resolution=replace(cfg.resolution, **resolution_changes))
            if "spacing" in resolution_changes:
                cfg = replace(cfg, sweep_spacing=resolution_changes["spacing"])
        cfg.validate()
        return cfg

    # ---------- 序列化 ----------

    def to_text(self) -> str:
        """序列化为配置文本,重新解析得到等价配置"""
        lines = ["# 3-(P̄P(2-(UP̄S))) 运行配置,长度单位一致,角度为度"]
        lines += [f"geometry.{k} = {float(v)!r}" for k, v in self.geometry.items()]
        lines += [f"limits.{k} = {float(v)!r}" for k, v in self.limits.items()]
        lines += [f"resolution.{f.name} = {getattr(self.resolution, f.name)!r}" for f in fields(Resolution)]
        if self.output_dir is not None:
            lines.append(f"output.dir = {self.output_dir}")
        if self.threads is not None:
            lines.append(f"runtime.threads = {self.threads}")
        if self.seed is not None:
            lines.append(f"runtime.seed = {self.seed}")
        if self.studies:
            lines.append(f"sweep.studies = {', '.join(self.studies)}")
        lines.append(f"sweep.metrics = {', '.join(self.metrics)}")
        for name, (lo, hi, step) in self.ranges.items():
            lines.append(f"sweep.range.{name} = {lo!r}:{hi!r}:{step!r}")
        lines.append(f"sweep.spacing = {self.sweep_spacing!r}")
        if self.surface_parameters:
            lines.append(f"surface.parameters = {', '.join(self.surface_parameters)}")
        axes = ["y_prime" if a == "y'" else a for a in self.scan_axes]
        lines.append(f"scan.axes = {', '.join(axes)}")
        lines.append(f"scan.modes = {', '.join(self.scan_modes)}")
        for name, changes in self.compare.items():
            lines.append(f"compare.{name} = {', '.join(f'{k}:{float(v)!r}' for k, v in changes.items())}")
        return "\n".join(lines) + "\n"
