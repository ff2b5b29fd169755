import math
from pathlib import Path

import pytest

from config import RunConfig
from errors import ConfigError

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def test_defaults_are_reference_configuration(reference_geometry):
    cfg = RunConfig()
    g = cfg.geometry_params()
    assert (g.a, g.b, g.r, g.l_min, g.l_s, g.d_s) == (50.0, 14.0, 100.0, 114.5, 50.0, 50.0)
    assert g.eta_s == pytest.approx(reference_geometry.eta_s)


def test_parse_sections():
    cfg = RunConfig.parse(
        "\n".join(
            [
                "# 注释",
                "geometry.a = 60",
                "geometry.eta_s = 40  # 度",
                "limits.eta_hi = 10",
                "resolution.spacing = 3.5",
                "resolution.eta_steps = 41",
                "runtime.threads = 4",
                "sweep.studies = a, l_s",
                "sweep.metrics = volume, TI1",
                "sweep.range.a = 20:80:20",
                "scan.axes = z, y_prime",
                "scan.modes = phi",
                "compare.small = a:20, d_s:30",
            ]
        )
    )
    assert cfg.geometry["a"] == 60.0
    assert cfg.geometry_params().eta_s == pytest.approx(math.radians(40.0))
    assert cfg.joint_limits().eta_hi == pytest.approx(math.radians(10.0))
    assert cfg.resolution.spacing == 3.5
    assert cfg.resolution.eta_steps == 41
    assert cfg.workers == 4
    assert cfg.studies == ("a", "l_s")
    assert cfg.metrics == ("volume", "TI1")
    assert cfg.parameter_range("a").values() == [20.0, 40.0, 60.0, 80.0]
    assert cfg.parameter_range("l_s").values()[0] == 10.0
    assert cfg.scan_axes == ("z", "y'")
    assert cfg.scan_modes == ("phi",)
    assert cfg.compare == {"small": {"a": 20.0, "d_s": 30.0}}


def test_unknown_key_names_line():
    with pytest.raises(ConfigError) as exc:
        RunConfig.parse("geometry.a = 50\n\ngeometry.aa = 3\n")
    assert exc.value.line == 3
    assert exc.value.field == "geometry.aa"
    assert "line 3" in str(exc.value)


@pytest.mark.parametrize("line", ["geometry.a: 30", "geometry.a 30"])
def test_line_without_equals_is_rejected(line):
    with pytest.raises(ConfigError) as exc:
        RunConfig.parse(f"{line}\ngeometry.b = 14\n")
    assert exc.value.line == 1
    assert exc.value.field == "geometry.a"


def test_comments_and_blank_lines_are_allowed():
    cfg = RunConfig.parse("# 注释\n\n   \ngeometry.a = 30\n")
    assert cfg.geometry["a"] == 30.0


def test_base_clearance_is_configurable():
    cfg = RunConfig.parse("resolution.base_clearance = 20\n")
    assert cfg.resolution.base_clearance == 20.0
    with pytest.raises(ConfigError) as exc:
        RunConfig.parse("resolution.base_clearance = -1\n")
    assert exc.value.field == "resolution.base_clearance"


def test_malformed_range_is_field_addressed():
    with pytest.raises(ConfigError) as exc:
        RunConfig.parse("sweep.range.a = 80:20:10\n")
    assert exc.value.field == "sweep.range.a"
    assert exc.value.line == 1


@pytest.mark.parametrize(
    "text",
    [
        "geometry.a = abc\n",
        "sweep.range.a = 10:20\n",
        "runtime.threads = 0\n",
        "scan.axes = w\n",
        "scan.modes = roll\n",
        "compare.x = a=10\n",
        "sweep.metrics = mass\n",
        "geometry.d_s = 100\n",
        "resolution.eta_steps = 1\n",
        "limits.d_lo = 60\n",
    ],
)
def test_invalid_values(text):
    with pytest.raises(ConfigError):
        RunConfig.parse(text)


def test_round_trip():
    cfg = RunConfig.from_file(CONFIG_DIR / "fig4.cfg")
    again = RunConfig.parse(cfg.to_text())
    assert again == cfg


def test_round_trip_with_everything():
    cfg = RunConfig.parse(
        "geometry.a = 33.3\nlimits.d_hi = 20\nruntime.seed = 9\noutput.dir = out/x\n"
        "surface.parameters = a, d_s\nscan.axes = y_prime, x\ncompare.c = eta_s:45\n"
    )
    assert RunConfig.parse(cfg.to_text()) == cfg


@pytest.mark.parametrize("name", ["reference.cfg", "zero_stroke.cfg", "fig3.cfg", "fig4.cfg", "fig5.cfg"])
def test_shipped_configs_parse(name):
    cfg = RunConfig.from_file(CONFIG_DIR / name)
    assert cfg.out_dir.name


def test_missing_file():
    with pytest.raises(ConfigError):
        RunConfig.from_file(CONFIG_DIR / "nope.cfg")


def test_cli_overrides_take_precedence():
    cfg = RunConfig.from_file(CONFIG_DIR / "reference.cfg")
    overridden = cfg.with_overrides(spacing=4.0, angle_step=2.0, eta_steps=21, threads=2, seed=5, output_dir="elsewhere")
    assert overridden.resolution.spacing == 4.0
    assert overridden.resolution.angle_step == 2.0
    assert overridden.resolution.eta_steps == 21
    assert overridden.workers == 2
    assert overridden.run_seed == 5
    assert str(overridden.out_dir) == "elsewhere"
    assert cfg.with_overrides(spacing=None) == cfg


def test_sweep_specs_use_sweep_spacing():
    cfg = RunConfig.from_file(CONFIG_DIR / "fig5.cfg")
    spec = cfg.surface_spec()
    assert spec.names == ("a", "d_s")
    assert spec.resolution.spacing == 2.5
    assert len(spec.points()) == 100
