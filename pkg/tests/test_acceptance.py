"""与参考结果对比的长时间检查,设置 PPR_ACCEPTANCE=1 时运行"""
import os

import numpy as np
import pytest

from checks import check_rate_basis, check_rate_identity, check_reachability
from config import settings
from mechanism.geometry import GeometryParams
from mechanism.limits import JointLimits
from workspace.grid import COMPLETE_THRESHOLD, GridSpec, sample_position_workspace, volume
from workspace.report import Resolution, analyze_workspace
from workspace.sweep import ParameterRange, SweepSpec, compare_configurations, run_surface, run_sweep

pytestmark = pytest.mark.skipif(os.getenv("PPR_ACCEPTANCE") != "1", reason="设置 PPR_ACCEPTANCE=1 运行")

WORKERS = settings.THREADS
SWEEP_RESOLUTION = Resolution(spacing=2.5, angle_step=2.0, coord_step=2.5)


@pytest.fixture(scope="module")
def reference():
    g = GeometryParams.reference()
    return g, JointLimits.from_geometry(g)


@pytest.fixture(scope="module")
def reference_report(reference):
    g, limits = reference
    report, _, _ = analyze_workspace(g, limits, Resolution(), WORKERS)
    return report


def test_reference_volume(reference_report):
    assert reference_report.volume == pytest.approx(3.47e6, rel=0.10)
    assert reference_report.complete
    assert reference_report.cavity_fraction > 0


def test_volume_converges(reference):
    g, limits = reference
    floor = Resolution().base_clearance
    coarse = volume(sample_position_workspace(g, limits, grid_spec=GridSpec(spacing=2.0, floor=floor), workers=WORKERS))
    fine = volume(
        sample_position_workspace(g, limits, grid_spec=GridSpec(spacing=1.0, floor=floor), workers=WORKERS, voxel_budget=200_000_000)
    )
    assert abs(coarse - fine) / fine < 0.05


def test_capability_indices(reference_report):
    assert reference_report.TI1 == pytest.approx(2789.17, rel=0.20)
    assert reference_report.TI2 == pytest.approx(4853.13, rel=0.20)


@pytest.fixture(scope="module")
def trend_suite(reference):
    g, _ = reference
    results = {}
    for name in ("a", "d_s", "eta_s", "l_s"):
        spec = SweepSpec(
            parameters=(ParameterRange(name, 10, 100, 10),),
            base=g,
            metrics=("volume", "TI1"),
            resolution=SWEEP_RESOLUTION,
        )
        results[name] = run_sweep(spec, WORKERS)
    return results


def test_volume_trends(trend_suite):
    assert trend_suite["a"].verdicts["volume"] == "rise-then-fall"
    assert trend_suite["d_s"].verdicts["volume"] == "rise-then-plateau"
    assert trend_suite["eta_s"].verdicts["volume"] == "increasing"
    assert trend_suite["l_s"].verdicts["volume"] == "increasing"
    spans = {name: np.ptp(result.column("volume")) for name, result in trend_suite.items()}
    assert max(spans, key=spans.get) == "l_s"


def test_torsion_is_dominated_by_eta_s(trend_suite):
    def gain(name):
        column = trend_suite[name].column("TI1")
        return (column[-1] - column[0]) / max(column[0], 1e-9)

    assert all(gain("eta_s") > gain(name) for name in ("a", "d_s", "l_s"))


def test_boundary_classification(reference):
    g, _ = reference
    variants = {
        "reference": {"a": 50.0},
        "d_s_80": {"d_s": 80.0},
        "eta_s_10": {"eta_s": 10.0},
        "eta_s_60": {"eta_s": 60.0},
        "a_10": {"a": 10.0},
        "a_80": {"a": 80.0},
        "d_s_10": {"d_s": 10.0},
        "l_s_20": {"l_s": 20.0},
    }
    rows = compare_configurations(g, variants, metrics=("boundary_completeness",), resolution=SWEEP_RESOLUTION, workers=WORKERS)
    complete = {row["name"]: row["metrics"]["boundary_completeness"] >= COMPLETE_THRESHOLD for row in rows}
    assert complete == {
        "reference": True,
        "d_s_80": True,
        "eta_s_10": True,
        "eta_s_60": True,
        "a_10": False,
        "a_80": False,
        "d_s_10": False,
        "l_s_20": False,
    }


def test_surface_optimum(reference):
    g, _ = reference
    spec = SweepSpec(
        parameters=(ParameterRange("a", 10, 100, 10), ParameterRange("d_s", 10, 100, 10)),
        base=g,
        resolution=SWEEP_RESOLUTION,
    )
    result = run_surface(spec, WORKERS)
    region = [tuple(values) for values in result.summary()["region_95"]]
    assert any(a > 55 and d_s < 55 for a, d_s in region)


def test_oracle_equivalence(reference):
    g, limits = reference
    result = check_reachability(g, limits, 10_000, np.random.default_rng(2024))
    assert result.passed, result.detail
    assert result.value >= 0.995


def test_differential_battery(reference):
    g, limits = reference
    rng = np.random.default_rng(99)
    assert check_rate_basis(g, limits, 1000, rng).passed
    assert check_rate_identity(g, limits, 1000, rng).passed
