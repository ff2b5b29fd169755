import math

import pytest

from mechanism.geometry import Pose
from mechanism.limits import JointLimits
from utils.message_formatter import format_report_summary
from utils.progress_bar import render_bar, render_progress
from workspace.report import REPORT_SCHEMA, WorkspaceReport, dexterity_at, geometry_dict, grid_metrics


def test_dexterity_at_home(reference_geometry, reference_limits):
    cond = dexterity_at(reference_geometry, reference_limits, Pose.at(0, 0, 130))
    assert cond is not None and 1.0 <= cond < 1e6


def test_dexterity_of_unreachable_pose(reference_geometry, reference_limits):
    assert dexterity_at(reference_geometry, reference_limits, Pose.at(0, 0, 40)) is None


def test_grid_metrics_of_disc_stack(disc_stack):
    metrics = grid_metrics(disc_stack)
    assert metrics["boundary_completeness"] == 1.0
    assert metrics["cavity_fraction"] == 0.0
    assert metrics["z_span"] == (0.0, 20.0)
    assert metrics["vertical_range"] == 20.0
    assert metrics["volume"] == metrics["voxel_count_reachable"] * disc_stack.spacing ** 3


def test_grid_metrics_of_empty_grid(disc_stack):
    disc_stack.labels[:] = 0
    metrics = grid_metrics(disc_stack)
    assert metrics["volume"] == 0.0
    assert metrics["boundary_completeness"] == 0.0
    assert metrics["z_span"] is None


def test_report_dict_and_summary(reference_geometry):
    report = WorkspaceReport(
        volume=3.47e6,
        boundary_completeness=1.0,
        cavity_fraction=0.05,
        TI1=2789.17,
        TI2=4853.13,
        voxel_count_reachable=433750,
        grid_descriptor={"origin": [0, 0, 0], "spacing": 2.0, "dims": [2, 2, 2]},
        z_span=(90.0, 164.0),
        complete=True,
        geometry=geometry_dict(reference_geometry),
    )
    data = report.to_dict()
    assert data["schema"] == REPORT_SCHEMA
    assert data["z_span"] == [90.0, 164.0]
    assert data["geometry"]["eta_s_deg"] == pytest.approx(30.0)
    text = format_report_summary(data)
    assert "3470000" in text
    assert "2789.17" in text


def test_progress_bar():
    assert render_bar(0.75) == "█" * 15 + "░" * 5 + " 75.0%"
    assert render_bar(2.0).endswith("100.0%")
    assert render_progress(0, 0).endswith("(0/0)")
