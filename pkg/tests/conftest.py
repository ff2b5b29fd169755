"""测试共用夹具"""
import numpy as np
import pytest

from mechanism.geometry import GeometryParams
from mechanism.limits import JointLimits
from workspace.grid import VoxelGrid, VoxelLabel


@pytest.fixture
def reference_geometry() -> GeometryParams:
    return GeometryParams.reference()


@pytest.fixture
def reference_limits(reference_geometry) -> JointLimits:
    return JointLimits.from_geometry(reference_geometry)


@pytest.fixture
def zero_stroke_geometry() -> GeometryParams:
    return GeometryParams.from_degrees(a=50.0, b=14.0, r=100.0, l_min=114.5, l_s=0.0, d_s=0.0, eta_s_deg=0.0)


def labeled_grid(mask_fn, half: float = 60.0, spacing: float = 1.0, z_lo: float = -60.0, z_hi: float = 60.0) -> VoxelGrid:
    """按解析形状 mask_fn(X, Y, Z) 标记的合成网格"""
    n_xy = int(round(2 * half / spacing)) + 1
    n_z = int(round((z_hi - z_lo) / spacing)) + 1
    gridv = VoxelGrid.empty((-half, -half, z_lo), spacing, (n_xy, n_xy, n_z))
    X, Y, Z = gridv.centers()
    gridv.labels[mask_fn(X, Y, Z)] = VoxelLabel.REACHABLE
    return gridv


@pytest.fixture
def ball_grid() -> VoxelGrid:
    return labeled_grid(lambda X, Y, Z: X * X + Y * Y + Z * Z <= 50.0 ** 2)


@pytest.fixture
def shell_grid() -> VoxelGrid:
    def shell(X, Y, Z):
        rho = np.sqrt(X * X + Y * Y + Z * Z)
        return (rho <= 50.0) & (rho > 30.0)

    return labeled_grid(shell)


@pytest.fixture
def disc_stack() -> VoxelGrid:
    return labeled_grid(lambda X, Y, Z: X * X + Y * Y <= 40.0 ** 2, half=50.0, z_lo=0.0, z_hi=20.0)
