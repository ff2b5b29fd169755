import math
from types import SimpleNamespace

import numpy as np
import pytest

from errors import SingularityError
from mechanism.diff_kin import carriage_rate_basis, condition_number, euler_rate_map, jacobians
from mechanism.geometry import CarriageState, Pose, carriage_points, leg_lengths, rotation_zyx
from mechanism.limits import JointLimits

EPS = 1e-5
UNBOUNDED = JointLimits(0.0, math.inf, -math.inf, math.inf, -math.inf, math.inf)


def test_rate_basis_matches_finite_differences(reference_geometry):
    g = reference_geometry
    c = CarriageState(d=[12.0, 25.0, 40.0], eta=[0.1, -0.2, 0.05])
    for i in range(3):
        for j in range(2):
            h, t = carriage_rate_basis(g, c, (i, j))
            step = np.zeros(3)
            step[i] = EPS
            fd_h = (
                carriage_points(g, CarriageState(c.d + step, c.eta), UNBOUNDED)[i, j]
                - carriage_points(g, CarriageState(c.d - step, c.eta), UNBOUNDED)[i, j]
            ) / (2 * EPS)
            fd_t = (
                carriage_points(g, CarriageState(c.d, c.eta + step), UNBOUNDED)[i, j]
                - carriage_points(g, CarriageState(c.d, c.eta - step), UNBOUNDED)[i, j]
            ) / (2 * EPS)
            np.testing.assert_allclose(h, fd_h, atol=1e-8)
            np.testing.assert_allclose(t, fd_t, rtol=1e-7, atol=1e-7)
            assert np.linalg.norm(h) == pytest.approx(1.0)


def test_euler_rate_map_matches_angular_velocity():
    theta = np.array([0.2, -0.4, 0.7])
    rate = np.array([0.3, -0.1, 0.5])
    R = rotation_zyx(*theta)
    R_dot = (rotation_zyx(*(theta + EPS * rate)) - rotation_zyx(*(theta - EPS * rate))) / (2 * EPS)
    omega_skew = R_dot @ R.T
    omega = np.array([omega_skew[2, 1], omega_skew[0, 2], omega_skew[1, 0]])
    np.testing.assert_allclose(euler_rate_map(theta) @ rate, omega, atol=1e-8)


def test_rate_identity(reference_geometry):
    g = reference_geometry
    rng = np.random.default_rng(7)
    pose = Pose.at(8.0, -6.0, 128.0, 0.1, -0.15, 0.2)
    c = CarriageState(d=[20.0, 30.0, 10.0], eta=[0.05, -0.1, 0.2])
    bundle = jacobians(g, pose, c)
    for _ in range(10):
        x_dot = rng.normal(size=6)
        c_dot = rng.normal(size=6)

        def lengths(eps):
            moved = Pose(pose.position + eps * x_dot[:3], tuple(np.add(pose.theta, eps * x_dot[3:])))
            carriage = CarriageState(c.d + eps * c_dot[:3], c.eta + eps * c_dot[3:])
            return leg_lengths(g, moved, carriage, UNBOUNDED).as_vector()

        l_dot = (lengths(EPS) - lengths(-EPS)) / (2 * EPS)
        q_dot = np.concatenate([l_dot, c_dot])
        np.testing.assert_allclose(bundle.Jx @ x_dot, bundle.Jq @ q_dot, rtol=1e-6, atol=1e-6)
        np.testing.assert_allclose(bundle.twist(q_dot), x_dot, rtol=1e-6, atol=1e-6)


def test_homogenized_jacobian_scales_rotational_columns(reference_geometry):
    bundle = jacobians(reference_geometry, Pose.at(0, 0, 130), CarriageState.zeros())
    np.testing.assert_allclose(bundle.Jh[:, :3], bundle.Jx[:, :3])
    np.testing.assert_allclose(bundle.Jh[:, 3:] * reference_geometry.L, bundle.Jx[:, 3:])
    np.testing.assert_allclose(bundle.Jq[:, :6], np.eye(6))
    np.testing.assert_allclose(np.linalg.norm(bundle.legs_unit, axis=-1), 1.0)


def test_condition_number_is_finite_at_home(reference_geometry):
    cond = condition_number(jacobians(reference_geometry, Pose.at(0, 0, 130), CarriageState.zeros()))
    assert 1.0 <= cond < 1e6


def test_flat_platform_in_base_plane_is_singular(reference_geometry):
    """平台落在底座平面内时所有支链水平,无法提供 z 向约束"""
    with pytest.raises(SingularityError):
        jacobians(reference_geometry, Pose.at(0, 0, 0), CarriageState.zeros())


def test_rate_basis_at_home(reference_geometry):
    h, t = carriage_rate_basis(reference_geometry, CarriageState.zeros(), (0, 0))
    np.testing.assert_allclose(t, [-7.0, 100.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(h, [-1.0, 0.0, 0.0], atol=1e-12)


def test_condition_number_of_diagonal_matrix():
    bundle = SimpleNamespace(Jh=np.diag([2.0, 1.0, 1.0, 1.0, 1.0, 1.0]))
    assert condition_number(bundle) == pytest.approx(2.0)
