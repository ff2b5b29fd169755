import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from errors import InvalidArgumentError, LimitViolationError, SingularityError
from mechanism.geometry import (
    MECHANISM_COUNTS,
    CarriageState,
    GeometryParams,
    Pose,
    carriage_points,
    euler_from_matrix,
    is_rotation,
    leg_lengths,
    mobility,
    platform_points,
    rotation_about_axis,
    rotation_zyx,
)
from mechanism.limits import JointLimits


def test_mobility_of_mechanism_is_12():
    assert mobility(*MECHANISM_COUNTS) == 12


def test_mobility_rejects_negative_counts():
    with pytest.raises(InvalidArgumentError):
        mobility(6, 20, 24, 42, -1, 0)


def test_rotation_zyx_identity():
    np.testing.assert_allclose(rotation_zyx(0.0, 0.0, 0.0), np.eye(3), atol=1e-15)


def test_rotation_zyx_matches_intrinsic_zyx():
    rng = np.random.default_rng(1)
    for _ in range(50):
        phi, theta, psi = rng.uniform(-1.5, 1.5, 3)
        R = rotation_zyx(phi, theta, psi)
        expected = Rotation.from_euler("ZYX", [psi, theta, phi]).as_matrix()
        np.testing.assert_allclose(R, expected, atol=1e-12)
        assert is_rotation(R)


def test_rotation_about_axis_matches_rotvec():
    axis = np.array([0.5, math.sqrt(3.0) / 2.0, 0.0])
    for tau in (-2.0, -0.3, 0.0, 0.7, math.pi):
        R = rotation_about_axis(axis, tau)
        np.testing.assert_allclose(R, Rotation.from_rotvec(axis * tau).as_matrix(), atol=1e-12)
        assert is_rotation(R)
        np.testing.assert_allclose(R @ axis, axis, atol=1e-12)


def test_rotation_about_axis_rejects_non_unit_axis():
    with pytest.raises(InvalidArgumentError):
        rotation_about_axis([1.0, 1.0, 0.0], 0.3)


def test_euler_from_matrix_round_trip():
    angles = (0.3, -0.8, 2.5)
    np.testing.assert_allclose(euler_from_matrix(rotation_zyx(*angles)), angles, atol=1e-12)


def test_euler_from_matrix_singular():
    with pytest.raises(SingularityError):
        euler_from_matrix(rotation_zyx(0.2, math.pi / 2, 0.1))


def test_pose_rejects_gimbal_lock():
    with pytest.raises(InvalidArgumentError):
        Pose.at(0, 0, 130, theta=math.pi / 2)


def test_geometry_validation():
    with pytest.raises(InvalidArgumentError):
        GeometryParams.from_degrees(a=50, b=14, r=100, l_min=114.5, l_s=50, d_s=100, eta_s_deg=30)
    with pytest.raises(InvalidArgumentError):
        GeometryParams.from_degrees(a=-1, b=14, r=100, l_min=114.5, l_s=50, d_s=50, eta_s_deg=30)


def test_with_parameter_takes_degrees_for_eta_s(reference_geometry):
    g = reference_geometry.with_parameter("eta_s", 60.0)
    assert g.eta_s == pytest.approx(math.radians(60.0))
    assert g.value_of("eta_s") == pytest.approx(60.0)
    assert reference_geometry.with_parameter("a", 80).a == 80.0


def test_default_limits(reference_geometry):
    limits = JointLimits.from_geometry(reference_geometry)
    assert (limits.l_lo, limits.l_hi) == (114.5, 164.5)
    assert (limits.d_lo, limits.d_hi) == (0.0, 50.0)
    assert limits.eta_hi == pytest.approx(math.radians(15.0))
    assert limits.eta_lo == pytest.approx(-math.radians(15.0))


def test_limits_reject_inverted_interval():
    with pytest.raises(InvalidArgumentError):
        JointLimits(1.0, 0.0, 0.0, 1.0, 0.0, 1.0)


def test_leg_lengths_home_pose_are_equal(reference_geometry):
    g = reference_geometry
    lengths = leg_lengths(g, Pose.at(0, 0, 130), CarriageState.zeros())
    expected = math.sqrt((g.r - math.sqrt(3) * g.a / 2) ** 2 + (g.a / 2 - g.b / 2) ** 2 + 130.0 ** 2)
    np.testing.assert_allclose(lengths.l, np.full((3, 2), expected), rtol=1e-12)
    assert lengths.admissible(JointLimits.from_geometry(g))


def test_platform_points_are_rigid(reference_geometry):
    pose = Pose.at(10, -5, 120, 0.1, -0.2, 0.3)
    B = platform_points(reference_geometry, pose).reshape(6, 3)
    B0 = platform_points(reference_geometry, Pose.at(0, 0, 0)).reshape(6, 3)
    d = np.linalg.norm(B[:, None] - B[None], axis=-1)
    d0 = np.linalg.norm(B0[:, None] - B0[None], axis=-1)
    np.testing.assert_allclose(d, d0, atol=1e-10)
    np.testing.assert_allclose(B.mean(axis=0), pose.position, atol=1e-10)


def test_carriage_points_lie_on_base_plane(reference_geometry):
    c = CarriageState(d=[10.0, 20.0, 30.0], eta=[0.1, -0.1, 0.2])
    D = carriage_points(reference_geometry, c)
    np.testing.assert_allclose(D[..., 2], 0.0)
    spread = np.linalg.norm(D[:, 0] - D[:, 1], axis=-1)
    np.testing.assert_allclose(spread, reference_geometry.b, rtol=1e-12)


def test_carriage_limit_violation_names_group(reference_geometry):
    c = CarriageState(d=[0.0, 60.0, 0.0], eta=[0.0, 0.0, 0.0])
    with pytest.raises(LimitViolationError) as exc:
        carriage_points(reference_geometry, c)
    assert exc.value.index == 1


def test_co_rotation_preserves_leg_lengths(reference_geometry):
    """平台与三组滑台同转 η,支链长度不变"""
    g = reference_geometry
    pose = Pose.at(0, 0, 130)
    eta = math.radians(10.0)
    c = CarriageState(d=[5.0, 5.0, 5.0], eta=[0.0, 0.0, 0.0])
    turned = CarriageState(d=c.d, eta=[eta, eta, eta])
    before = leg_lengths(g, pose, c).l
    after = leg_lengths(g, Pose.at(0, 0, 130, psi=eta), turned).l
    np.testing.assert_allclose(after, before, rtol=1e-12)


def test_platform_point_at_origin(reference_geometry):
    B = platform_points(reference_geometry, Pose.at(0, 0, 0))
    np.testing.assert_allclose(B[0, 0], [25.0 * math.sqrt(3.0), 25.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(B[0, 0], [43.3013, 25.0, 0.0], atol=1e-4)
    np.testing.assert_allclose(platform_points(reference_geometry, Pose.at(0, 0, 100))[0, 0], [43.3013, 25.0, 100.0], atol=1e-4)


def test_platform_points_turn_with_group_labels(reference_geometry):
    """绕 z 转 2π/3 等价于组号 i → i+1"""
    g = reference_geometry
    identity = platform_points(g, Pose.at(0, 0, 0))
    turned = platform_points(g, Pose.at(0, 0, 0, psi=2.0 * math.pi / 3.0))
    for i in range(3):
        np.testing.assert_allclose(turned[i], identity[(i + 1) % 3], atol=1e-9)


def test_carriage_point_on_turned_rail(reference_geometry):
    eta = math.radians(15.0)
    c = CarriageState(d=[50.0, 0.0, 0.0], eta=[eta, 0.0, 0.0])
    D = carriage_points(reference_geometry, c, JointLimits(0.0, math.inf, 0.0, 100.0, -1.0, 1.0))
    expected = [50.0 * math.cos(eta) - 7.0 * math.sin(eta), 50.0 * math.sin(eta) + 7.0 * math.cos(eta), 0.0]
    np.testing.assert_allclose(D[0, 0], expected, atol=1e-12)
    np.testing.assert_allclose(D[0, 0], [46.489, 19.702, 0.0], atol=5e-3)


def test_leg_length_at_height_100(reference_geometry):
    lengths = leg_lengths(reference_geometry, Pose.at(0, 0, 100), CarriageState.zeros())
    assert lengths.l[0, 0] == pytest.approx(math.sqrt(13538.74), abs=1e-3)
    assert lengths.l[0, 0] == pytest.approx(116.357, abs=2e-3)


def test_leg_length_reaches_minimum_at_z_star(reference_geometry):
    g = reference_geometry
    dx = g.r - math.sqrt(3.0) * g.a / 2.0
    dy = g.a / 2.0 - g.b / 2.0
    z_star = math.sqrt(114.5 ** 2 - dx ** 2 - dy ** 2)
    assert z_star == pytest.approx(97.834, abs=1e-3)
    lengths = leg_lengths(g, Pose.at(0, 0, z_star), CarriageState.zeros())
    np.testing.assert_allclose(lengths.l, np.full((3, 2), g.l_min), atol=1e-9)


def test_squared_leg_length_is_monic_quadratic_in_d(reference_geometry):
    g = reference_geometry
    pose = Pose.at(12.0, -7.0, 118.0, 0.1, -0.05, 0.2)
    unbounded = JointLimits(0.0, math.inf, -math.inf, math.inf, -math.inf, math.inf)
    eta = [0.1, -0.2, 0.05]

    def squared(i, j, d):
        ds = [5.0, 15.0, 25.0]
        ds[i] = d
        return leg_lengths(g, pose, CarriageState(d=ds, eta=eta), unbounded).l[i, j] ** 2

    for i in range(3):
        for j in range(2):
            xs = np.array([0.0, 20.0, 40.0])
            coeffs = np.polyfit(xs, [squared(i, j, x) for x in xs], 2)
            assert coeffs[0] == pytest.approx(1.0, abs=1e-9)
            assert np.polyval(coeffs, 30.0) == pytest.approx(squared(i, j, 30.0), rel=1e-9)
