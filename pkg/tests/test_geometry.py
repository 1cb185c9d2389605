import numpy as np
import pytest

from hnabem.errors import Degenerate, NonConvex, OutOfRange
from hnabem.geometry import (
    SmallObstacle,
    build_polygon,
    make_scene,
    param_gamma_big,
    physical_optics,
    separation,
    upper_half_plane_indicator,
)
from hnabem.scenes import builtin_scene


def equilateral(side, center=(0.0, 0.0)):
    r = side / np.sqrt(3.0)
    ang = np.deg2rad([-15.0, 105.0, 225.0])
    return np.asarray(center) + r * np.column_stack([np.cos(ang), np.sin(ang)])


UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def test_equilateral_triangle_sides():
    poly = build_polygon(equilateral(2 * np.pi))
    assert abs(poly.perimeter - 6 * np.pi) < 1e-12
    assert np.allclose(poly.side_lengths, 2 * np.pi)
    assert np.allclose(poly.exterior_angles, 5 * np.pi / 3)


def test_unit_square_angles():
    poly = build_polygon(UNIT_SQUARE)
    assert np.allclose(poly.side_lengths, 1.0)
    assert np.allclose(poly.exterior_angles, 3 * np.pi / 2)


def test_angle_sum_identity():
    rng = np.random.default_rng(7)
    for _ in range(5):
        n = rng.integers(3, 9)
        ang = np.sort(rng.uniform(0, 2 * np.pi, n))
        while np.min(np.diff(ang, append=ang[0] + 2 * np.pi)) < 0.3:
            ang = np.sort(rng.uniform(0, 2 * np.pi, n))
        poly = build_polygon(np.column_stack([np.cos(ang), np.sin(ang)]) * rng.uniform(1, 4))
        # turning angles Omega_j - pi sum to one full revolution
        assert abs(np.sum(poly.exterior_angles - np.pi) - 2 * np.pi) < 1e-10
        assert np.all((poly.exterior_angles > np.pi) & (poly.exterior_angles < 2 * np.pi))


def test_build_polygon_errors():
    with pytest.raises(NonConvex):
        build_polygon([[0, 0], [1, 0], [1, 1], [0.5, 0.4]])  # reflex vertex
    with pytest.raises(NonConvex):
        build_polygon([[0, 0], [1, 0], [2, 0], [1, 1]])  # collinear
    with pytest.raises(Degenerate):
        build_polygon([[0, 0], [1, 0]])
    with pytest.raises(Degenerate):
        build_polygon([[0, 0], [1, 0], [1, 0], [0, 1]])
    with pytest.raises(NonConvex):
        build_polygon(UNIT_SQUARE[::-1])  # clockwise input


def test_param_gamma_big_points():
    poly = build_polygon(UNIT_SQUARE)
    pt, j, n = param_gamma_big(poly, 0.0)
    assert np.allclose(pt, [0, 0]) and j == 0
    pt, j, n = param_gamma_big(poly, 1.0)
    assert np.allclose(pt, [1, 0]) and j == 1
    pt, j, n = param_gamma_big(poly, 0.5)
    assert np.allclose(pt, [0.5, 0.0])
    assert np.allclose(n, [0, -1])
    with pytest.raises(OutOfRange):
        param_gamma_big(poly, 4.0)
    with pytest.raises(OutOfRange):
        param_gamma_big(poly, -0.1)


def test_unit_speed_parametrization():
    poly = build_polygon(equilateral(2.0))
    h = 1e-7
    for s in [0.3, 1.7, 3.9, 5.2]:
        der = (poly.point(s + h) - poly.point(s - h)) / (2 * h)
        assert abs(np.linalg.norm(der) - 1.0) < 1e-6


def test_param_gamma_small():
    scene = builtin_scene("exp1", k=20.0)
    pt0, idx0, _ = scene.param_gamma_small(0.0)
    ob = scene.obstacles[0]
    assert idx0 == 0
    assert np.allclose(pt0, ob.vertices[0])
    # arclength pi/5 lands on the obstacle's second vertex
    pt1, _, _ = scene.param_gamma_small(np.pi / 5)
    assert np.allclose(pt1, ob.vertices[1], atol=1e-12)
    ptl, idxl, _ = scene.param_gamma_small(scene.gamma_length - 1e-9)
    assert np.linalg.norm(ptl - ob.vertices[0]) < 1e-7
    with pytest.raises(OutOfRange):
        scene.param_gamma_small(scene.gamma_length)


def test_separation_values():
    assert abs(separation(builtin_scene("exp1", k=20.0)) - np.sqrt(3) * np.pi / 5) < 1e-12
    assert abs(separation(builtin_scene("exp2", k=20.0)) - 3 * np.pi / 20) < 1e-12
    assert abs(separation(builtin_scene("exp3", k=20.0)) - np.sqrt(3) * np.pi / 5) < 1e-12
    # two unit squares offset by (3, 0): the gap is 2
    scene = make_scene(UNIT_SQUARE, [UNIT_SQUARE + np.array([3.0, 0.0])], k=5.0, d=(1, 0))
    assert abs(separation(scene) - 2.0) < 1e-14


def test_separation_rigid_motion_invariance():
    scene = builtin_scene("exp1", k=20.0)
    base = separation(scene)
    th = 0.83
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    shift = np.array([2.2, -0.7])
    moved = make_scene(scene.polygon.vertices @ rot.T + shift,
                       [ob.vertices @ rot.T + shift for ob in scene.obstacles],
                       k=scene.k, d=rot @ scene.d)
    assert abs(separation(moved) - base) < 1e-12 * base


def test_upper_half_plane_indicator():
    scene = builtin_scene("exp1", k=20.0)
    poly = scene.polygon
    centroid = poly.vertices.mean(axis=0)
    for j in range(3):
        assert not upper_half_plane_indicator(poly, j, centroid)
        mid = 0.5 * (poly.vertices[j] + poly.vertices[(j + 1) % 3])
        assert upper_half_plane_indicator(poly, j, mid + 1e-9 * poly.outward_normals[j])
        assert not upper_half_plane_indicator(poly, j, poly.vertices[j])  # on the line -> outside
    # the small triangle faces side 1 (0-based): inside U_1 only
    ob = scene.obstacles[0]
    for j in range(3):
        flags = upper_half_plane_indicator(poly, j, ob.vertices)
        assert np.all(flags) == (j == 1)
        if j != 1:
            assert not np.any(flags)


def test_physical_optics():
    # direct substitution at a synthetic configuration
    scene = make_scene(UNIT_SQUARE, [], k=1.0, d=(0.0, -1.0))
    # side 2 (top, normal (0,1)) is lit; its start point (1,1) sits at s = 2
    psi = physical_optics(scene, 2.0)
    assert abs(psi - (-2j) * np.exp(1j * scene.k * np.array([1.0, 1.0]) @ scene.d)) < 1e-14
    s = np.linspace(0, 4, 401, endpoint=False)
    vals = physical_optics(scene, s)
    j = scene.polygon.side_of(s)
    dn = scene.polygon.outward_normals[j] @ scene.d
    assert np.all(vals[dn >= 0] == 0)
    assert np.allclose(np.abs(vals[dn < 0]), 2 * scene.k * np.abs(dn[dn < 0]))


def test_obstacle_orientation_normalized():
    from hnabem.geometry import _signed_area

    ob_ccw = SmallObstacle(np.array([[0, 0], [1, 0], [0, 1]], dtype=float))
    ob_cw = SmallObstacle(np.array([[0, 0], [0, 1], [1, 0]], dtype=float))
    assert _signed_area(ob_ccw.vertices) > 0
    assert _signed_area(ob_cw.vertices) > 0  # normalized from clockwise input
    p = ob_ccw.pieces()[0]
    assert np.allclose(p.normal, [0, -1])  # outward from the triangle
    centroid = np.array([1 / 3, 1 / 3])
    for ob in (ob_ccw, ob_cw):
        for piece in ob.pieces():
            assert (centroid - piece.x0) @ piece.normal < 0


def test_scene_separation_warning():
    poly = equilateral(2 * np.pi)
    tri = equilateral(0.3, center=(8.0, 0.0))
    with pytest.warns(UserWarning):
        make_scene(poly, [tri], k=0.05, d=(1, 0))  # 1/k = 20 > separation
