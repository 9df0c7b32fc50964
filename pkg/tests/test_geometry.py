import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reflectgen.geometry import (Aabb, Transform, aabb_of_points,
                                 look_at_basis, normalize, reflect,
                                 sphere_map_uv)

unit_vec = st.builds(
    lambda x, y, z: np.array([x, y, z]),
    *[st.floats(-1.0, 1.0) for _ in range(3)],
).filter(lambda v: np.linalg.norm(v) > 1e-3).map(lambda v: v / np.linalg.norm(v))


def test_normalize_single_vector():
    np.testing.assert_allclose(normalize([3.0, 0.0, 4.0]), [0.6, 0.0, 0.8])


def test_normalize_batch():
    v = np.array([[2.0, 0.0, 0.0], [0.0, 0.0, -5.0]])
    out = normalize(v)
    np.testing.assert_allclose(np.linalg.norm(out, axis=-1), 1.0)


def test_reflect_known_case():
    out = reflect([1.0, -1.0, 0.0], [0.0, 1.0, 0.0])
    np.testing.assert_allclose(out, [1.0, 1.0, 0.0])


@given(unit_vec, unit_vec)
def test_reflect_is_an_involution(incident, normal):
    once = reflect(incident, normal)
    twice = reflect(once, normal)
    np.testing.assert_allclose(twice, incident, atol=1e-9)


@given(unit_vec, unit_vec)
def test_reflect_preserves_length(incident, normal):
    out = reflect(incident, normal)
    assert abs(np.linalg.norm(out) - 1.0) < 1e-9


def test_sphere_map_uv_forward_axis():
    # the direction straight back at the map center
    np.testing.assert_allclose(sphere_map_uv([0.0, 0.0, 1.0]), [0.5, 0.5])


def test_sphere_map_uv_singular_direction():
    np.testing.assert_allclose(sphere_map_uv([0.0, 0.0, -1.0]), [0.5, 0.5])


@given(unit_vec)
def test_sphere_map_uv_in_unit_square(direction):
    uv = sphere_map_uv(direction)
    assert np.all(uv >= 0.0) and np.all(uv <= 1.0)


def test_sphere_map_uv_batch_shape():
    dirs = np.zeros((4, 5, 3))
    dirs[..., 2] = 1.0
    assert sphere_map_uv(dirs).shape == (4, 5, 2)


def test_aabb_overlap_and_touching():
    a = Aabb(np.zeros(3), np.ones(3))
    b = Aabb(np.array([0.5, 0.5, 0.5]), np.array([2.0, 2.0, 2.0]))
    c = Aabb(np.ones(3), np.full(3, 2.0))
    assert a.overlaps(b)
    assert not a.overlaps(c)  # touching faces do not count


def test_aabb_union_and_center():
    a = Aabb(np.zeros(3), np.ones(3))
    b = Aabb(np.full(3, -1.0), np.zeros(3))
    u = a.union(b)
    np.testing.assert_allclose(u.lo, -1.0)
    np.testing.assert_allclose(u.hi, 1.0)
    np.testing.assert_allclose(u.center, 0.0)
    np.testing.assert_allclose(u.size, 2.0)


def test_aabb_of_points_empty_raises():
    with pytest.raises(ValueError):
        aabb_of_points(np.empty((0, 3)))


def test_transform_identity():
    t = Transform.make()
    p = np.array([[1.0, 2.0, 3.0]])
    np.testing.assert_allclose(t.apply_points(p), p)


def test_transform_order_scale_then_rotate_then_translate():
    t = Transform.make(translation=(1.0, 0.0, 0.0),
                       rotation_deg=(0.0, 0.0, 90.0), scale=2.0)
    out = t.apply_points(np.array([1.0, 0.0, 0.0]))
    # scale to (2,0,0), rotate 90 deg about z to (0,2,0), then shift
    np.testing.assert_allclose(out, [1.0, 2.0, 0.0], atol=1e-12)


def test_transform_rotation_matrix_orthonormal():
    r = Transform.make(rotation_deg=(31.0, -47.0, 112.0)).rotation_matrix()
    np.testing.assert_allclose(r @ r.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(r) == pytest.approx(1.0)


def test_transform_normals_under_anisotropic_scale():
    # a plane squashed in y keeps a y-facing normal y-facing
    t = Transform.make(scale=(1.0, 0.25, 1.0))
    out = t.apply_normals(np.array([0.0, 1.0, 0.0]))
    np.testing.assert_allclose(out, [0.0, 1.0, 0.0], atol=1e-12)
    assert abs(np.linalg.norm(out) - 1.0) < 1e-12


@given(st.floats(-170.0, 170.0), st.floats(-80.0, 80.0), st.floats(-170.0, 170.0))
def test_transform_normals_match_points_for_rigid_motion(ax, ay, az):
    t = Transform.make(rotation_deg=(ax, ay, az))
    n = np.array([0.0, 0.0, 1.0])
    np.testing.assert_allclose(t.apply_normals(n), t.apply_points(n), atol=1e-9)


def test_look_at_basis_is_orthonormal():
    right, up, forward = look_at_basis(
        [1.0, 2.0, 3.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    for v in (right, up, forward):
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12
    assert abs(right @ up) < 1e-12
    assert abs(right @ forward) < 1e-12
    assert abs(up @ forward) < 1e-12
    np.testing.assert_allclose(np.cross(right, up), -forward, atol=1e-12)


def test_look_at_basis_forward_direction():
    _, _, forward = look_at_basis([0.0, 0.0, 5.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    np.testing.assert_allclose(forward, [0.0, 0.0, -1.0])


def test_look_at_basis_roll_rotates_about_view_axis():
    r0, u0, f0 = look_at_basis([0.0, 0.0, 5.0], [0.0, 0.0, 0.0],
                               [0.0, 1.0, 0.0])
    r90, u90, f90 = look_at_basis([0.0, 0.0, 5.0], [0.0, 0.0, 0.0],
                                  [0.0, 1.0, 0.0], roll_deg=90.0)
    np.testing.assert_allclose(f90, f0)
    np.testing.assert_allclose(r90, u0, atol=1e-12)
    np.testing.assert_allclose(u90, -r0, atol=1e-12)


def test_look_at_basis_degenerate_up_hint():
    right, up, forward = look_at_basis(
        [0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 1.0, 0.0])
    assert abs(np.linalg.norm(right) - 1.0) < 1e-12
    assert abs(right @ forward) < 1e-12
