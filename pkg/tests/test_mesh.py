import numpy as np
import pytest

from reflectgen.geometry import Transform
from reflectgen.mesh import (EmptyMeshError, MeshParseError, build_mesh,
                             compute_vertex_normals, dumps_mesh, loads_mesh)

CUBE = """
# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 4 3 2
f 5 6 7 8
f 1 2 6 5
f 2 3 7 6
f 3 4 8 7
f 4 1 5 8
"""


def test_parse_cube_counts():
    mesh = loads_mesh(CUBE)
    assert len(mesh.vertices) == 8
    assert len(mesh.triangles) == 12  # quads fan-triangulated


def test_parse_cube_bounds():
    mesh = loads_mesh(CUBE)
    np.testing.assert_allclose(mesh.aabb.lo, 0.0)
    np.testing.assert_allclose(mesh.aabb.hi, 1.0)


def test_parse_error_reports_line_number():
    with pytest.raises(MeshParseError, match="line 3"):
        loads_mesh("v 0 0 0\nv 1 0 0\nf 1 2 9\n")


def test_malformed_vertex_record():
    with pytest.raises(MeshParseError, match="line 1"):
        loads_mesh("v 0 zero 0\n")


def test_face_with_too_few_vertices():
    with pytest.raises(MeshParseError):
        loads_mesh("v 0 0 0\nv 1 0 0\nf 1 2\n")


def test_empty_mesh_rejected():
    with pytest.raises(EmptyMeshError):
        loads_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\n")


def test_degenerate_faces_dropped():
    text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\nf 1 1 2\n"
    assert len(loads_mesh(text).triangles) == 1


def test_corner_attributes_split_vertices():
    text = ("v 0 0 0\nv 1 0 0\nv 0 1 0\n"
            "vt 0 0\nvt 1 0\nvt 0 1\n"
            "f 1/1 2/2 3/3\n")
    mesh = loads_mesh(text)
    assert mesh.uvs is not None
    np.testing.assert_allclose(mesh.uvs, [[0, 0], [1, 0], [0, 1]])


def test_normals_are_unit_length():
    mesh = loads_mesh(CUBE)
    np.testing.assert_allclose(np.linalg.norm(mesh.normals, axis=1), 1.0)


def test_computed_normals_point_outward_on_cube():
    mesh = loads_mesh(CUBE)
    center = mesh.aabb.center
    outward = np.sum((mesh.vertices - center) * mesh.normals, axis=1)
    assert np.all(outward > 0)


def test_compute_vertex_normals_flat_triangle():
    verts = np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 0, -1.0]])
    tris = np.array([[0, 1, 2]])
    n = compute_vertex_normals(verts, tris)
    np.testing.assert_allclose(n, [[0, 1, 0]] * 3, atol=1e-12)


def test_normalized_centers_and_scales():
    mesh = loads_mesh(CUBE).normalized(max_dimension=2.0)
    np.testing.assert_allclose(mesh.aabb.center, 0.0, atol=1e-12)
    assert mesh.aabb.size.max() == pytest.approx(2.0)


def test_transformed_moves_vertices_not_topology():
    mesh = loads_mesh(CUBE)
    moved = mesh.transformed(Transform.make(translation=(5.0, 0.0, 0.0)))
    np.testing.assert_array_equal(moved.triangles, mesh.triangles)
    np.testing.assert_allclose(moved.aabb.lo, [5.0, 0.0, 0.0])


def test_dump_load_round_trip():
    mesh = loads_mesh(CUBE)
    again = loads_mesh(dumps_mesh(mesh))
    np.testing.assert_allclose(again.vertices, mesh.vertices)
    np.testing.assert_array_equal(again.triangles, mesh.triangles)
    np.testing.assert_allclose(again.normals, mesh.normals, atol=1e-7)


def test_build_mesh_index_out_of_range():
    with pytest.raises(Exception, match="out of range"):
        build_mesh(np.zeros((2, 3)), np.array([[0, 1, 2]]))
