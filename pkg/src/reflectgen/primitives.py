"""Procedural primitive meshes.

These serve two roles: the eight occluder types thrown into randomized
scenes (pyramid, box, cone, cylinder, sphere, teapot, torus, tube), and
parametric stand-in meshes for the furniture classes. All builders
return unit-scale meshes with texture coordinates.
"""

from __future__ import annotations

import numpy as np

from .geometry import Transform
from .mesh import Mesh, build_mesh

OCCLUDER_TYPES = ("pyramid", "box", "cone", "cylinder", "sphere", "teapot", "torus", "tube")


def merge_meshes(meshes: list[Mesh]) -> Mesh:
    vertices = []
    triangles = []
    normals = []
    uvs = []
    offset = 0
    for m in meshes:
        vertices.append(m.vertices)
        triangles.append(m.triangles + offset)
        normals.append(m.normals)
        uvs.append(m.uvs if m.uvs is not None else np.zeros((len(m.vertices), 2)))
        offset += len(m.vertices)
    return build_mesh(
        np.concatenate(vertices),
        np.concatenate(triangles),
        normals=np.concatenate(normals),
        uvs=np.concatenate(uvs),
    )


def quad(corner: np.ndarray, edge_u: np.ndarray, edge_v: np.ndarray) -> Mesh:
    """Two-triangle rectangle; normal = edge_u x edge_v."""
    corner = np.asarray(corner, dtype=np.float64)
    edge_u = np.asarray(edge_u, dtype=np.float64)
    edge_v = np.asarray(edge_v, dtype=np.float64)
    verts = np.array([corner, corner + edge_u, corner + edge_u + edge_v, corner + edge_v])
    tris = np.array([[0, 1, 2], [0, 2, 3]])
    uvs = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    return build_mesh(verts, tris, uvs=uvs)


def box(w: float = 1.0, h: float = 1.0, d: float = 1.0) -> Mesh:
    """Axis-aligned box centered at the origin, flat-shaded faces."""
    hw, hh, hd = w / 2, h / 2, d / 2
    faces = [
        quad((-hw, -hh, hd), (w, 0, 0), (0, h, 0)),     # +z
        quad((hw, -hh, -hd), (-w, 0, 0), (0, h, 0)),    # -z
        quad((hw, -hh, hd), (0, 0, -d), (0, h, 0)),     # +x
        quad((-hw, -hh, -hd), (0, 0, d), (0, h, 0)),    # -x
        quad((-hw, hh, hd), (w, 0, 0), (0, 0, -d)),     # +y
        quad((-hw, -hh, -hd), (w, 0, 0), (0, 0, d)),    # -y
    ]
    return merge_meshes(faces)


def pyramid(base: float = 1.0, height: float = 1.0) -> Mesh:
    hb = base / 2
    hy = height / 2
    verts = [(-hb, -hy, -hb), (hb, -hy, -hb), (hb, -hy, hb), (-hb, -hy, hb), (0.0, hy, 0.0)]
    tris = [[0, 2, 1], [0, 3, 2], [0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]]
    uvs = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
    return build_mesh(verts, tris, uvs=uvs)


def _lathe(profile_rz: np.ndarray, segments: int, cap_top: bool = True,
           cap_bottom: bool = True) -> Mesh:
    """Revolve a (radius, y) profile about the +y axis with smooth normals."""
    profile_rz = np.asarray(profile_rz, dtype=np.float64)
    n_prof = len(profile_rz)
    ang = np.linspace(0.0, 2 * np.pi, segments + 1)  # duplicated seam for clean uvs
    verts = []
    uvs = []
    for j, (r, y) in enumerate(profile_rz):
        for a in ang:
            verts.append((r * np.cos(a), y, r * np.sin(a)))
            uvs.append((a / (2 * np.pi), j / max(n_prof - 1, 1)))
    cols = segments + 1
    tris = []
    for j in range(n_prof - 1):
        for i in range(segments):
            a = j * cols + i
            b = a + 1
            c = a + cols
            d = c + 1
            tris.append([a, c, b])
            tris.append([b, c, d])
    verts = np.asarray(verts)
    uvs = np.asarray(uvs)
    tris = np.asarray(tris, dtype=np.int32)
    parts = [(verts, tris, uvs)]
    for do_cap, j, flip in ((cap_bottom, 0, False), (cap_top, n_prof - 1, True)):
        r, y = profile_rz[j]
        if not do_cap or r <= 1e-9:
            continue
        ring = verts[j * cols:(j + 1) * cols]
        center = np.array([[0.0, y, 0.0]])
        cv = np.concatenate([ring, center])
        ct = []
        for i in range(segments):
            tri = [i, i + 1, len(ring)]
            if flip:
                tri = tri[::-1]
            ct.append(tri)
        cuv = np.concatenate([uvs[j * cols:(j + 1) * cols], [[0.5, 0.5]]])
        parts.append((cv, np.asarray(ct, dtype=np.int32), cuv))
    out_v, out_t, out_u = [], [], []
    off = 0
    for v, t, u in parts:
        out_v.append(v)
        out_t.append(t + off)
        out_u.append(u)
        off += len(v)
    v = np.concatenate(out_v)
    t = np.concatenate(out_t)
    u = np.concatenate(out_u)
    return build_mesh(v, t, uvs=u)


def cone(radius: float = 0.5, height: float = 1.0, segments: int = 16) -> Mesh:
    hy = height / 2
    profile = [(radius, -hy), (radius * 0.5, 0.0), (1e-4, hy)]
    return _lathe(np.asarray(profile), segments, cap_top=False)


def cylinder(radius: float = 0.5, height: float = 1.0, segments: int = 16) -> Mesh:
    hy = height / 2
    return _lathe(np.array([(radius, -hy), (radius, hy)]), segments)


def sphere(radius: float = 0.5, segments: int = 16, rings: int = 10) -> Mesh:
    t = np.linspace(-np.pi / 2, np.pi / 2, rings + 1)
    profile = np.stack([np.maximum(radius * np.cos(t), 1e-4), radius * np.sin(t)], axis=1)
    m = _lathe(profile, segments, cap_top=False, cap_bottom=False)
    # exact analytic normals for a sphere
    normals = m.vertices / np.linalg.norm(m.vertices, axis=1, keepdims=True)
    return build_mesh(m.vertices, m.triangles, normals=normals, uvs=m.uvs)


def torus(major: float = 0.35, minor: float = 0.15, segments: int = 16, sides: int = 10) -> Mesh:
    u = np.linspace(0.0, 2 * np.pi, segments + 1)
    v = np.linspace(0.0, 2 * np.pi, sides + 1)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    x = (major + minor * np.cos(vv)) * np.cos(uu)
    y = minor * np.sin(vv)
    z = (major + minor * np.cos(vv)) * np.sin(uu)
    verts = np.stack([x, y, z], axis=-1).reshape(-1, 3)
    cx = major * np.cos(uu)
    cz = major * np.sin(uu)
    centers = np.stack([cx, np.zeros_like(cx), cz], axis=-1).reshape(-1, 3)
    normals = verts - centers
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    uvs = np.stack([uu / (2 * np.pi), vv / (2 * np.pi)], axis=-1).reshape(-1, 2)
    cols = sides + 1
    tris = []
    for i in range(segments):
        for j in range(sides):
            a = i * cols + j
            b = a + 1
            c = a + cols
            d = c + 1
            tris.append([a, b, c])
            tris.append([b, d, c])
    return build_mesh(verts, np.asarray(tris, dtype=np.int32), normals=normals, uvs=uvs)


def tube(outer: float = 0.5, inner: float = 0.3, height: float = 1.0, segments: int = 16) -> Mesh:
    """Hollow cylinder: outer wall, inner wall, and flat ring caps."""
    hy = height / 2
    profile = [(inner, hy), (inner, -hy), (outer, -hy), (outer, hy), (inner, hy)]
    return _lathe(np.asarray(profile), segments, cap_top=False, cap_bottom=False)


def teapot(segments: int = 14) -> Mesh:
    """A classic-silhouette teapot built from a lathe body, lid, spout and handle."""
    body_profile = np.array([
        (0.02, -0.40), (0.28, -0.38), (0.38, -0.20), (0.40, 0.00),
        (0.36, 0.18), (0.26, 0.30), (0.22, 0.33),
    ])
    body = _lathe(body_profile, segments, cap_top=False)
    lid_profile = np.array([(0.23, 0.33), (0.16, 0.40), (0.06, 0.44), (0.05, 0.50), (1e-4, 0.55)])
    lid = _lathe(lid_profile, segments, cap_top=False, cap_bottom=False)
    spout = cone(radius=0.09, height=0.55, segments=12).transformed(
        Transform.make(translation=(0.48, 0.05, 0.0), rotation_deg=(0.0, 0.0, -55.0)))
    handle = torus(major=0.20, minor=0.05, segments=16, sides=8).transformed(
        Transform.make(translation=(-0.42, 0.02, 0.0), rotation_deg=(90.0, 0.0, 0.0)))
    return merge_meshes([body, lid, spout, handle])


_OCCLUDER_BUILDERS = {
    "pyramid": pyramid,
    "box": box,
    "cone": cone,
    "cylinder": cylinder,
    "sphere": sphere,
    "teapot": teapot,
    "torus": torus,
    "tube": tube,
}


def occluder_mesh(kind: str) -> Mesh:
    """Unit-normalized occluder mesh by type name."""
    try:
        builder = _OCCLUDER_BUILDERS[kind]
    except KeyError:
        raise ValueError(f"unknown occluder type {kind!r}; expected one of {OCCLUDER_TYPES}") from None
    return builder().normalized()


def _rounded_block(w, h, d, segments=12) -> Mesh:
    """Box with a half-cylinder front edge; the basic ceramic-fixture silhouette."""
    body = box(w, h, d * 0.7).transformed(Transform.make(translation=(0, 0, -d * 0.15)))
    front = cylinder(radius=h / 2, height=w, segments=segments).transformed(
        Transform.make(translation=(0, 0, d * 0.2), rotation_deg=(0.0, 0.0, 90.0)))
    return merge_meshes([body, front])


def furniture_standin(class_name: str, variant: int = 0) -> Mesh:
    """Parametric stand-in for a furniture class, unit-normalized.

    `variant` nudges proportions so sub-classes within a class are
    geometrically distinct but strongly resembling.
    """
    k = 1.0 + 0.08 * variant
    if class_name == "sink_small":
        m = merge_meshes([
            _rounded_block(1.0, 0.35 * k, 0.7),
            box(0.8, 0.12, 0.5).transformed(Transform.make(translation=(0, 0.24 * k, 0.05))),
        ])
    elif class_name == "sink_large":
        m = merge_meshes([
            _rounded_block(1.5, 0.4 * k, 0.8),
            box(1.3, 0.14, 0.6).transformed(Transform.make(translation=(0, 0.27 * k, 0.05))),
        ])
    elif class_name == "sink_double":
        basin = _rounded_block(0.9, 0.35 * k, 0.75)
        m = merge_meshes([
            basin.transformed(Transform.make(translation=(-0.55, 0, 0))),
            basin.transformed(Transform.make(translation=(0.55, 0, 0))),
            box(2.1, 0.1, 0.8).transformed(Transform.make(translation=(0, 0.22 * k, 0))),
        ])
    elif class_name == "toilet_cornered":
        m = merge_meshes([
            box(0.55, 0.45 * k, 0.75),
            box(0.45, 0.1, 0.65).transformed(Transform.make(translation=(0, 0.27 * k, 0.03))),
        ])
    elif class_name == "toilet_rounded":
        m = merge_meshes([
            _rounded_block(0.55, 0.42 * k, 0.8),
            cylinder(radius=0.22, height=0.1, segments=16).transformed(
                Transform.make(translation=(0, 0.25 * k, 0.12))),
        ])
    elif class_name == "urinal_lid":
        m = merge_meshes([
            _rounded_block(0.45, 0.8 * k, 0.35),
            box(0.4, 0.12, 0.3).transformed(Transform.make(translation=(0, 0.45 * k, 0.02))),
        ])
    elif class_name == "urinal_nolid":
        m = _rounded_block(0.45, 0.85 * k, 0.35)
    elif class_name == "bidet":
        m = merge_meshes([
            _rounded_block(0.5, 0.4 * k, 0.7),
            tube(outer=0.2, inner=0.14, height=0.08, segments=16).transformed(
                Transform.make(translation=(0, 0.23 * k, 0.1))),
        ])
    elif class_name == "tap":
        m = merge_meshes([
            cylinder(radius=0.08, height=0.5, segments=12),
            cylinder(radius=0.05, height=0.45 * k, segments=12).transformed(
                Transform.make(translation=(0, 0.2, 0.15), rotation_deg=(90.0, 0.0, 0.0))),
        ])
    else:
        raise ValueError(f"no stand-in builder for class {class_name!r}")
    return m.normalized()
