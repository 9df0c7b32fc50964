"""Triangle meshes and the plain-text mesh format.

The format is line oriented, one record per line, 1-based indices:

    v  x y z          vertex position
    vn x y z          vertex normal (optional; computed when absent)
    vt u v            texture coordinate in [0,1]^2 (optional)
    f  i j k [l ...]  polygon; each index may be i, i/t, or i/t/n
    #  comment

Polygons are fan-triangulated at load. Degenerate (zero-area)
triangles are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import Aabb, Transform, aabb_of_points


class MeshError(Exception):
    """Base class for mesh ingestion failures."""


class MeshParseError(MeshError):
    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EmptyMeshError(MeshError):
    pass


@dataclass(frozen=True)
class Mesh:
    """Immutable triangle mesh.

    vertices: (n,3) float64; triangles: (m,3) int32 vertex indices;
    normals: (n,3) unit per-vertex normals; uvs: (n,2) or None.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    normals: np.ndarray
    uvs: np.ndarray | None = None

    def __post_init__(self):
        if len(self.triangles) == 0:
            raise EmptyMeshError("mesh has no triangles")
        if self.triangles.max() >= len(self.vertices):
            raise MeshError("triangle index out of range")

    @property
    def aabb(self) -> Aabb:
        return aabb_of_points(self.vertices)

    def transformed(self, transform: Transform) -> "Mesh":
        return Mesh(
            vertices=transform.apply_points(self.vertices),
            triangles=self.triangles,
            normals=transform.apply_normals(self.normals),
            uvs=self.uvs,
        )

    def normalized(self, max_dimension: float = 1.0) -> "Mesh":
        """Center at the origin and scale the largest extent to max_dimension."""
        box = self.aabb
        extent = float(box.size.max())
        if extent <= 0:
            raise MeshError("mesh has zero extent")
        s = max_dimension / extent
        return Mesh(
            vertices=(self.vertices - box.center) * s,
            triangles=self.triangles,
            normals=self.normals,
            uvs=self.uvs,
        )


def compute_vertex_normals(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Area-weighted per-vertex normals from face geometry, unit length."""
    v0 = vertices[triangles[:, 0]]
    v1 = vertices[triangles[:, 1]]
    v2 = vertices[triangles[:, 2]]
    face_n = np.cross(v1 - v0, v2 - v0)  # magnitude = 2*area, weights the average
    normals = np.zeros_like(vertices)
    for k in range(3):
        np.add.at(normals, triangles[:, k], face_n)
    lengths = np.linalg.norm(normals, axis=1, keepdims=True)
    # isolated or fully-degenerate vertices get an arbitrary up normal
    bad = lengths[:, 0] < 1e-12
    normals[bad] = (0.0, 1.0, 0.0)
    lengths[bad] = 1.0
    return normals / lengths


def _triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    v0 = vertices[triangles[:, 0]]
    v1 = vertices[triangles[:, 1]]
    v2 = vertices[triangles[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(v1 - v0, v2 - v0), axis=1)


def build_mesh(vertices, triangles, normals=None, uvs=None) -> Mesh:
    """Assemble a Mesh, computing normals if absent and dropping degenerate faces."""
    vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    triangles = np.asarray(triangles, dtype=np.int32).reshape(-1, 3)
    if len(triangles) and triangles.max() >= len(vertices):
        raise MeshError("triangle index out of range")
    if len(triangles):
        keep = _triangle_areas(vertices, triangles) > 1e-14
        triangles = triangles[keep]
    if len(triangles) == 0:
        raise EmptyMeshError("mesh has no non-degenerate triangles")
    if normals is None:
        normals = compute_vertex_normals(vertices, triangles)
    else:
        normals = np.asarray(normals, dtype=np.float64).reshape(-1, 3)
        lengths = np.linalg.norm(normals, axis=1, keepdims=True)
        normals = normals / np.where(lengths < 1e-12, 1.0, lengths)
    if uvs is not None:
        uvs = np.asarray(uvs, dtype=np.float64).reshape(-1, 2)
    return Mesh(vertices=vertices, triangles=triangles, normals=normals, uvs=uvs)


def loads_mesh(text: str) -> Mesh:
    """Parse the text mesh format. Raises MeshParseError with the line number."""
    positions: list[list[float]] = []
    raw_normals: list[list[float]] = []
    raw_uvs: list[list[float]] = []
    # corner key (vi, ti, ni) -> output vertex index, so per-corner
    # attributes become per-vertex
    corner_index: dict[tuple[int, int, int], int] = {}
    out_pos: list[list[float]] = []
    out_uv: list[list[float]] = []
    out_nrm: list[list[float]] = []
    faces: list[list[int]] = []
    any_uv = False
    any_nrm = False

    def corner(token: str, lineno: int) -> int:
        nonlocal any_uv, any_nrm
        parts = token.split("/")
        try:
            vi = int(parts[0])
            ti = int(parts[1]) if len(parts) > 1 and parts[1] else 0
            ni = int(parts[2]) if len(parts) > 2 and parts[2] else 0
        except ValueError:
            raise MeshParseError(f"bad face token {token!r}", lineno) from None
        if not (1 <= vi <= len(positions)):
            raise MeshParseError(
                f"face references vertex {vi} of {len(positions)}", lineno)
        if ti and not (1 <= ti <= len(raw_uvs)):
            raise MeshParseError(
                f"face references texture coordinate {ti} of {len(raw_uvs)}", lineno)
        if ni and not (1 <= ni <= len(raw_normals)):
            raise MeshParseError(
                f"face references normal {ni} of {len(raw_normals)}", lineno)
        key = (vi, ti, ni)
        idx = corner_index.get(key)
        if idx is None:
            idx = len(out_pos)
            corner_index[key] = idx
            out_pos.append(positions[vi - 1])
            out_uv.append(raw_uvs[ti - 1] if ti else [0.0, 0.0])
            out_nrm.append(raw_normals[ni - 1] if ni else [0.0, 0.0, 0.0])
            if ti:
                any_uv = True
            if ni:
                any_nrm = True
        return idx

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        kind, args = fields[0], fields[1:]
        try:
            if kind == "v":
                positions.append([float(x) for x in args[:3]])
                if len(args) < 3:
                    raise IndexError
            elif kind == "vn":
                raw_normals.append([float(x) for x in args[:3]])
                if len(args) < 3:
                    raise IndexError
            elif kind == "vt":
                raw_uvs.append([float(x) for x in args[:2]])
                if len(args) < 2:
                    raise IndexError
            elif kind == "f":
                if len(args) < 3:
                    raise MeshParseError("face needs at least 3 vertices", lineno)
                idx = [corner(tok, lineno) for tok in args]
                for k in range(1, len(idx) - 1):  # fan triangulation
                    faces.append([idx[0], idx[k], idx[k + 1]])
            # unknown record kinds are ignored for forward compatibility
        except (ValueError, IndexError):
            raise MeshParseError(f"malformed {kind!r} record", lineno) from None

    if not faces:
        raise EmptyMeshError("mesh file contains no faces")
    return build_mesh(
        out_pos,
        faces,
        normals=np.asarray(out_nrm) if any_nrm else None,
        uvs=np.asarray(out_uv) if any_uv else None,
    )


def load_mesh(path: str | Path) -> Mesh:
    return loads_mesh(Path(path).read_text())


def dumps_mesh(mesh: Mesh) -> str:
    """Serialize a Mesh back to the text format (positions, uvs, normals, faces)."""
    lines = []
    for v in mesh.vertices:
        lines.append(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}")
    has_uv = mesh.uvs is not None
    if has_uv:
        for t in mesh.uvs:
            lines.append(f"vt {t[0]:.9g} {t[1]:.9g}")
    for n in mesh.normals:
        lines.append(f"vn {n[0]:.9g} {n[1]:.9g} {n[2]:.9g}")
    for tri in mesh.triangles:
        if has_uv:
            lines.append("f " + " ".join(f"{i+1}/{i+1}/{i+1}" for i in tri))
        else:
            lines.append("f " + " ".join(f"{i+1}//{i+1}" for i in tri))
    return "\n".join(lines) + "\n"


def compute_world_aabb(mesh: Mesh, transform: Transform) -> Aabb:
    """Exact AABB of the transformed vertices."""
    return aabb_of_points(transform.apply_points(mesh.vertices))
