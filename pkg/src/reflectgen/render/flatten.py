"""Flattening of a FrameSpec into the arrays the kernels consume.

Everything random was already decided by the planner; this stage is a
pure function of the spec plus the referenced assets, so rendering the
same spec twice yields identical arrays and identical images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..assets import AssetCatalog
from ..config import FRONT_DEPTH, ROOM_HEIGHT, ROOM_WIDTH
from ..geometry import Transform, look_at_basis
from ..mesh import Mesh
from ..planner import FrameSpec, PlacementSpec
from ..textures import TextureLibrary
from .bvh import build_bvh
from .kernels import MAT_COLS, M_DIFF, M_METAL, M_REFL, M_ROUGH, M_SHINE, \
    M_SPEC, M_SPECSCALAR, M_TEX

# Radiant scale applied to the unitless light intensities of the specs;
# intensities stay in [0,1], this constant carries the physical units.
LIGHT_POWER = 30.0

BG_MODES = {"BLACK": 0, "COLOR": 1, "ENVMAP": 2, "GEOMETRY": 3}

_FURNITURE_SPECULAR = (0.6, 0.6, 0.6)
_FURNITURE_SHININESS = 64.0
_OCCLUDER_SPECULAR = (0.15, 0.15, 0.15)
_OCCLUDER_SHININESS = 16.0


@dataclass
class SceneArrays:
    """Kernel-ready flat scene. Triangle arrays are in BVH order."""

    width: int
    height: int
    frame_seed: int
    cam_pos: np.ndarray
    right: np.ndarray
    up: np.ndarray
    forward: np.ndarray
    tan_x: float
    tan_y: float
    node_lo: np.ndarray
    node_hi: np.ndarray
    node_left: np.ndarray
    node_right: np.ndarray
    node_count: np.ndarray
    v0: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    n0: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    uv0: np.ndarray
    uv1: np.ndarray
    uv2: np.ndarray
    tri_mat: np.ndarray
    tri_inst: np.ndarray
    mats: np.ndarray
    tex_data: np.ndarray
    tex_off: np.ndarray
    tex_w: np.ndarray
    tex_h: np.ndarray
    lights: np.ndarray
    env: np.ndarray
    has_env: bool
    bg_mode: int
    bg_color: np.ndarray


def _quad(a, b, c, d, normal, uv_scale=0.5):
    """Two triangles for the quad a-b-c-d with a planar uv layout."""
    verts = np.array([a, b, c, d], dtype=np.float64)
    tris = np.array([[0, 1, 2], [0, 2, 3]], dtype=np.int32)
    normals = np.tile(np.asarray(normal, dtype=np.float64), (4, 1))
    # project onto the two axes spanning the quad
    n = np.argmax(np.abs(normal))
    axes = [i for i in range(3) if i != n]
    uvs = verts[:, axes] * uv_scale
    return verts, tris, normals, uvs


def _room_quads() -> dict[str, list]:
    """Interior faces of the camera half of the room, grouped by surface.

    The half-room is the box x in [-W/2, W/2], y in [0, H], z in [0, D],
    with the featured wall at z = 0 and all normals pointing inward.
    """
    hw = ROOM_WIDTH / 2.0
    h = ROOM_HEIGHT
    d = FRONT_DEPTH
    quads = {
        "wall": [_quad((-hw, 0, 0), (hw, 0, 0), (hw, h, 0), (-hw, h, 0),
                       (0.0, 0.0, 1.0))],
        "floor": [_quad((-hw, 0, 0), (-hw, 0, d), (hw, 0, d), (hw, 0, 0),
                        (0.0, 1.0, 0.0))],
        "room": [
            _quad((-hw, h, 0), (hw, h, 0), (hw, h, d), (-hw, h, d),
                  (0.0, -1.0, 0.0)),                              # ceiling
            _quad((-hw, 0, 0), (-hw, h, 0), (-hw, h, d), (-hw, 0, d),
                  (1.0, 0.0, 0.0)),                               # left
            _quad((hw, 0, 0), (hw, 0, d), (hw, h, d), (hw, h, 0),
                  (-1.0, 0.0, 0.0)),                              # right
            _quad((-hw, 0, d), (-hw, h, d), (hw, h, d), (hw, 0, d),
                  (0.0, 0.0, -1.0)),                              # behind camera
        ],
    }
    return quads


class _Builder:
    def __init__(self, textures: TextureLibrary):
        self.textures = textures
        self.verts: list[np.ndarray] = []
        self.tris: list[np.ndarray] = []
        self.normals: list[np.ndarray] = []
        self.uvs: list[np.ndarray] = []
        self.tri_mat: list[np.ndarray] = []
        self.tri_inst: list[np.ndarray] = []
        self.mats: list[list[float]] = []
        self.tex_ids: dict[str, int] = {}
        self.tex_arrays: list[np.ndarray] = []
        self._voffset = 0

    def tex_id(self, ref: str | None) -> int:
        if ref is None:
            return -1
        tid = self.tex_ids.get(ref)
        if tid is None:
            tid = len(self.tex_arrays)
            self.tex_ids[ref] = tid
            self.tex_arrays.append(
                np.ascontiguousarray(self.textures.resolve(ref), dtype=np.float32))
        return tid

    def add_material(self, row: list[float]) -> int:
        self.mats.append(row)
        return len(self.mats) - 1

    def add_geometry(self, verts, tris, normals, uvs, mat: int, inst: int):
        ntri = len(tris)
        self.verts.append(np.asarray(verts, dtype=np.float64))
        self.tris.append(np.asarray(tris, dtype=np.int64) + self._voffset)
        self.normals.append(np.asarray(normals, dtype=np.float64))
        if uvs is None:
            uvs = np.zeros((len(verts), 2))
        self.uvs.append(np.asarray(uvs, dtype=np.float64))
        self.tri_mat.append(np.full(ntri, mat, dtype=np.int32))
        self.tri_inst.append(np.full(ntri, inst, dtype=np.int32))
        self._voffset += len(verts)

    def add_mesh(self, mesh: Mesh, transform: Transform, mat: int, inst: int):
        verts = transform.apply_points(mesh.vertices)
        normals = transform.apply_normals(mesh.normals)
        if mesh.uvs is not None:
            uvs = mesh.uvs
        else:
            # planar fallback over the unit mesh footprint
            uvs = mesh.vertices[:, :2] + 0.5
        self.add_geometry(verts, mesh.triangles, normals, uvs, mat, inst)


def material_row_local(diffuse, specular, shininess, reflectivity, tex_id) -> list[float]:
    row = [0.0] * MAT_COLS
    row[M_DIFF:M_DIFF + 3] = list(diffuse)
    row[M_SPEC:M_SPEC + 3] = list(specular)
    row[M_SHINE] = float(shininess)
    row[M_REFL] = float(reflectivity)
    row[M_TEX] = float(tex_id)
    return row


def material_row_pbr(base, metalness, specular, reflectivity, roughness,
                     tex_id) -> list[float]:
    row = [0.0] * MAT_COLS
    row[M_DIFF:M_DIFF + 3] = list(base)
    row[M_METAL] = float(metalness)
    row[M_SPECSCALAR] = float(specular)
    row[M_REFL] = float(reflectivity)
    row[M_ROUGH] = float(roughness)
    row[M_TEX] = float(tex_id)
    return row


def _placement_material(builder: _Builder, spec: FrameSpec, p: PlacementSpec) -> int:
    refl = p.reflectivity if spec.reflection_on else 0.0
    tid = builder.tex_id(p.texture)
    if spec.renderer == "pbr":
        return builder.add_material(material_row_pbr(
            p.color, p.metalness, p.specular, refl, p.roughness, tid))
    return builder.add_material(material_row_local(
        p.color, _FURNITURE_SPECULAR, _FURNITURE_SHININESS, refl, tid))


def _matte_material(builder: _Builder, spec: FrameSpec, texture: str | None,
                    shiny: bool = False) -> int:
    """Non-reflective surface (room walls, occluders) for either renderer."""
    tid = builder.tex_id(texture)
    white = (1.0, 1.0, 1.0)
    if spec.renderer == "pbr":
        return builder.add_material(material_row_pbr(
            white, 0.0, 0.0, 0.0, 1.0, tid))
    specular = _OCCLUDER_SPECULAR if shiny else (0.0, 0.0, 0.0)
    return builder.add_material(material_row_local(
        white, specular, _OCCLUDER_SHININESS, 0.0, tid))


def flatten_spec(spec: FrameSpec, catalog: AssetCatalog,
                 textures: TextureLibrary,
                 include_occluders: bool = True) -> SceneArrays:
    """Resolve every reference in the spec and pack the kernel arrays.

    With include_occluders False the occluder instances are left out;
    the annotation stage uses this to measure unoccluded visibility.
    """
    builder = _Builder(textures)

    if spec.background_mode == "GEOMETRY":
        quads = _room_quads()
        for surface, pieces in quads.items():
            mat = _matte_material(builder, spec, spec.surfaces.get(surface))
            for verts, tris, normals, uvs in pieces:
                builder.add_geometry(verts, tris, normals, uvs, mat, 0)

    for p in spec.placements:
        mesh = catalog.resolve_mesh(p.model_ref)
        mat = _placement_material(builder, spec, p)
        transform = Transform.make(translation=p.position, scale=p.size)
        builder.add_mesh(mesh, transform, mat, p.instance_id)

    if include_occluders:
        for occ in spec.occluders:
            mesh = catalog.occluder(occ.kind)
            mat = _matte_material(builder, spec, occ.texture, shiny=True)
            transform = Transform.make(translation=occ.position,
                                       rotation_deg=occ.rotation_deg,
                                       scale=occ.scale)
            builder.add_mesh(mesh, transform, mat, occ.instance_id)

    if builder.verts:
        verts = np.concatenate(builder.verts)
        tris = np.concatenate(builder.tris)
        normals = np.concatenate(builder.normals)
        uvs = np.concatenate(builder.uvs)
        tri_mat = np.concatenate(builder.tri_mat)
        tri_inst = np.concatenate(builder.tri_inst)
    else:
        verts = np.zeros((0, 3))
        tris = np.zeros((0, 3), dtype=np.int64)
        normals = np.zeros((0, 3))
        uvs = np.zeros((0, 2))
        tri_mat = np.zeros(0, dtype=np.int32)
        tri_inst = np.zeros(0, dtype=np.int32)

    va = verts[tris[:, 0]]
    vb = verts[tris[:, 1]]
    vc = verts[tris[:, 2]]
    bvh = build_bvh(va, vb, vc)
    order = bvh.order

    cam = spec.camera
    right, up, forward = look_at_basis(cam.position, cam.target,
                                       (0.0, 1.0, 0.0), cam.roll_deg)
    tan_y = math.tan(math.radians(cam.fov_deg) / 2.0)
    tan_x = tan_y * (spec.width / spec.height) * cam.aspect_scale

    lights = np.zeros((len(spec.lights), 9), dtype=np.float64)
    for i, light in enumerate(spec.lights):
        lights[i, 0] = 1.0 if light.kind == "spot" else 0.0
        lights[i, 1:4] = light.position
        lights[i, 4] = light.intensity
        lights[i, 5:8] = light.direction
        lights[i, 8] = math.cos(math.radians(light.cone_angle_deg) / 2.0)

    if builder.tex_arrays:
        flats = [a.ravel() for a in builder.tex_arrays]
        tex_data = np.concatenate(flats).astype(np.float32)
        sizes = np.array([a.size for a in builder.tex_arrays], dtype=np.int64)
        tex_off = np.concatenate(([0], np.cumsum(sizes)[:-1])).astype(np.int64)
        tex_w = np.array([a.shape[1] for a in builder.tex_arrays], dtype=np.int32)
        tex_h = np.array([a.shape[0] for a in builder.tex_arrays], dtype=np.int32)
    else:
        tex_data = np.zeros(1, dtype=np.float32)
        tex_off = np.zeros(1, dtype=np.int64)
        tex_w = np.ones(1, dtype=np.int32)
        tex_h = np.ones(1, dtype=np.int32)

    has_env = spec.environment is not None
    if has_env:
        env = np.ascontiguousarray(textures.resolve(spec.environment),
                                   dtype=np.float32)
    else:
        env = np.zeros((1, 1, 3), dtype=np.float32)

    bg_color = np.zeros(3)
    if spec.background_color is not None:
        bg_color[:] = spec.background_color

    mats = (np.asarray(builder.mats, dtype=np.float64)
            if builder.mats else np.zeros((1, MAT_COLS)))

    return SceneArrays(
        width=spec.width,
        height=spec.height,
        frame_seed=spec.seed,
        cam_pos=np.asarray(cam.position, dtype=np.float64),
        right=right, up=up, forward=forward,
        tan_x=float(tan_x), tan_y=float(tan_y),
        node_lo=bvh.node_lo, node_hi=bvh.node_hi,
        node_left=bvh.node_left, node_right=bvh.node_right,
        node_count=bvh.node_count,
        v0=np.ascontiguousarray(va[order]),
        e1=np.ascontiguousarray(vb[order] - va[order]),
        e2=np.ascontiguousarray(vc[order] - va[order]),
        n0=np.ascontiguousarray(normals[tris[order, 0]]),
        n1=np.ascontiguousarray(normals[tris[order, 1]]),
        n2=np.ascontiguousarray(normals[tris[order, 2]]),
        uv0=np.ascontiguousarray(uvs[tris[order, 0]]),
        uv1=np.ascontiguousarray(uvs[tris[order, 1]]),
        uv2=np.ascontiguousarray(uvs[tris[order, 2]]),
        tri_mat=np.ascontiguousarray(tri_mat[order]),
        tri_inst=np.ascontiguousarray(tri_inst[order]),
        mats=mats,
        tex_data=tex_data, tex_off=tex_off, tex_w=tex_w, tex_h=tex_h,
        lights=lights,
        env=env, has_env=has_env,
        bg_mode=BG_MODES[spec.background_mode],
        bg_color=bg_color,
    )
