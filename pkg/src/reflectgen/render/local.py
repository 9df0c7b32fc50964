"""Blinn-Phong ray caster.

One primary ray per pixel, ambient plus per-light diffuse/specular
terms, no shadow rays. Reflections come from the environment map only,
blended by the material's reflectivity; with reflectivity zero the
blend is the identity, so a frame with reflections disabled is
bit-identical to one whose materials simply do not reflect.
"""

from __future__ import annotations

import numpy as np

from ..assets import AssetCatalog
from ..planner import FrameSpec
from ..textures import TextureLibrary
from . import kernels
from .flatten import SceneArrays, flatten_spec
from .image_io import RenderedFrame, encode_color

AMBIENT = kernels.AMBIENT


def shade_blinn_phong(normal, view, light_dir, diffuse, specular, shininess,
                      intensity=1.0):
    """Single-light Blinn-Phong radiance, the kernel's reference formula.

    All direction arguments are unit vectors pointing away from the
    surface. Vectorized over leading axes; returns (..., 3).
    """
    normal = np.asarray(normal, dtype=np.float64)
    view = np.asarray(view, dtype=np.float64)
    light_dir = np.asarray(light_dir, dtype=np.float64)
    diffuse = np.asarray(diffuse, dtype=np.float64)
    specular = np.asarray(specular, dtype=np.float64)
    ndotl = np.maximum(np.sum(normal * light_dir, axis=-1, keepdims=True), 0.0)
    half = light_dir + view
    hlen = np.linalg.norm(half, axis=-1, keepdims=True)
    half = np.divide(half, hlen, out=np.zeros_like(half), where=hlen > 1e-9)
    ndoth = np.maximum(np.sum(normal * half, axis=-1, keepdims=True), 0.0)
    spec_term = np.where(ndotl > 0.0, ndoth ** shininess, 0.0)
    return intensity * (diffuse * ndotl + specular * spec_term)


def render_local_arrays(scene: SceneArrays) -> RenderedFrame:
    color = np.zeros((scene.height, scene.width, 3), dtype=np.float64)
    ids = np.zeros((scene.height, scene.width), dtype=np.int32)
    kernels.render_local_kernel(
        scene.width, scene.height, scene.cam_pos, scene.right, scene.up,
        scene.forward, scene.tan_x, scene.tan_y,
        scene.node_lo, scene.node_hi, scene.node_left, scene.node_right,
        scene.node_count,
        scene.v0, scene.e1, scene.e2, scene.n0, scene.n1, scene.n2,
        scene.uv0, scene.uv1, scene.uv2, scene.tri_mat, scene.tri_inst,
        scene.mats, scene.tex_data, scene.tex_off, scene.tex_w, scene.tex_h,
        scene.lights, scene.env, scene.has_env, scene.bg_mode, scene.bg_color,
        color, ids)
    return RenderedFrame(color=encode_color(color), ids=ids.astype(np.uint16))


def render_local_frame(spec: FrameSpec, catalog: AssetCatalog,
                       textures: TextureLibrary) -> RenderedFrame:
    if spec.renderer != "local":
        raise ValueError(f"spec requests renderer {spec.renderer!r}")
    return render_local_arrays(flatten_spec(spec, catalog, textures))


def render_id_frame(spec: FrameSpec, catalog: AssetCatalog,
                    textures: TextureLibrary,
                    include_occluders: bool = True) -> np.ndarray:
    """Instance ids from primary visibility only; (h, w) uint16."""
    scene = flatten_spec(spec, catalog, textures,
                         include_occluders=include_occluders)
    ids = np.zeros((scene.height, scene.width), dtype=np.int32)
    kernels.render_id_kernel(
        scene.width, scene.height, scene.cam_pos, scene.right, scene.up,
        scene.forward, scene.tan_x, scene.tan_y,
        scene.node_lo, scene.node_hi, scene.node_left, scene.node_right,
        scene.node_count, scene.v0, scene.e1, scene.e2, scene.tri_inst, ids)
    return ids.astype(np.uint16)
