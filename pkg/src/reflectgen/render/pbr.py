"""Physically based renderer: unidirectional path tracing.

Light transport splits cleanly by source type. Point and spot lights
are delta emitters and contribute through next-event estimation only;
the environment map contributes through escaped scatter rays only, so
no path can count a light twice. Russian roulette starts after a few
bounces and a radiance clamp caps fireflies.

Every sample draws from its own counter-based random stream keyed by
(frame seed, pixel index, sample index), which makes renders
deterministic and independent of threading.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..assets import AssetCatalog
from ..planner import FrameSpec
from ..textures import TextureLibrary
from . import kernels
from .flatten import LIGHT_POWER, SceneArrays, flatten_spec
from .image_io import RenderedFrame, encode_color

DEFAULT_SPP = 16


@dataclass(frozen=True)
class PathTracerSettings:
    samples_per_pixel: int = DEFAULT_SPP
    max_depth: int = 8
    roulette_start_depth: int = 3
    clamp: float = 40.0

    def __post_init__(self):
        if self.samples_per_pixel < 1:
            raise ValueError("samples_per_pixel must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.roulette_start_depth < 1:
            raise ValueError("roulette_start_depth must be >= 1")
        if self.clamp <= 0:
            raise ValueError("clamp must be positive")


def trace_path(origin, direction, scene: SceneArrays,
               settings: PathTracerSettings, sample_seed: int) -> np.ndarray:
    """One radiance sample along an explicit ray; mainly for testing."""
    origin = np.asarray(origin, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    direction = direction / np.linalg.norm(direction)
    state = np.uint64(kernels.seed_stream(
        np.uint64(sample_seed), np.uint64(0), np.uint64(0)))
    r, g, b = kernels.path_radiance(
        origin[0], origin[1], origin[2],
        direction[0], direction[1], direction[2], state,
        scene.node_lo, scene.node_hi, scene.node_left, scene.node_right,
        scene.node_count,
        scene.v0, scene.e1, scene.e2, scene.n0, scene.n1, scene.n2,
        scene.uv0, scene.uv1, scene.uv2, scene.tri_mat,
        scene.mats, scene.tex_data, scene.tex_off, scene.tex_w, scene.tex_h,
        scene.lights, scene.env, scene.has_env, scene.bg_color,
        scene.right, scene.up, scene.forward,
        settings.max_depth, settings.roulette_start_depth, settings.clamp,
        LIGHT_POWER, np.empty(64, dtype=np.int32), np.empty(64, dtype=np.float64))
    return np.array([r, g, b])


def render_pbr_arrays(scene: SceneArrays,
                      settings: PathTracerSettings) -> RenderedFrame:
    color = np.zeros((scene.height, scene.width, 3), dtype=np.float64)
    ids = np.zeros((scene.height, scene.width), dtype=np.int32)
    kernels.render_pbr_kernel(
        scene.width, scene.height, scene.cam_pos, scene.right, scene.up,
        scene.forward, scene.tan_x, scene.tan_y,
        scene.node_lo, scene.node_hi, scene.node_left, scene.node_right,
        scene.node_count,
        scene.v0, scene.e1, scene.e2, scene.n0, scene.n1, scene.n2,
        scene.uv0, scene.uv1, scene.uv2, scene.tri_mat, scene.tri_inst,
        scene.mats, scene.tex_data, scene.tex_off, scene.tex_w, scene.tex_h,
        scene.lights, scene.env, scene.has_env, scene.bg_color,
        np.uint64(scene.frame_seed), settings.samples_per_pixel, settings.max_depth,
        settings.roulette_start_depth, settings.clamp, LIGHT_POWER,
        color, ids)
    return RenderedFrame(color=encode_color(color), ids=ids.astype(np.uint16))


def render_pbr_frame(spec: FrameSpec, catalog: AssetCatalog,
                     textures: TextureLibrary,
                     settings: PathTracerSettings | None = None) -> RenderedFrame:
    if spec.renderer != "pbr":
        raise ValueError(f"spec requests renderer {spec.renderer!r}")
    settings = settings or PathTracerSettings()
    return render_pbr_arrays(flatten_spec(spec, catalog, textures), settings)
