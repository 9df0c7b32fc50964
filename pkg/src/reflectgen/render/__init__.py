"""Rendering backends: a fast local-illumination ray caster and a
physically based path tracer, sharing one BVH and one scene layout."""

from __future__ import annotations

from ..assets import AssetCatalog
from ..planner import FrameSpec
from ..textures import TextureLibrary
from .image_io import RenderedFrame
from .local import render_id_frame, render_local_frame
from .pbr import PathTracerSettings, render_pbr_frame

__all__ = [
    "PathTracerSettings",
    "RenderedFrame",
    "render_frame",
    "render_id_frame",
    "render_local_frame",
    "render_pbr_frame",
]


def render_frame(spec: FrameSpec, catalog: AssetCatalog,
                 textures: TextureLibrary,
                 settings: PathTracerSettings | None = None) -> RenderedFrame:
    """Render a frame with whichever backend its spec requests."""
    if spec.renderer == "pbr":
        return render_pbr_frame(spec, catalog, textures, settings)
    if spec.renderer == "local":
        return render_local_frame(spec, catalog, textures)
    raise ValueError(f"unknown renderer {spec.renderer!r}")
