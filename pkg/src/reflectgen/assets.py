"""Mesh asset resolution.

Model references used in configs and FrameSpecs:

    asset:<name>    bundled stand-in mesh  (assets/meshes/<name>.mesh)
    file:<path>     user-supplied mesh file in the text mesh format

Meshes are normalized at load (centered, largest dimension 1) and
cached; placement scales them to the per-class size from the config.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .mesh import Mesh, load_mesh
from .primitives import occluder_mesh


class AssetError(Exception):
    pass


def _asset_dir() -> Path:
    return Path(resources.files("reflectgen") / "assets" / "meshes")


class AssetCatalog:
    """Loads, normalizes and caches meshes by reference string."""

    def __init__(self):
        self._cache: dict[str, Mesh] = {}

    def resolve_mesh(self, ref: str) -> Mesh:
        cached = self._cache.get(ref)
        if cached is not None:
            return cached
        scheme, _, rest = ref.partition(":")
        if scheme == "asset":
            path = _asset_dir() / f"{rest}.mesh"
            if not path.is_file():
                raise AssetError(f"bundled mesh {rest!r} not found at {path}")
            mesh = load_mesh(path).normalized()
        elif scheme == "file":
            path = Path(rest)
            if not path.is_file():
                raise AssetError(f"mesh file not found: {path}")
            mesh = load_mesh(path).normalized()
        else:
            raise AssetError(f"bad model reference {ref!r}")
        self._cache[ref] = mesh
        return mesh

    def occluder(self, kind: str) -> Mesh:
        ref = f"occluder:{kind}"
        cached = self._cache.get(ref)
        if cached is None:
            path = _asset_dir() / f"occluder_{kind}.mesh"
            if path.is_file():
                cached = load_mesh(path).normalized()
            else:
                cached = occluder_mesh(kind)  # fall back to the procedural builder
            self._cache[ref] = cached
        return cached

    def half_extents(self, ref: str) -> np.ndarray:
        """Half extents of the normalized (unit max-dimension) mesh."""
        return self.resolve_mesh(ref).aabb.size / 2.0
