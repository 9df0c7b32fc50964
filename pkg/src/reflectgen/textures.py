"""Texture sources for randomization.

Any directory of images can serve as the texture library (standing in
for a large photo collection). When no directory is given, a bundled
procedural generator supplies unlimited deterministic textures so the
whole pipeline runs offline with zero external data.

Texture references are strings stored in FrameSpecs:

    proc:<kind>:<seed>   procedural texture
    file:<name>          image file inside the configured directory
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

import numpy as np
from PIL import Image

from .seeding import make_rng, mix

PROC_KINDS = ("noise", "checker", "stripes", "gradient", "blotch")


class TextureError(Exception):
    pass


def procedural_texture(kind: str, seed: int, size: int = 128) -> np.ndarray:
    """Deterministic (size, size, 3) float32 texture in [0,1]."""
    rng = make_rng(mix(seed, PROC_KINDS.index(kind)))
    c0 = rng.random(3)
    c1 = rng.random(3)
    yy, xx = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    if kind == "noise":
        # value-noise: random low-res grid, bilinearly upsampled
        cells = int(rng.integers(4, 17))
        grid = rng.random((cells + 1, cells + 1))
        fy = yy / size * cells
        fx = xx / size * cells
        iy, ix = fy.astype(int), fx.astype(int)
        ty, tx = fy - iy, fx - ix
        v = (grid[iy, ix] * (1 - ty) * (1 - tx) + grid[iy + 1, ix] * ty * (1 - tx)
             + grid[iy, ix + 1] * (1 - ty) * tx + grid[iy + 1, ix + 1] * ty * tx)
    elif kind == "checker":
        n = int(rng.integers(2, 13))
        v = ((yy * n // size + xx * n // size) % 2).astype(np.float64)
    elif kind == "stripes":
        n = int(rng.integers(2, 17))
        angle = rng.random() * np.pi
        proj = xx * np.cos(angle) + yy * np.sin(angle)
        v = (0.5 + 0.5 * np.sin(proj / size * 2 * np.pi * n))
    elif kind == "gradient":
        angle = rng.random() * np.pi
        proj = xx * np.cos(angle) + yy * np.sin(angle)
        v = (proj - proj.min()) / max(np.ptp(proj), 1e-9)
    elif kind == "blotch":
        v = np.zeros((size, size))
        for _ in range(int(rng.integers(5, 20))):
            cy, cx = rng.random(2) * size
            r = rng.random() * size / 3 + 2
            d2 = (yy - cy) ** 2 + (xx - cx) ** 2
            v += np.exp(-d2 / (2 * r * r))
        v = np.clip(v, 0, 1)
    else:
        raise TextureError(f"unknown procedural texture kind {kind!r}")
    tex = c0[None, None, :] * (1.0 - v[..., None]) + c1[None, None, :] * v[..., None]
    return tex.astype(np.float32)


def load_image_texture(path: Path, max_size: int = 256) -> np.ndarray:
    """Image file as (h,w,3) float32 in [0,1], downscaled to max_size."""
    try:
        with Image.open(path) as im:
            im = im.convert("RGB")
            if max(im.size) > max_size:
                scale = max_size / max(im.size)
                im = im.resize((max(1, int(im.width * scale)),
                                max(1, int(im.height * scale))), Image.BILINEAR)
            arr = np.asarray(im, dtype=np.float32) / 255.0
    except OSError as exc:
        raise TextureError(f"cannot load texture image {path}: {exc}") from exc
    if arr.size == 0:
        raise TextureError(f"texture image {path} is empty")
    return arr


class TextureLibrary:
    """Resolves texture references; samples random references."""

    def __init__(self, directory: str | Path | None = None, proc_size: int = 128):
        self.directory = Path(directory) if directory else None
        self.proc_size = proc_size
        if self.directory is not None:
            if not self.directory.is_dir():
                raise TextureError(f"texture directory {self.directory} does not exist")
            self._files = sorted(
                p.name for p in self.directory.iterdir()
                if p.suffix.lower() in (".png", ".jpg", ".jpeg", ".bmp"))
            if not self._files:
                raise TextureError(f"texture directory {self.directory} has no images")
        else:
            self._files = []

    def sample_ref(self, rng: np.random.Generator) -> str:
        if self._files:
            return "file:" + self._files[int(rng.integers(0, len(self._files)))]
        kind = PROC_KINDS[int(rng.integers(0, len(PROC_KINDS)))]
        return f"proc:{kind}:{int(rng.integers(0, 2**31))}"

    def resolve(self, ref: str) -> np.ndarray:
        return self._resolve_cached(ref)

    @lru_cache(maxsize=512)
    def _resolve_cached(self, ref: str) -> np.ndarray:
        scheme, _, rest = ref.partition(":")
        if scheme == "proc":
            kind, _, seed = rest.partition(":")
            return procedural_texture(kind, int(seed), self.proc_size)
        if scheme == "file":
            if self.directory is None:
                raise TextureError(f"file texture {ref!r} but no texture directory configured")
            path = self.directory / rest
            if not path.is_file():
                raise TextureError(f"texture file not found: {path}")
            return load_image_texture(path)
        raise TextureError(f"bad texture reference {ref!r}")

    # lru_cache on a method keeps self alive; acceptable for this
    # process-lifetime object, and hashing by identity is what we want.
    __hash__ = object.__hash__
