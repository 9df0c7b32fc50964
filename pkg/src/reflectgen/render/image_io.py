"""Frame containers and PNG serialization.

Color images are 8-bit RGB after gamma encoding; instance-id buffers
are 16-bit grayscale PNGs so ids survive a round trip exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

GAMMA = 2.2


@dataclass(frozen=True)
class RenderedFrame:
    """Output of one render: gamma-encoded color plus instance ids.

    color: (h, w, 3) uint8. ids: (h, w) uint16, 0 = background, other
    values match the instance_id fields of the frame spec.
    """

    color: np.ndarray
    ids: np.ndarray

    @property
    def width(self) -> int:
        return self.color.shape[1]

    @property
    def height(self) -> int:
        return self.color.shape[0]


def encode_color(linear: np.ndarray) -> np.ndarray:
    """Gamma-encode linear radiance in [0,1] to uint8 RGB."""
    clipped = np.clip(linear, 0.0, 1.0)
    return (clipped ** (1.0 / GAMMA) * 255.0 + 0.5).astype(np.uint8)


def save_color_png(path: str | Path, color: np.ndarray) -> None:
    Image.fromarray(color, mode="RGB").save(Path(path), format="PNG")


def load_color_png(path: str | Path) -> np.ndarray:
    with Image.open(Path(path)) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def save_id_png(path: str | Path, ids: np.ndarray) -> None:
    Image.fromarray(ids.astype(np.uint16)).save(Path(path), format="PNG")


def load_id_png(path: str | Path) -> np.ndarray:
    with Image.open(Path(path)) as img:
        return np.asarray(img, dtype=np.uint16)
