"""The 75-entry ceramic color palette.

The palette simulates ceramic surfaces with shades of white, gray and
beige. The default is generated on a fixed low-saturation / high-value
HSV lattice; a user palette file (one `r g b` line per color, values in
[0,1]) may replace it as long as it keeps the count and stays inside
the same saturation/value envelope.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

PALETTE_SIZE = 75
MAX_SATURATION = 0.18
MIN_VALUE = 0.55


@dataclass(frozen=True)
class ColorPalette:
    """Ordered list of exactly 75 RGB colors, each in [0,1]^3."""

    colors: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if len(self.colors) != PALETTE_SIZE:
            raise ValueError(f"palette must have exactly {PALETTE_SIZE} colors, "
                             f"got {len(self.colors)}")
        for rgb in self.colors:
            if len(rgb) != 3 or not all(0.0 <= c <= 1.0 for c in rgb):
                raise ValueError(f"palette color out of range: {rgb}")
            h, s, v = colorsys.rgb_to_hsv(*rgb)
            if s > MAX_SATURATION + 1e-9 or v < MIN_VALUE - 1e-9:
                raise ValueError(
                    f"palette color {rgb} is outside the white/gray/beige envelope "
                    f"(saturation <= {MAX_SATURATION}, value >= {MIN_VALUE})")

    def __len__(self) -> int:
        return PALETTE_SIZE

    def __getitem__(self, index: int) -> tuple[float, float, float]:
        return self.colors[index]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.colors, dtype=np.float64)


def default_palette() -> ColorPalette:
    """75 distinct shades: 25 neutral grays plus two warm-hue lattices.

    Hues cover neutral gray, beige (~35 deg) and warm white (~50 deg);
    saturation stays low and value high so every entry reads as white,
    gray or beige.
    """
    colors = []
    for v in np.linspace(0.60, 1.0, 25):
        colors.append(tuple(round(c, 6) for c in colorsys.hsv_to_rgb(0.0, 0.0, v)))
    lattices = (
        (35.0 / 360.0, np.linspace(0.045, 0.170, 5), np.linspace(0.62, 1.0, 5)),
        (50.0 / 360.0, np.linspace(0.035, 0.160, 5), np.linspace(0.64, 0.99, 5)),
    )
    for h, saturations, values in lattices:
        for v in values:
            for s in saturations:
                colors.append(tuple(round(c, 6) for c in colorsys.hsv_to_rgb(h, s, v)))
    return ColorPalette(tuple(colors))


def load_palette(path: str | Path) -> ColorPalette:
    colors = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"palette file line {lineno}: expected 'r g b'")
        colors.append(tuple(float(p) for p in parts))
    return ColorPalette(tuple(colors))


def sample_palette(rng: np.random.Generator, palette: ColorPalette) -> tuple[float, float, float]:
    """Uniform draw; the result is always an exact member of the palette."""
    return palette.colors[int(rng.integers(0, len(palette)))]
