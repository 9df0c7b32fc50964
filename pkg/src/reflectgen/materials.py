"""Material models for the two renderers.

LocalMaterial drives the Blinn-Phong renderer; PhysicalMaterial drives
the path tracer. The physical model is a Lambertian diffuse lobe plus a
single roughness-controlled specular lobe, mixed by `reflectivity`:

    spec_color    = lerp(specular * white, base_color, metalness)
    diffuse_color = base_color * (1 - metalness)
    sample: with probability `reflectivity` scatter in the specular
    lobe with throughput spec_color, otherwise cosine-scatter in the
    diffuse lobe with throughput diffuse_color.

Directional-hemispherical reflectance is therefore
reflectivity*spec_color + (1-reflectivity)*diffuse_color <= 1
per channel, so energy is conserved for every parameter choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import normalize, reflect


def _rgb(value) -> tuple[float, float, float]:
    r, g, b = (float(x) for x in value)
    return (r, g, b)


@dataclass(frozen=True)
class LocalMaterial:
    """Blinn-Phong material for the non-physical renderer."""

    diffuse: tuple[float, float, float] = (0.9, 0.9, 0.9)
    specular: tuple[float, float, float] = (0.5, 0.5, 0.5)
    shininess: float = 32.0
    reflectivity: float = 0.0
    texture: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "diffuse", _rgb(self.diffuse))
        object.__setattr__(self, "specular", _rgb(self.specular))
        for c in (*self.diffuse, *self.specular, self.reflectivity):
            if not 0.0 <= c <= 1.0:
                raise ValueError("material channels must lie in [0,1]")
        if self.shininess <= 0:
            raise ValueError("shininess must be positive")


@dataclass(frozen=True)
class PhysicalMaterial:
    """Metalness/specular-workflow material for the path tracer."""

    base_color: tuple[float, float, float] = (0.9, 0.9, 0.9)
    metalness: float = 0.0
    specular: float = 0.0
    reflectivity: float = 0.0
    roughness: float = 0.0
    texture: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "base_color", _rgb(self.base_color))
        for name in ("metalness", "specular", "reflectivity", "roughness"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0,1], got {v}")
        for c in self.base_color:
            if not 0.0 <= c <= 1.0:
                raise ValueError("base_color channels must lie in [0,1]")

    @property
    def specular_color(self) -> np.ndarray:
        base = np.asarray(self.base_color)
        white = np.full(3, self.specular)
        return white * (1.0 - self.metalness) + base * self.metalness

    @property
    def diffuse_color(self) -> np.ndarray:
        return np.asarray(self.base_color) * (1.0 - self.metalness)


def phong_exponent(roughness: float) -> float:
    """Specular lobe exponent; grows unbounded as roughness -> 0."""
    r = max(roughness, 1e-3)
    return 2.0 / (r * r) - 2.0


def _cosine_sample(normal: np.ndarray, u1: float, u2: float) -> np.ndarray:
    """Cosine-weighted direction about `normal` (pdf = cos/pi)."""
    r = np.sqrt(u1)
    phi = 2.0 * np.pi * u2
    x = r * np.cos(phi)
    y = r * np.sin(phi)
    z = np.sqrt(max(1.0 - u1, 0.0))
    t, b = _basis(normal)
    return x * t + y * b + z * normal


def _power_cosine_sample(axis: np.ndarray, exponent: float, u1: float, u2: float) -> np.ndarray:
    """Direction from a cos^n lobe about `axis`."""
    cos_t = u1 ** (1.0 / (exponent + 1.0))
    sin_t = np.sqrt(max(1.0 - cos_t * cos_t, 0.0))
    phi = 2.0 * np.pi * u2
    t, b = _basis(axis)
    return sin_t * np.cos(phi) * t + sin_t * np.sin(phi) * b + cos_t * axis


def _basis(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.array([0.0, 1.0, 0.0]) if abs(n[1]) < 0.9 else np.array([1.0, 0.0, 0.0])
    t = normalize(np.cross(a, n))
    return t, np.cross(n, t)


def sample_material(material: PhysicalMaterial, incoming: np.ndarray, normal: np.ndarray,
                    rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Scatter `incoming` (pointing toward the surface) off the material.

    Returns (outgoing unit direction, RGB throughput weight). The
    expected throughput over many samples is the material's
    directional-hemispherical reflectance. A sample absorbed at the
    surface (or scattered below the horizon by a rough specular lobe)
    carries zero throughput.
    """
    incoming = np.asarray(incoming, dtype=np.float64)
    normal = np.asarray(normal, dtype=np.float64)
    if rng.random() < material.reflectivity:
        mirror = normalize(reflect(incoming, normal))
        if material.roughness <= 1e-6:
            out = mirror
        else:
            out = _power_cosine_sample(mirror, phong_exponent(material.roughness),
                                       rng.random(), rng.random())
            if np.dot(out, normal) <= 0.0:
                return out, np.zeros(3)
        return out, material.specular_color.copy()
    out = _cosine_sample(normal, rng.random(), rng.random())
    return out, material.diffuse_color.copy()


def hemispherical_reflectance(material: PhysicalMaterial, incoming: np.ndarray,
                              normal: np.ndarray, rng: np.random.Generator,
                              samples: int = 100_000) -> np.ndarray:
    """Monte Carlo estimate of the fraction of incident energy re-emitted."""
    total = np.zeros(3)
    for _ in range(samples):
        _, w = sample_material(material, incoming, normal, rng)
        total += w
    return total / samples
