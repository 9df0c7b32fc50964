"""Low-level vector math shared by both renderers.

Coordinate convention (fixed for the whole toolkit): right-handed,
+y up, the scene wall's normal is +z. All lengths are meters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def normalize(v: np.ndarray) -> np.ndarray:
    """Unit vector(s) along v. Works on a single vector or an (..., 3) array."""
    v = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / n


def reflect(incident: np.ndarray, normal: np.ndarray) -> np.ndarray:
    """Mirror-reflect a direction about a surface normal.

    `incident` points toward the surface; both inputs unit length.
    Returns incident - 2*(incident.normal)*normal, also unit length.
    Vectorized over leading axes.
    """
    incident = np.asarray(incident, dtype=np.float64)
    normal = np.asarray(normal, dtype=np.float64)
    d = np.sum(incident * normal, axis=-1, keepdims=True)
    return incident - 2.0 * d * normal


def sphere_map_uv(direction: np.ndarray) -> np.ndarray:
    """Sphere-environment-map lookup coordinates for a unit direction.

    The direction is expressed in camera space with +z toward the viewer.
    u = x/m + 0.5, v = y/m + 0.5 with m = 2*sqrt(x^2 + y^2 + (z+1)^2).
    The singular direction (0,0,-1) maps to (0.5, 0.5) by convention.
    Vectorized over leading axes; returns (..., 2) in [0,1]^2.
    """
    d = np.asarray(direction, dtype=np.float64)
    x, y, z = d[..., 0], d[..., 1], d[..., 2]
    m = 2.0 * np.sqrt(x * x + y * y + (z + 1.0) * (z + 1.0))
    singular = m < 1e-12
    m = np.where(singular, 1.0, m)
    u = np.where(singular, 0.5, x / m + 0.5)
    v = np.where(singular, 0.5, y / m + 0.5)
    return np.stack([u, v], axis=-1)


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box, min/max corners."""

    lo: np.ndarray
    hi: np.ndarray

    def contains_point(self, p: np.ndarray, eps: float = 1e-9) -> bool:
        p = np.asarray(p, dtype=np.float64)
        return bool(np.all(p >= self.lo - eps) and np.all(p <= self.hi + eps))

    def overlaps(self, other: "Aabb") -> bool:
        """True when the two boxes share interior volume (touching is not overlap)."""
        return bool(np.all(self.lo < other.hi) and np.all(other.lo < self.hi))

    def union(self, other: "Aabb") -> "Aabb":
        return Aabb(np.minimum(self.lo, other.lo), np.maximum(self.hi, other.hi))

    @property
    def size(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)


def aabb_of_points(points: np.ndarray) -> Aabb:
    points = np.asarray(points, dtype=np.float64)
    if points.size == 0:
        raise ValueError("cannot bound an empty point set")
    return Aabb(points.min(axis=0), points.max(axis=0))


@dataclass(frozen=True)
class Transform:
    """Rigid transform plus per-axis scale: p' = R @ (s * p) + t.

    Rotation is given as intrinsic Euler angles in degrees applied in
    x, y, z order.
    """

    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rotation_deg: np.ndarray = field(default_factory=lambda: np.zeros(3))
    scale: np.ndarray = field(default_factory=lambda: np.ones(3))

    @staticmethod
    def make(translation=(0.0, 0.0, 0.0), rotation_deg=(0.0, 0.0, 0.0), scale=1.0) -> "Transform":
        s = np.asarray(scale, dtype=np.float64)
        if s.ndim == 0:
            s = np.full(3, float(s))
        return Transform(
            np.asarray(translation, dtype=np.float64),
            np.asarray(rotation_deg, dtype=np.float64),
            s,
        )

    def rotation_matrix(self) -> np.ndarray:
        ax, ay, az = np.radians(self.rotation_deg)
        cx, sx = np.cos(ax), np.sin(ax)
        cy, sy = np.cos(ay), np.sin(ay)
        cz, sz = np.cos(az), np.sin(az)
        rx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]])
        ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
        rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
        return rz @ ry @ rx

    def apply_points(self, points: np.ndarray) -> np.ndarray:
        r = self.rotation_matrix()
        return (np.asarray(points, dtype=np.float64) * self.scale) @ r.T + self.translation

    def apply_normals(self, normals: np.ndarray) -> np.ndarray:
        """Transform normals with the inverse-transpose; re-normalized."""
        r = self.rotation_matrix()
        inv_scale = 1.0 / self.scale
        n = (np.asarray(normals, dtype=np.float64) * inv_scale) @ r.T
        return normalize(n)


def look_at_basis(position: np.ndarray, target: np.ndarray, up_hint: np.ndarray,
                  roll_deg: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Camera basis (right, up, forward) with roll about the view axis.

    forward points from position toward target; right-handed so that
    right x up = -forward (camera looks down its -z in camera space,
    i.e. +z faces the viewer, matching the sphere-map convention).
    """
    position = np.asarray(position, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    forward = normalize(target - position)
    up_hint = np.asarray(up_hint, dtype=np.float64)
    right = np.cross(forward, up_hint)
    if np.linalg.norm(right) < 1e-9:
        # degenerate up hint parallel to view; pick another axis
        alt = np.array([1.0, 0.0, 0.0]) if abs(forward[0]) < 0.9 else np.array([0.0, 0.0, 1.0])
        right = np.cross(forward, alt)
    right = normalize(right)
    up = np.cross(right, forward)
    if roll_deg:
        a = np.radians(roll_deg)
        c, s = np.cos(a), np.sin(a)
        right, up = c * right + s * up, -s * right + c * up
    return right, up, forward
