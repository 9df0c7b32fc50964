"""Scene-level domain types: cameras, lights, environment, instances.

The randomized room is a cube with one interior wall; furniture is
mounted on the wall's +z face and occluders float in front of it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .geometry import Aabb, Transform, normalize
from .materials import LocalMaterial, PhysicalMaterial
from .mesh import Mesh


class BackgroundMode(str, enum.Enum):
    BLACK = "BLACK"
    COLOR = "COLOR"
    ENVMAP = "ENVMAP"
    COLOR_ENVMAP = "COLOR+ENVMAP"
    GEOMETRY = "GEOMETRY"  # DR/MLT-DR textured room


class ReflectionMode(str, enum.Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    MIXED = "MIXED"


@dataclass(frozen=True)
class Camera:
    position: tuple[float, float, float]
    target: tuple[float, float, float]
    up: tuple[float, float, float] = (0.0, 1.0, 0.0)
    fov_deg: float = 60.0  # vertical field of view
    roll_deg: float = 0.0
    width: int = 300
    height: int = 300
    aspect_scale: float = 1.0  # widens the horizontal field of view

    def __post_init__(self):
        if np.allclose(self.position, self.target):
            raise ValueError("camera position must differ from its target")
        if not 0.0 < self.fov_deg < 180.0:
            raise ValueError("fov must lie in (0, 180) degrees")
        if abs(self.roll_deg) > 30.0 + 1e-9:
            raise ValueError("camera roll is limited to +-30 degrees")


class LightKind(str, enum.Enum):
    POINT = "point"
    SPOT = "spot"


@dataclass(frozen=True)
class Light:
    kind: LightKind
    position: tuple[float, float, float]
    intensity: float
    direction: tuple[float, float, float] = (0.0, 0.0, -1.0)
    cone_angle_deg: float = 45.0

    def __post_init__(self):
        if self.intensity < 0:
            raise ValueError("light intensity must be >= 0")
        if self.kind is LightKind.SPOT and not 0.0 < self.cone_angle_deg < 180.0:
            raise ValueError("spot cone angle must lie in (0, 180) degrees")
        object.__setattr__(self, "direction",
                           tuple(normalize(np.asarray(self.direction, dtype=np.float64))))


@dataclass(frozen=True)
class EnvironmentMap:
    """Sphere-mapped environment image; values in [0,1], shape (h,w,3)."""

    image: np.ndarray

    def __post_init__(self):
        img = np.asarray(self.image, dtype=np.float32)
        if img.ndim != 3 or img.shape[2] != 3 or img.size == 0:
            raise ValueError("environment image must be a non-empty (h,w,3) raster")
        object.__setattr__(self, "image", np.clip(img, 0.0, 1.0))

    def lookup(self, direction_cam: np.ndarray) -> np.ndarray:
        """Nearest-texel color for camera-space unit direction(s)."""
        from .geometry import sphere_map_uv

        uv = sphere_map_uv(direction_cam)
        h, w = self.image.shape[:2]
        x = np.minimum((uv[..., 0] * w).astype(np.int64), w - 1)
        y = np.minimum(((1.0 - uv[..., 1]) * h).astype(np.int64), h - 1)
        return self.image[y, x]


class InstanceKind(str, enum.Enum):
    ROOM = "room"
    FURNITURE = "furniture"
    OCCLUDER = "occluder"


@dataclass(frozen=True)
class Instance:
    """One placed mesh. instance_id 0 is reserved for the background."""

    instance_id: int
    kind: InstanceKind
    mesh: Mesh
    transform: Transform
    material: LocalMaterial | PhysicalMaterial
    class_name: str | None = None
    sub_class_name: str | None = None

    def __post_init__(self):
        if self.kind is not InstanceKind.ROOM and self.instance_id <= 0:
            raise ValueError("furniture/occluder instances need a positive id")

    @property
    def world_aabb(self) -> Aabb:
        from .mesh import compute_world_aabb

        return compute_world_aabb(self.mesh, self.transform)


@dataclass(frozen=True)
class Scene:
    instances: tuple[Instance, ...]
    lights: tuple[Light, ...]
    environment: EnvironmentMap | None = None
    background_mode: BackgroundMode = BackgroundMode.BLACK
    background_color: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        ids = [i.instance_id for i in self.instances if i.kind is not InstanceKind.ROOM]
        if len(ids) != len(set(ids)):
            raise ValueError("instance ids must be unique within a scene")

    def instance_by_id(self, instance_id: int) -> Instance:
        for inst in self.instances:
            if inst.instance_id == instance_id and inst.kind is not InstanceKind.ROOM:
                return inst
        raise KeyError(f"no instance with id {instance_id}")
