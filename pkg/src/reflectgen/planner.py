"""Frame planning: (config, master seed, frame index) -> FrameSpec.

A FrameSpec pins down every random choice for one frame. Planning is a
pure function: identical inputs give identical FrameSpecs, and frames
are seeded independently so they can be planned in any order or in
parallel.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .assets import AssetCatalog
from .config import (
    FRONT_DEPTH, ROOM_HEIGHT, ROOM_WIDTH,
    ModelEntry, Protocol, ProtocolConfig,
)
from .geometry import Aabb
from .palette import ColorPalette, sample_palette
from .seeding import frame_seed, make_rng
from .textures import TextureLibrary


class PlacementExhaustedError(Exception):
    """Non-overlapping placement could not be found within the retry budget."""

    def __init__(self, frame_index: int | None, message: str):
        tag = f"frame {frame_index}: " if frame_index is not None else ""
        super().__init__(tag + message)
        self.frame_index = frame_index


@dataclass(frozen=True)
class CameraSpec:
    position: tuple[float, float, float]
    target: tuple[float, float, float]
    fov_deg: float
    roll_deg: float
    aspect_scale: float = 1.0


@dataclass(frozen=True)
class LightSpec:
    kind: str  # "point" | "spot"
    position: tuple[float, float, float]
    intensity: float
    direction: tuple[float, float, float] = (0.0, 0.0, -1.0)
    cone_angle_deg: float = 45.0


@dataclass(frozen=True)
class PlacementSpec:
    """One furniture instance: model, pose, and material values."""

    instance_id: int
    name: str
    model_ref: str
    class_name: str
    sub_class_name: str
    position: tuple[float, float, float]
    size: float  # largest world dimension in meters
    color: tuple[float, float, float]
    reflectivity: float
    metalness: float = 0.0
    specular: float = 0.0
    roughness: float = 0.0
    texture: str | None = None


@dataclass(frozen=True)
class OccluderSpec:
    instance_id: int
    kind: str
    position: tuple[float, float, float]
    rotation_deg: tuple[float, float, float]
    scale: tuple[float, float, float]
    texture: str


@dataclass(frozen=True)
class FrameSpec:
    """Fully resolved description of one frame."""

    frame_id: int
    seed: int
    protocol: str
    width: int
    height: int
    renderer: str  # "local" | "pbr"
    camera: CameraSpec
    lights: tuple[LightSpec, ...]
    placements: tuple[PlacementSpec, ...]
    occluders: tuple[OccluderSpec, ...] = ()
    background_mode: str = "BLACK"
    background_color: tuple[float, float, float] | None = None
    environment: str | None = None
    surfaces: dict[str, str] = field(default_factory=dict)  # room/wall/floor texture refs
    reflection_on: bool = True

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @staticmethod
    def from_dict(data: dict) -> "FrameSpec":
        return FrameSpec(
            frame_id=data["frame_id"],
            seed=data["seed"],
            protocol=data["protocol"],
            width=data["width"],
            height=data["height"],
            renderer=data["renderer"],
            camera=CameraSpec(**{**data["camera"],
                                 "position": tuple(data["camera"]["position"]),
                                 "target": tuple(data["camera"]["target"])}),
            lights=tuple(LightSpec(**{**l, "position": tuple(l["position"]),
                                      "direction": tuple(l["direction"])})
                         for l in data["lights"]),
            placements=tuple(PlacementSpec(**{**p, "position": tuple(p["position"]),
                                              "color": tuple(p["color"])})
                             for p in data["placements"]),
            occluders=tuple(OccluderSpec(**{**o, "position": tuple(o["position"]),
                                            "rotation_deg": tuple(o["rotation_deg"]),
                                            "scale": tuple(o["scale"])})
                            for o in data["occluders"]),
            background_mode=data["background_mode"],
            background_color=(tuple(data["background_color"])
                              if data["background_color"] is not None else None),
            environment=data["environment"],
            surfaces=dict(data["surfaces"]),
            reflection_on=data["reflection_on"],
        )

    @staticmethod
    def from_json(text: str) -> "FrameSpec":
        return FrameSpec.from_dict(json.loads(text))


def sample_camera_hemisphere(rng: np.random.Generator, radii, target,
                             front=(0.0, 0.0, 1.0), up=(0.0, 1.0, 0.0)):
    """Camera position uniform over the front-facing hemisphere shell.

    The direction from `target` is uniform over the hemisphere with
    non-negative component along `front` (never behind the object);
    the distance is drawn uniformly from the `radii` set.
    """
    radii = tuple(radii)
    if not radii:
        raise ValueError("radii set must be non-empty")
    radius = radii[int(rng.integers(0, len(radii)))]
    w = rng.random()                 # front component, uniform in [0,1]
    phi = 2.0 * np.pi * rng.random()
    r = np.sqrt(max(1.0 - w * w, 0.0))
    front = np.asarray(front, dtype=np.float64)
    up = np.asarray(up, dtype=np.float64)
    side = np.cross(up, front)
    side /= np.linalg.norm(side)
    up_ortho = np.cross(front, side)
    direction = r * np.cos(phi) * side + r * np.sin(phi) * up_ortho + w * front
    return np.asarray(target, dtype=np.float64) + radius * direction


def _mount_aabb(center_x: float, center_y: float, half) -> Aabb:
    lo = np.array([center_x - half[0], center_y - half[1], 0.0])
    hi = np.array([center_x + half[0], center_y + half[1], 2.0 * half[2]])
    return Aabb(lo, hi)


def place_models(rng: np.random.Generator, candidates: list[tuple[ModelEntry, np.ndarray]],
                 wall_width: float = ROOM_WIDTH, wall_height: float = ROOM_HEIGHT,
                 attempts: int = 1000, frame_index: int | None = None):
    """Choose n in [1, n_c] models and mount them on the wall without overlap.

    candidates: (entry, half_extents_of_unit_mesh) pairs. Models attach
    to the wall plane z=0 with their front faces toward +z. Placement is
    rejection sampling; on a collision the whole layout restarts. Raises
    PlacementExhaustedError when `attempts` draws are used up.
    """
    n_c = len(candidates)
    n = int(rng.integers(1, n_c + 1))
    chosen = [candidates[i] for i in rng.choice(n_c, size=n, replace=False)]
    halves = [half * entry.size for entry, half in chosen]
    for half, (entry, _) in zip(halves, chosen):
        if 2.0 * half[0] > wall_width or 2.0 * half[1] > wall_height:
            raise PlacementExhaustedError(
                frame_index, f"model {entry.name} does not fit on the wall")

    budget = attempts
    per_model = max(attempts // 10, 1)
    while budget > 0:
        placed: list[tuple[float, float]] = []
        boxes: list[Aabb] = []
        ok = True
        for half in halves:
            found = False
            for _ in range(min(per_model, budget)):
                budget -= 1
                x = rng.uniform(-wall_width / 2 + half[0], wall_width / 2 - half[0])
                y_lo = half[1] + 0.02
                y_hi = wall_height - half[1] - 0.02
                y = rng.uniform(y_lo, max(y_hi, y_lo + 1e-6))
                box = _mount_aabb(x, y, half)
                if all(not box.overlaps(b) for b in boxes):
                    placed.append((x, y))
                    boxes.append(box)
                    found = True
                    break
            if not found:  # this model found no free spot; restart the layout
                ok = False
                break
        if ok:
            return [(entry, (x, y, float(half[2])))
                    for (entry, _), half, (x, y) in zip(chosen, halves, placed)]
    raise PlacementExhaustedError(
        frame_index, f"no non-overlapping layout found within {attempts} attempts")


class FramePlanner:
    """Binds a config to its asset catalog, palette and texture library."""

    def __init__(self, config: ProtocolConfig, catalog: AssetCatalog | None = None):
        self.config = config
        self.catalog = catalog or AssetCatalog()
        self.palette: ColorPalette = config.palette()
        self.textures = TextureLibrary(config.texture_dir)
        self._candidates = [
            (entry, self.catalog.half_extents(entry.model_ref))
            for entry in config.classes]

    def plan_frame(self, master_seed: int, frame_index: int) -> FrameSpec:
        if frame_index < 0:
            raise ValueError("frame_index must be >= 0")
        seed = frame_seed(master_seed, frame_index)
        rng = make_rng(seed)
        protocol = self.config.protocol
        if protocol is Protocol.PRESTUDY:
            return self._plan_prestudy(rng, frame_index, seed)
        if protocol is Protocol.RA:
            return self._plan_ra(rng, frame_index, seed)
        return self._plan_randomized(rng, frame_index, seed)

    # -- single-object protocols ------------------------------------------

    def _sample_dimensions(self, rng) -> tuple[int, int]:
        dims = self.config.dimensions
        w, h = dims[int(rng.integers(0, len(dims)))]
        if rng.random() < 0.5:  # portrait
            w, h = h, w
        return int(w), int(h)

    def _single_model_placement(self, rng, entry: ModelEntry, reflectivity: float,
                                textured: bool) -> PlacementSpec:
        return PlacementSpec(
            instance_id=1,
            name=entry.name,
            model_ref=entry.model_ref,
            class_name=entry.class_name,
            sub_class_name=entry.sub_class_name,
            position=(0.0, 0.0, 0.0),
            size=entry.size,
            color=(0.92, 0.92, 0.9),  # predefined ceramic white
            reflectivity=reflectivity,
            texture=self.textures.sample_ref(rng) if textured else None,
        )

    def _two_point_lights(self, rng) -> tuple[LightSpec, LightSpec]:
        # static positions in front of the model, random intensity in [0,1]
        return (
            LightSpec("point", (-0.8, 1.0, 1.5), float(rng.random())),
            LightSpec("point", (0.8, 1.0, 1.5), float(rng.random())),
        )

    def _plan_prestudy(self, rng, frame_index: int, seed: int) -> FrameSpec:
        ps = self.config.prestudy
        entry = self.config.classes[int(rng.integers(0, self.config.n_classes))]
        position = sample_camera_hemisphere(rng, ps.radii, (0.0, 0.0, 0.0))
        fov = ps.fov_set[int(rng.integers(0, len(ps.fov_set)))]
        aspect = ps.aspect_set[int(rng.integers(0, len(ps.aspect_set)))]
        lights = self._two_point_lights(rng)

        reflection_on = {"TRUE": True, "FALSE": False}.get(
            ps.reflection_mode, None)
        if reflection_on is None:  # MIXED
            reflection_on = bool(rng.random() < 0.5)
        bg = ps.background_mode
        if bg == "COLOR+ENVMAP":
            bg = "COLOR" if rng.random() < 0.5 else "ENVMAP"
        bg_color = tuple(float(c) for c in rng.random(3)) if bg == "COLOR" else None
        # the environment map is drawn even when not displayed so that the
        # background mode never changes any other randomized choice
        environment = self.textures.sample_ref(rng)
        if bg == "BLACK":
            bg_color = (0.0, 0.0, 0.0)

        placement = self._single_model_placement(
            rng, entry, reflectivity=0.5 if reflection_on else 0.0, textured=True)
        w, h = ps.dimensions
        return FrameSpec(
            frame_id=frame_index, seed=seed, protocol="PRESTUDY",
            width=int(w), height=int(h), renderer="local",
            camera=CameraSpec(tuple(float(v) for v in position), (0.0, 0.0, 0.0),
                              fov_deg=float(fov), roll_deg=0.0,
                              aspect_scale=float(aspect)),
            lights=lights,
            placements=(placement,),
            background_mode=bg,
            background_color=bg_color,
            environment=environment,
            reflection_on=reflection_on,
        )

    def _plan_ra(self, rng, frame_index: int, seed: int) -> FrameSpec:
        ra = self.config.ra
        entry = self.config.classes[int(rng.integers(0, self.config.n_classes))]
        # camera positions repeat for several frames per position; the
        # lighting/texture draws still differ per frame
        position_index = frame_index // max(ra.frames_per_position, 1)
        pos_rng = make_rng(frame_seed(seed ^ 0x52A5, position_index))
        position = sample_camera_hemisphere(pos_rng, ra.radii, (0.0, 0.0, 0.0))
        fov = ra.fov_set[int(rng.integers(0, len(ra.fov_set)))]
        lights = self._two_point_lights(rng)
        environment = self.textures.sample_ref(rng)
        placement = self._single_model_placement(
            rng, entry, reflectivity=ra.reflectivity, textured=True)
        w, h = self._sample_dimensions(rng)
        return FrameSpec(
            frame_id=frame_index, seed=seed, protocol="RA",
            width=w, height=h, renderer="local",
            camera=CameraSpec(tuple(float(v) for v in position), (0.0, 0.0, 0.0),
                              fov_deg=float(fov), roll_deg=0.0),
            lights=lights,
            placements=(placement,),
            background_mode="ENVMAP",
            environment=environment,
        )

    # -- randomized room protocols ----------------------------------------

    def _plan_randomized(self, rng, frame_index: int, seed: int) -> FrameSpec:
        protocol = self.config.protocol
        dr = self.config.dr
        mlt = self.config.mltdr
        physical = protocol in (Protocol.MLTDR, Protocol.SC)

        layout = place_models(rng, self._candidates, attempts=dr.placement_attempts,
                              frame_index=frame_index)
        placements = []
        for k, (entry, (x, y, hz)) in enumerate(layout, start=1):
            color = sample_palette(rng, self.palette)
            reflectivity = float(rng.uniform(*mlt.reflectivity_range)) if physical \
                else float(rng.random())
            placements.append(PlacementSpec(
                instance_id=k,
                name=entry.name,
                model_ref=entry.model_ref,
                class_name=entry.class_name,
                sub_class_name=entry.sub_class_name,
                position=(float(x), float(y), float(hz)),
                size=entry.size,
                color=color,
                reflectivity=reflectivity,
                metalness=float(rng.uniform(*mlt.metalness_range)) if physical else 0.0,
                specular=float(rng.uniform(*mlt.specular_range)) if physical else 0.0,
                roughness=mlt.roughness if physical else 0.0,
            ))

        cam_pos = (
            float(rng.uniform(-ROOM_WIDTH / 2 * 0.9, ROOM_WIDTH / 2 * 0.9)),
            float(rng.uniform(*dr.camera_height_range) * ROOM_HEIGHT),
            float(rng.uniform(*dr.camera_depth_range) * FRONT_DEPTH),
        )

        m = int(rng.integers(dr.occluder_count[0], dr.occluder_count[1] + 1))
        occluders = []
        for k in range(m):
            kind = dr.occluder_types[int(rng.integers(0, len(dr.occluder_types)))]
            scale = tuple(float(rng.uniform(*dr.occluder_scale) * ROOM_HEIGHT)
                          for _ in range(3))
            # an occluder enclosing the camera would black out the frame,
            # so positions inside its bounding sphere are redrawn
            clearance = 0.5 * math.sqrt(sum(s * s for s in scale)) + 0.1
            while True:
                pos = (
                    float(rng.uniform(-ROOM_WIDTH / 2, ROOM_WIDTH / 2)),
                    float(rng.uniform(0.2, ROOM_HEIGHT - 0.2)),
                    float(rng.uniform(0.4, FRONT_DEPTH - 0.4)),
                )
                gap = math.sqrt(sum((p - c) ** 2 for p, c in zip(pos, cam_pos)))
                if gap >= clearance:
                    break
            rot = tuple(float(rng.uniform(0.0, 360.0)) for _ in range(3))
            occluders.append(OccluderSpec(
                instance_id=len(placements) + 1 + k,
                kind=kind, position=pos, rotation_deg=rot, scale=scale,
                texture=self.textures.sample_ref(rng),
            ))
        cam_target = (
            float(rng.uniform(-ROOM_WIDTH / 2 * 0.8, ROOM_WIDTH / 2 * 0.8)),
            float(rng.uniform(0.2 * ROOM_HEIGHT, 0.8 * ROOM_HEIGHT)),
            0.0,
        )
        roll = float(rng.uniform(-dr.roll_limit_deg, dr.roll_limit_deg))
        fov = dr.fov_set[int(rng.integers(0, len(dr.fov_set)))]

        surfaces = {
            "floor": self.textures.sample_ref(rng),
            "wall": self.textures.sample_ref(rng),
            "room": self.textures.sample_ref(rng),
        }

        if physical:
            half_y = {entry.name: half[1] for entry, half in self._candidates}
            lowest_model_y = min(p.position[1] - half_y[p.name] * p.size
                                 for p in placements)
            light_floor = max(lowest_model_y, 0.1)
            n_lights = int(rng.integers(mlt.light_count[0], mlt.light_count[1] + 1))
            lights = []
            for _ in range(n_lights):
                lpos = (
                    float(rng.uniform(-ROOM_WIDTH / 2, ROOM_WIDTH / 2)),
                    float(rng.uniform(light_floor, ROOM_HEIGHT - 0.05)),
                    float(rng.uniform(0.3, FRONT_DEPTH - 0.1)),
                )
                spot = np.array([
                    rng.uniform(-ROOM_WIDTH / 2, ROOM_WIDTH / 2),
                    rng.uniform(0.0, ROOM_HEIGHT),
                    0.0,
                ])
                direction = spot - np.asarray(lpos)
                direction /= np.linalg.norm(direction)
                lights.append(LightSpec(
                    kind="spot", position=lpos, intensity=float(rng.random()),
                    direction=tuple(float(v) for v in direction),
                    cone_angle_deg=float(rng.uniform(*mlt.cone_angle_range)),
                ))
            lights = tuple(lights)
        else:
            lights = (
                LightSpec("point", (-1.5, 2.5, 2.2), float(rng.random())),
                LightSpec("point", (1.5, 2.5, 2.2), float(rng.random())),
            )

        w, h = self._sample_dimensions(rng)
        return FrameSpec(
            frame_id=frame_index, seed=seed, protocol=protocol.value,
            width=w, height=h, renderer="pbr" if physical else "local",
            camera=CameraSpec(cam_pos, cam_target, fov_deg=float(fov), roll_deg=roll),
            lights=lights,
            placements=tuple(placements),
            occluders=tuple(occluders),
            background_mode="GEOMETRY",
            surfaces=surfaces,
        )


def plan_frame(config: ProtocolConfig, master_seed: int, frame_index: int,
               catalog: AssetCatalog | None = None) -> FrameSpec:
    """Convenience wrapper; for many frames reuse a FramePlanner."""
    return FramePlanner(config, catalog).plan_frame(master_seed, frame_index)
