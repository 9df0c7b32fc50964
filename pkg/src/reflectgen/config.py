"""Protocol configuration: which protocol, which models, which ranges.

A run is fully described by (ProtocolConfig, master seed, frame count).
Configs load from a single JSON file (documented in the README); every
field has a default so `default_config(protocol)` is a valid config.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

from .palette import ColorPalette, default_palette, load_palette
from .primitives import OCCLUDER_TYPES
from .taxonomy import DEFAULT_TAXONOMY, SIX_CLASS_STUDY, ClassTaxonomy

# Fixed room geometry for the randomized protocols: a cube room with an
# interior wall. The wall sits at z=0 spanning the full width; its
# normal (+z) points into the front half where camera and occluders live.
ROOM_WIDTH = 6.0
ROOM_HEIGHT = 3.0
ROOM_DEPTH = 6.0
FRONT_DEPTH = ROOM_DEPTH / 2.0

FRAME_DIMENSIONS = ((518, 346), (300, 300), (493, 326))
PRESTUDY_DIMENSION = (200, 200)
FOV_SET = (45.0, 60.0, 63.0)


class Protocol(str, enum.Enum):
    PRESTUDY = "PRESTUDY"
    RA = "RA"
    DR = "DR"
    MLTDR = "MLTDR"
    SC = "SC"


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ModelEntry:
    """One detectable model: config-level name plus taxonomy placement."""

    name: str
    model_ref: str
    class_name: str
    sub_class_name: str
    size: float  # largest dimension in meters after normalization

    def __post_init__(self):
        if self.size <= 0:
            raise ConfigError(f"model {self.name}: size must be positive")


@dataclass(frozen=True)
class PreStudyConfig:
    radii: tuple[float, ...] = (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
    reflection_mode: str = "MIXED"            # TRUE | FALSE | MIXED
    background_mode: str = "COLOR+ENVMAP"     # BLACK | COLOR | ENVMAP | COLOR+ENVMAP
    fov_set: tuple[float, ...] = FOV_SET
    aspect_set: tuple[float, ...] = (1.0,)
    dimensions: tuple[int, int] = PRESTUDY_DIMENSION

    def __post_init__(self):
        if not self.radii or any(r <= 0 for r in self.radii):
            raise ConfigError("pre-study radii must be positive and non-empty")
        if self.reflection_mode not in ("TRUE", "FALSE", "MIXED"):
            raise ConfigError(f"bad reflection mode {self.reflection_mode!r}")
        if self.background_mode not in ("BLACK", "COLOR", "ENVMAP", "COLOR+ENVMAP"):
            raise ConfigError(f"bad background mode {self.background_mode!r}")


@dataclass(frozen=True)
class RaConfig:
    radii: tuple[float, ...] = (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
    fov_set: tuple[float, ...] = FOV_SET
    reflectivity: float = 0.5  # predefined ceramic material
    frames_per_position: int = 6


@dataclass(frozen=True)
class DrConfig:
    occluder_count: tuple[int, int] = (5, 20)
    occluder_types: tuple[str, ...] = OCCLUDER_TYPES
    occluder_scale: tuple[float, float] = (0.1, 0.6)  # fraction of wall height, per axis
    roll_limit_deg: float = 30.0
    fov_set: tuple[float, ...] = FOV_SET
    # camera volume in front of the wall, as fractions of room extents
    camera_height_range: tuple[float, float] = (0.3, 0.9)
    camera_depth_range: tuple[float, float] = (0.3, 0.9)
    placement_attempts: int = 1000

    def __post_init__(self):
        if tuple(sorted(self.occluder_types)) != tuple(sorted(OCCLUDER_TYPES)):
            raise ConfigError(f"occluder types must be exactly {OCCLUDER_TYPES}")
        lo, hi = self.occluder_count
        if not (0 < lo <= hi):
            raise ConfigError("occluder count range must be a non-empty positive range")


@dataclass(frozen=True)
class MltDrConfig:
    light_count: tuple[int, int] = (3, 13)
    cone_angle_range: tuple[float, float] = (20.0, 70.0)
    reflectivity_range: tuple[float, float] = (0.0, 1.0)
    metalness_range: tuple[float, float] = (0.0, 1.0)
    specular_range: tuple[float, float] = (0.0, 1.0)
    roughness: float = 0.2  # fixed; only the three scalars above are randomized

    def __post_init__(self):
        lo, hi = self.light_count
        if not (1 <= lo <= hi <= 64):
            raise ConfigError("light count range must lie within [1, 64]")
        for name in ("reflectivity_range", "metalness_range", "specular_range"):
            a, b = getattr(self, name)
            if not (0.0 <= a <= b <= 1.0):
                raise ConfigError(f"{name} must lie within [0, 1]")


@dataclass(frozen=True)
class ProtocolConfig:
    protocol: Protocol
    classes: tuple[ModelEntry, ...]
    texture_dir: str | None = None
    palette_file: str | None = None
    dimensions: tuple[tuple[int, int], ...] = FRAME_DIMENSIONS
    prestudy: PreStudyConfig = field(default_factory=PreStudyConfig)
    ra: RaConfig = field(default_factory=RaConfig)
    dr: DrConfig = field(default_factory=DrConfig)
    mltdr: MltDrConfig = field(default_factory=MltDrConfig)
    taxonomy: ClassTaxonomy = field(default_factory=lambda: DEFAULT_TAXONOMY)

    def __post_init__(self):
        if not self.classes:
            raise ConfigError("config needs at least one model class")
        if not self.dimensions:
            raise ConfigError("frame-dimension set must be non-empty")
        names = [c.name for c in self.classes]
        if len(names) != len(set(names)):
            raise ConfigError("duplicate class names in config")

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def palette(self) -> ColorPalette:
        if self.palette_file:
            return load_palette(self.palette_file)
        return default_palette()


_SIX_CLASS_SIZES = {
    "toilet": 0.70, "bidet": 0.60, "urinal": 0.65,
    "double_sink": 1.20, "small_sink": 0.55, "large_sink": 0.85,
}

_SUBCLASS_SIZES = {"sink": 0.8, "toilet": 0.7, "urinal": 0.65, "bidet": 0.6, "tap": 0.25}


def six_class_models() -> tuple[ModelEntry, ...]:
    return tuple(
        ModelEntry(name=name, model_ref=f"asset:{sub}", class_name=cls,
                   sub_class_name=sub, size=_SIX_CLASS_SIZES[name])
        for name, cls, sub in SIX_CLASS_STUDY)


def sub_class_models() -> tuple[ModelEntry, ...]:
    entries = []
    for cls, subs in DEFAULT_TAXONOMY.sub_classes.items():
        for sub in subs:
            entries.append(ModelEntry(name=sub, model_ref=f"asset:{sub}",
                                      class_name=cls, sub_class_name=sub,
                                      size=_SUBCLASS_SIZES[cls]))
    return tuple(entries)


def default_config(protocol: Protocol | str, **overrides) -> ProtocolConfig:
    protocol = Protocol(protocol)
    classes = sub_class_models() if protocol is Protocol.SC else six_class_models()
    kwargs = dict(protocol=protocol, classes=classes)
    kwargs.update(overrides)
    return ProtocolConfig(**kwargs)


def _tuples(x):
    if isinstance(x, (list, tuple)):
        return tuple(_tuples(v) for v in x)
    return x


def config_from_dict(data: dict) -> ProtocolConfig:
    try:
        protocol = Protocol(data["protocol"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad or missing protocol: {exc}") from exc
    kwargs: dict = {"protocol": protocol}
    if "classes" in data:
        kwargs["classes"] = tuple(
            ModelEntry(name=c["name"], model_ref=c["model_ref"],
                       class_name=c["class"], sub_class_name=c["sub_class"],
                       size=float(c["size"]))
            for c in data["classes"])
    else:
        kwargs["classes"] = (sub_class_models() if protocol is Protocol.SC
                             else six_class_models())
    for key in ("texture_dir", "palette_file"):
        if data.get(key):
            kwargs[key] = data[key]
    if "dimensions" in data:
        kwargs["dimensions"] = _tuples(data["dimensions"])
    for key, cls in (("prestudy", PreStudyConfig), ("ra", RaConfig),
                     ("dr", DrConfig), ("mltdr", MltDrConfig)):
        if key in data:
            kwargs[key] = cls(**{k: _tuples(v) for k, v in data[key].items()})
    try:
        return ProtocolConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def config_to_dict(config: ProtocolConfig) -> dict:
    return {
        "protocol": config.protocol.value,
        "classes": [
            {"name": c.name, "model_ref": c.model_ref, "class": c.class_name,
             "sub_class": c.sub_class_name, "size": c.size}
            for c in config.classes],
        "texture_dir": config.texture_dir,
        "palette_file": config.palette_file,
        "dimensions": [list(d) for d in config.dimensions],
        "prestudy": asdict(config.prestudy),
        "ra": asdict(config.ra),
        "dr": asdict(config.dr),
        "mltdr": asdict(config.mltdr),
    }


def load_config(path: str | Path) -> ProtocolConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def save_config(config: ProtocolConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2, sort_keys=True) + "\n")
