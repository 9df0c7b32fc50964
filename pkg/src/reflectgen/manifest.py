"""Dataset manifest: one structured-text file describing a generated set.

The layout mirrors common detection dataset formats (an images array
plus per-image annotations) so conversion scripts stay trivial. Keys
are emitted sorted and the file ends with a newline, making manifests
diff-friendly. Image paths are stored relative to the manifest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .annotate import Annotation
from .taxonomy import ClassTaxonomy

SCHEMA_VERSION = 1


class ManifestError(Exception):
    pass


@dataclass(frozen=True)
class FrameRecord:
    frame_id: int
    seed: int
    width: int
    height: int
    image_path: str
    id_path: str
    annotations: tuple[Annotation, ...]

    def to_dict(self) -> dict:
        return {
            "frame_id": self.frame_id,
            "seed": self.seed,
            "width": self.width,
            "height": self.height,
            "image": self.image_path,
            "id_buffer": self.id_path,
            "annotations": [a.to_dict() for a in self.annotations],
        }

    @staticmethod
    def from_dict(data: dict) -> "FrameRecord":
        return FrameRecord(
            frame_id=int(data["frame_id"]),
            seed=int(data["seed"]),
            width=int(data["width"]),
            height=int(data["height"]),
            image_path=data["image"],
            id_path=data["id_buffer"],
            annotations=tuple(Annotation.from_dict(a)
                              for a in data["annotations"]),
        )


@dataclass(frozen=True)
class DatasetManifest:
    protocol: str
    master_seed: int
    taxonomy: ClassTaxonomy
    frames: tuple[FrameRecord, ...]
    schema_version: int = SCHEMA_VERSION

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    def all_annotations(self) -> list[Annotation]:
        return [a for f in self.frames for a in f.annotations]

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "protocol": self.protocol,
            "master_seed": self.master_seed,
            "frame_count": self.frame_count,
            "taxonomy": self.taxonomy.to_dict(),
            "frames": [f.to_dict() for f in self.frames],
        }

    @staticmethod
    def from_dict(data: dict) -> "DatasetManifest":
        version = int(data["schema_version"])
        if version != SCHEMA_VERSION:
            raise ManifestError(f"unsupported manifest schema version {version}")
        return DatasetManifest(
            protocol=data["protocol"],
            master_seed=int(data["master_seed"]),
            taxonomy=ClassTaxonomy.from_dict(data["taxonomy"]),
            frames=tuple(FrameRecord.from_dict(f) for f in data["frames"]),
            schema_version=version,
        )


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    path = Path(path)
    text = json.dumps(manifest.to_dict(), sort_keys=True, indent=2)
    path.write_text(text + "\n", encoding="utf-8")


def read_manifest(path: str | Path,
                  validate_files: bool = True) -> DatasetManifest:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid manifest text: {exc}") from exc
    manifest = DatasetManifest.from_dict(data)
    if validate_files:
        base = path.parent
        for frame in manifest.frames:
            for ref in (frame.image_path, frame.id_path):
                if not (base / ref).is_file():
                    raise ManifestError(
                        f"manifest references missing file: {ref}")
    return manifest
