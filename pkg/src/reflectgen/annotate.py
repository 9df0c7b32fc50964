"""Automatic labeling from rendered instance-id buffers.

Boxes are tight over an instance's visible pixels. The visibility
fraction compares against a second id render with the occluders
removed, so partially hidden objects can be dropped by how much of
them is actually hidden, not by absolute pixel count.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from PIL import Image

from .assets import AssetCatalog
from .planner import FrameSpec
from .render.local import render_id_frame
from .textures import TextureLibrary

MIN_VISIBILITY = 0.05
MIN_BOX_PIXELS = 4
PATCH_SIZE = 200
PATCH_FILL = (0, 0, 0)


class AnnotationError(Exception):
    pass


class CorruptFrameError(AnnotationError):
    """Id buffer references an instance the frame spec does not define."""


@dataclass(frozen=True)
class BoundingBox:
    """Half-open pixel box [x_min, x_max) x [y_min, y_max)."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ValueError(f"degenerate box {self}")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def to_list(self) -> list[int]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    @staticmethod
    def from_list(values) -> "BoundingBox":
        x0, y0, x1, y1 = (int(v) for v in values)
        return BoundingBox(x0, y0, x1, y1)


@dataclass(frozen=True)
class Annotation:
    frame_id: int
    instance_id: int
    class_name: str
    sub_class_name: str
    box: BoundingBox
    visibility: float

    def to_dict(self) -> dict:
        return {
            "frame_id": self.frame_id,
            "instance_id": self.instance_id,
            "class": self.class_name,
            "sub_class": self.sub_class_name,
            "box": self.box.to_list(),
            "visibility": self.visibility,
        }

    @staticmethod
    def from_dict(data: dict) -> "Annotation":
        return Annotation(
            frame_id=int(data["frame_id"]),
            instance_id=int(data["instance_id"]),
            class_name=data["class"],
            sub_class_name=data["sub_class"],
            box=BoundingBox.from_list(data["box"]),
            visibility=float(data["visibility"]),
        )


def tight_box(mask: np.ndarray) -> BoundingBox | None:
    """Smallest box covering all true pixels; None for an empty mask."""
    ys, xs = np.nonzero(mask)
    if len(xs) == 0:
        return None
    return BoundingBox(int(xs.min()), int(ys.min()),
                       int(xs.max()) + 1, int(ys.max()) + 1)


def extract_annotations(spec: FrameSpec, ids: np.ndarray,
                        unoccluded_ids: np.ndarray | None = None,
                        min_visibility: float = MIN_VISIBILITY,
                        min_box_pixels: int = MIN_BOX_PIXELS) -> list[Annotation]:
    """Annotations for every sufficiently visible furniture instance.

    `ids` is the frame's id buffer; `unoccluded_ids` the buffer rendered
    without occluders (pass None when the protocol has no occluders).
    Occluder instances are never annotated. An id in the buffer that the
    spec does not define raises CorruptFrameError.
    """
    known = {p.instance_id for p in spec.placements}
    known |= {o.instance_id for o in spec.occluders}
    present = set(int(v) for v in np.unique(ids)) - {0}
    unknown = present - known
    if unknown:
        raise CorruptFrameError(
            f"frame {spec.frame_id}: id buffer contains unknown ids {sorted(unknown)}")

    if unoccluded_ids is None:
        unoccluded_ids = ids

    annotations = []
    for p in spec.placements:
        mask = ids == p.instance_id
        visible = int(mask.sum())
        if visible == 0:
            continue
        denominator = int((unoccluded_ids == p.instance_id).sum())
        visibility = visible / max(denominator, visible)
        box = tight_box(mask)
        if visibility < min_visibility:
            continue
        if box.width < min_box_pixels or box.height < min_box_pixels:
            continue
        annotations.append(Annotation(
            frame_id=spec.frame_id,
            instance_id=p.instance_id,
            class_name=p.class_name,
            sub_class_name=p.sub_class_name,
            box=box,
            visibility=visibility,
        ))
    return annotations


def annotate_frame(spec: FrameSpec, catalog: AssetCatalog,
                   textures: TextureLibrary,
                   ids: np.ndarray | None = None) -> list[Annotation]:
    """Render the needed id buffers (reusing `ids` if given) and annotate."""
    if ids is None:
        ids = render_id_frame(spec, catalog, textures)
    unoccluded = None
    if spec.occluders:
        unoccluded = render_id_frame(spec, catalog, textures,
                                     include_occluders=False)
    return extract_annotations(spec, ids, unoccluded)


def remap_labels(annotations: list[Annotation],
                 remap: dict[str, str]) -> list[Annotation]:
    """Apply a class remap table; every class must have an entry."""
    out = []
    for ann in annotations:
        target = remap.get(ann.class_name)
        if target is None:
            raise AnnotationError(
                f"class {ann.class_name!r} has no entry in the remap table")
        out.append(replace(ann, class_name=target))
    return out


def extract_patch(image: np.ndarray, box: BoundingBox,
                  out_size: int = PATCH_SIZE,
                  fill: tuple[int, int, int] = PATCH_FILL) -> np.ndarray:
    """Down-scaled view of the frame with the box centered in the output.

    The whole image is scaled by out_size / max(width, height), which
    preserves aspect, then shifted so the box center lands on the patch
    center; uncovered pixels take the fill color.
    """
    height, width = image.shape[:2]
    if not (0 <= box.x_min < box.x_max <= width
            and 0 <= box.y_min < box.y_max <= height):
        raise AnnotationError(f"box {box} outside the {width}x{height} image")
    scale = out_size / max(width, height)
    new_w = max(int(round(width * scale)), 1)
    new_h = max(int(round(height * scale)), 1)
    resized = np.asarray(
        Image.fromarray(image).resize((new_w, new_h), Image.BILINEAR))

    patch = np.empty((out_size, out_size, 3), dtype=np.uint8)
    patch[:, :] = fill
    cx, cy = box.center
    # top-left corner of the resized image inside the patch
    off_x = int(round(out_size / 2 - cx * scale))
    off_y = int(round(out_size / 2 - cy * scale))
    src_x0 = max(-off_x, 0)
    src_y0 = max(-off_y, 0)
    dst_x0 = max(off_x, 0)
    dst_y0 = max(off_y, 0)
    w = min(new_w - src_x0, out_size - dst_x0)
    h = min(new_h - src_y0, out_size - dst_y0)
    if w > 0 and h > 0:
        patch[dst_y0:dst_y0 + h, dst_x0:dst_x0 + w] = \
            resized[src_y0:src_y0 + h, src_x0:src_x0 + w]
    return patch
