"""Seed-driven synthesis of annotated images of reflective furniture,
plus the matching detection-evaluation toolkit."""

from .annotate import (Annotation, BoundingBox, annotate_frame,
                       extract_annotations, extract_patch, remap_labels)
from .assets import AssetCatalog
from .config import (Protocol, ProtocolConfig, default_config, load_config,
                     save_config)
from .evalkit import (Detection, EvalReport, FocalLossParams, focal_loss, iou,
                      mean_ap, smooth_l1)
from .manifest import DatasetManifest, FrameRecord, read_manifest, write_manifest
from .planner import FramePlanner, FrameSpec, plan_frame
from .render import PathTracerSettings, RenderedFrame, render_frame
from .taxonomy import DEFAULT_TAXONOMY, EXTERNAL_REMAP, ClassTaxonomy
from .textures import TextureLibrary

__version__ = "1.0.0"

__all__ = [
    "Annotation", "AssetCatalog", "BoundingBox", "ClassTaxonomy",
    "DEFAULT_TAXONOMY", "DatasetManifest", "Detection", "EXTERNAL_REMAP",
    "EvalReport", "FocalLossParams", "FramePlanner", "FrameRecord",
    "FrameSpec", "PathTracerSettings", "Protocol", "ProtocolConfig",
    "RenderedFrame", "TextureLibrary", "annotate_frame", "default_config",
    "extract_annotations", "extract_patch", "focal_loss", "iou",
    "load_config", "mean_ap", "plan_frame", "read_manifest", "remap_labels",
    "render_frame", "save_config", "smooth_l1", "write_manifest",
]
