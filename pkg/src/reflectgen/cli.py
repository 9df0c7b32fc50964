"""Command-line entry point.

Subcommands: generate (dataset synthesis), evaluate (detections vs a
manifest), inspect (dataset statistics and range audit), patch
(object-centered 200x200 crop). All failures exit nonzero; the
manifest is written last so a crashed run never looks complete.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .annotate import annotate_frame, extract_patch, remap_labels
from .assets import AssetCatalog, AssetError
from .config import ConfigError, Protocol, default_config, load_config
from .evalkit import (DEFAULT_THRESHOLDS, EvalError, load_detections, mean_ap)
from .manifest import (DatasetManifest, FrameRecord, ManifestError,
                       read_manifest, write_manifest)
from .mesh import MeshError
from .planner import FramePlanner, FrameSpec, PlacementExhaustedError
from .render import PathTracerSettings, render_frame
from .render.image_io import load_color_png, save_color_png, save_id_png
from .taxonomy import EXTERNAL_REMAP
from .textures import TextureError


class CliError(Exception):
    pass


def _frame_name(index: int) -> str:
    return f"frame_{index:05d}"


def _resolve_config(args):
    if args.config:
        return load_config(args.config)
    if args.protocol:
        try:
            protocol = Protocol(args.protocol)
        except ValueError:
            names = ", ".join(p.value for p in Protocol)
            raise CliError(f"unknown protocol {args.protocol!r}; one of: {names}")
        return default_config(protocol)
    raise CliError("either --config or --protocol is required")


def cmd_generate(args) -> int:
    if args.count < 1:
        raise ConfigError("frame count must be >= 1")
    config = _resolve_config(args)
    if args.jobs:
        import numba
        numba.set_num_threads(args.jobs)
    settings = PathTracerSettings(samples_per_pixel=args.spp) if args.spp \
        else PathTracerSettings()

    out = Path(args.out)
    for sub in ("images", "ids", "specs", "records"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    # surface asset and config problems before any pixel work
    catalog = AssetCatalog()
    for entry in config.classes:
        catalog.resolve_mesh(entry.model_ref)
    planner = FramePlanner(config, catalog)

    records = []
    for index in range(args.count):
        name = _frame_name(index)
        image_path = out / "images" / f"{name}.png"
        id_path = out / "ids" / f"{name}.png"
        spec_path = out / "specs" / f"{name}.json"
        record_path = out / "records" / f"{name}.json"
        if (args.resume and record_path.is_file() and image_path.is_file()
                and id_path.is_file() and spec_path.is_file()):
            records.append(FrameRecord.from_dict(
                json.loads(record_path.read_text())))
            continue
        spec = planner.plan_frame(args.seed, index)
        frame = render_frame(spec, catalog, planner.textures, settings)
        annotations = annotate_frame(spec, catalog, planner.textures,
                                     ids=np.asarray(frame.ids))
        save_color_png(image_path, frame.color)
        save_id_png(id_path, frame.ids)
        spec_path.write_text(spec.to_json() + "\n")
        record = FrameRecord(
            frame_id=index,
            seed=spec.seed,
            width=spec.width,
            height=spec.height,
            image_path=f"images/{name}.png",
            id_path=f"ids/{name}.png",
            annotations=tuple(annotations),
        )
        record_path.write_text(
            json.dumps(record.to_dict(), sort_keys=True) + "\n")
        records.append(record)
        if not args.quiet:
            print(f"{name}: {len(annotations)} annotations", flush=True)

    manifest = DatasetManifest(
        protocol=config.protocol.value,
        master_seed=args.seed,
        taxonomy=config.taxonomy,
        frames=tuple(records),
    )
    write_manifest(manifest, out / "manifest.json")
    if not args.quiet:
        print(f"wrote {out / 'manifest.json'} ({len(records)} frames)")
    return 0


def _parse_thresholds(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise CliError(f"bad threshold list {text!r}")
    if not values or any(not 0.0 <= v <= 1.0 for v in values):
        raise CliError(f"thresholds must be in [0, 1]: {text!r}")
    return values


def cmd_evaluate(args) -> int:
    manifest = read_manifest(args.manifest)
    ground_truths = manifest.all_annotations()
    detections = load_detections(args.detections)
    if args.remap:
        ground_truths = remap_labels(ground_truths, EXTERNAL_REMAP)
    gt_classes = {g.class_name for g in ground_truths}
    det_classes = {d.class_name for d in detections}
    stray = sorted(det_classes - gt_classes)
    if stray:
        raise CliError(
            "detection classes absent from the ground truth: "
            + ", ".join(stray)
            + " (use --remap or fix the detections file)")
    thresholds = _parse_thresholds(args.thresholds)
    report = mean_ap(detections, ground_truths, thresholds)
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report.to_json())
        (out / "report.csv").write_text(report.to_csv())
        print(f"wrote {out / 'report.json'} and {out / 'report.csv'}")
    print(report.to_csv(), end="")
    return 0


_AUDIT_TOL = 1e-9


def _audit_spec(spec: FrameSpec, config) -> list[str]:
    """Out-of-range randomized values in one frame spec."""
    problems = []
    n_c = config.n_classes
    if not 1 <= len(spec.placements) <= n_c:
        problems.append(f"model count {len(spec.placements)} outside [1, {n_c}]")
    if spec.protocol in ("DR", "MLT-DR", "SC"):
        lo, hi = config.dr.occluder_count
        if not lo <= len(spec.occluders) <= hi:
            problems.append(
                f"occluder count {len(spec.occluders)} outside [{lo}, {hi}]")
    if spec.protocol in ("MLT-DR", "SC"):
        lo, hi = config.mltdr.light_count
        if not lo <= len(spec.lights) <= hi:
            problems.append(f"light count {len(spec.lights)} outside [{lo}, {hi}]")
    limit = config.dr.roll_limit_deg + _AUDIT_TOL
    if abs(spec.camera.roll_deg) > limit:
        problems.append(f"roll {spec.camera.roll_deg:.2f} outside +-{limit:.0f}")
    for p in spec.placements:
        for label, value in (("reflectivity", p.reflectivity),
                             ("metalness", p.metalness),
                             ("specular", p.specular),
                             ("roughness", p.roughness)):
            if not -_AUDIT_TOL <= value <= 1.0 + _AUDIT_TOL:
                problems.append(f"{label} {value:.3f} outside [0, 1]")
    if spec.protocol == "PRESTUDY":
        dims = {tuple(config.prestudy.dimensions)}
    else:
        dims = {(w, h) for w, h in config.dimensions}
        dims |= {(h, w) for w, h in config.dimensions}
    if (spec.width, spec.height) not in dims:
        problems.append(f"dimensions {spec.width}x{spec.height} not configured")
    return problems


def cmd_inspect(args) -> int:
    manifest = read_manifest(args.manifest, validate_files=not args.no_files)
    annotations = manifest.all_annotations()
    print(f"protocol: {manifest.protocol}")
    print(f"seed: {manifest.master_seed}")
    print(f"frames: {manifest.frame_count}")
    print(f"annotations: {len(annotations)}")

    by_class: dict[str, int] = {}
    by_sub: dict[str, int] = {}
    for a in annotations:
        by_class[a.class_name] = by_class.get(a.class_name, 0) + 1
        by_sub[a.sub_class_name] = by_sub.get(a.sub_class_name, 0) + 1
    print("per-class counts:")
    for name in sorted(by_class):
        print(f"  {name}: {by_class[name]}")
    print(f"sub-classes present: {len(by_sub)}")
    for name in sorted(by_sub):
        print(f"  {name}: {by_sub[name]}")

    if annotations:
        visibility = np.array([a.visibility for a in annotations])
        hist, edges = np.histogram(visibility, bins=10, range=(0.0, 1.0))
        print("visibility histogram:")
        for count, lo, hi in zip(hist, edges[:-1], edges[1:]):
            print(f"  [{lo:.1f}, {hi:.1f}): {count}")

    spec_dir = Path(args.manifest).parent / "specs"
    violations = 0
    if spec_dir.is_dir():
        try:
            config = default_config(Protocol(manifest.protocol))
        except ValueError:
            config = None
        if config is not None:
            for frame in manifest.frames:
                spec_path = spec_dir / f"{_frame_name(frame.frame_id)}.json"
                if not spec_path.is_file():
                    continue
                spec = FrameSpec.from_json(spec_path.read_text())
                for problem in _audit_spec(spec, config):
                    violations += 1
                    print(f"RANGE VIOLATION frame {frame.frame_id}: {problem}")
    print(f"range violations: {violations}")
    return 0


def cmd_patch(args) -> int:
    manifest = read_manifest(args.manifest)
    frames = {f.frame_id: f for f in manifest.frames}
    frame = frames.get(args.frame)
    if frame is None:
        raise CliError(f"frame {args.frame} not in manifest")
    targets = [a for a in frame.annotations if a.instance_id == args.instance]
    if not targets:
        raise CliError(
            f"frame {args.frame} has no annotation for instance {args.instance}")
    base = Path(args.manifest).parent
    image = load_color_png(base / frame.image_path)
    patch = extract_patch(image, targets[0].box)
    save_color_png(args.out, patch)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reflectgen",
        description="Synthesize annotated images of reflective objects "
                    "and evaluate detections against them.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="render a dataset")
    gen.add_argument("--config", help="protocol config file (JSON)")
    gen.add_argument("--protocol",
                     help="builtin protocol: " + ", ".join(p.value for p in Protocol))
    gen.add_argument("--seed", type=int, required=True, help="master seed")
    gen.add_argument("--count", type=int, required=True, help="frame count")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--spp", type=int, default=0,
                     help="path tracer samples per pixel")
    gen.add_argument("--jobs", type=int, default=0,
                     help="render thread count (output is identical either way)")
    gen.add_argument("--resume", action="store_true",
                     help="skip frames already on disk")
    gen.add_argument("--quiet", action="store_true")
    gen.set_defaults(func=cmd_generate)

    ev = sub.add_parser("evaluate", help="score detections against a manifest")
    ev.add_argument("manifest")
    ev.add_argument("detections")
    ev.add_argument("--thresholds",
                    default=",".join(str(t) for t in DEFAULT_THRESHOLDS))
    ev.add_argument("--remap", action="store_true",
                    help="apply the external-validation class remap table")
    ev.add_argument("--out", help="directory for report.json / report.csv")
    ev.set_defaults(func=cmd_evaluate)

    ins = sub.add_parser("inspect", help="dataset statistics and range audit")
    ins.add_argument("manifest")
    ins.add_argument("--no-files", action="store_true",
                     help="skip image file existence checks")
    ins.set_defaults(func=cmd_inspect)

    pat = sub.add_parser("patch", help="object-centered 200x200 crop")
    pat.add_argument("manifest")
    pat.add_argument("--frame", type=int, required=True)
    pat.add_argument("--instance", type=int, required=True)
    pat.add_argument("--out", required=True)
    pat.set_defaults(func=cmd_patch)

    return parser


_KNOWN_ERRORS = (CliError, ConfigError, ManifestError, EvalError, AssetError,
                 MeshError, TextureError, PlacementExhaustedError, OSError,
                 ValueError)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _KNOWN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
