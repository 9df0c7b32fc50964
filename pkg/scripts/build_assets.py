"""Regenerate the bundled stand-in meshes under src/reflectgen/assets/meshes.

Run from the repository root:  python3 scripts/build_assets.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from reflectgen.mesh import dumps_mesh
from reflectgen.primitives import OCCLUDER_TYPES, furniture_standin, occluder_mesh
from reflectgen.taxonomy import DEFAULT_TAXONOMY

OUT = Path(__file__).resolve().parents[1] / "src" / "reflectgen" / "assets" / "meshes"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for sub in DEFAULT_TAXONOMY.all_sub_classes():
        base, _, variant = sub.rpartition("_")
        if base and variant.isdigit():
            mesh = furniture_standin(base, int(variant) - 1)
        else:
            mesh = furniture_standin(sub)
        (OUT / f"{sub}.mesh").write_text(dumps_mesh(mesh))
        print(f"wrote {sub}.mesh ({len(mesh.triangles)} tris)")
    for kind in OCCLUDER_TYPES:
        mesh = occluder_mesh(kind)
        (OUT / f"occluder_{kind}.mesh").write_text(dumps_mesh(mesh))
        print(f"wrote occluder_{kind}.mesh ({len(mesh.triangles)} tris)")


if __name__ == "__main__":
    main()
