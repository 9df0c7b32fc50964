import numpy as np
import pytest

from reflectgen.assets import AssetCatalog
from reflectgen.planner import CameraSpec, FrameSpec, LightSpec, PlacementSpec
from reflectgen.textures import TextureLibrary


@pytest.fixture(scope="session")
def catalog():
    return AssetCatalog()


@pytest.fixture(scope="session")
def textures():
    return TextureLibrary(None)


@pytest.fixture
def rng():
    return np.random.default_rng(123)


def make_single_model_spec(renderer="local", width=64, height=48, seed=9,
                           reflectivity=0.0, background_mode="BLACK",
                           background_color=None, environment=None,
                           reflection_on=True, lights=None, **placement_kw):
    """Minimal one-object frame used across renderer tests."""
    placement = PlacementSpec(
        instance_id=1, name="toilet", model_ref="asset:toilet_rounded_1",
        class_name="toilet", sub_class_name="toilet_rounded_1",
        position=(0.0, 0.0, 0.0), size=0.7, color=(0.9, 0.9, 0.88),
        reflectivity=reflectivity, **placement_kw)
    if lights is None:
        lights = (LightSpec("point", (0.5, 1.0, 1.5), 0.8),)
    return FrameSpec(
        frame_id=0, seed=seed, protocol="PRESTUDY", width=width, height=height,
        renderer=renderer,
        camera=CameraSpec((0.0, 0.4, 2.0), (0.0, 0.0, 0.0),
                          fov_deg=45.0, roll_deg=0.0),
        lights=tuple(lights),
        placements=(placement,),
        background_mode=background_mode,
        background_color=background_color,
        environment=environment,
        reflection_on=reflection_on,
    )
