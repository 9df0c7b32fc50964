import numpy as np
import pytest

from conftest import make_single_model_spec
from reflectgen.mesh import dumps_mesh
from reflectgen.planner import CameraSpec, FrameSpec, LightSpec, PlacementSpec
from reflectgen.primitives import quad
from reflectgen.render import render_frame
from reflectgen.render.image_io import encode_color
from reflectgen.render.local import (AMBIENT, render_id_frame,
                                     render_local_frame, shade_blinn_phong)

QUAD_COLOR = (0.85, 0.80, 0.75)


@pytest.fixture(scope="module")
def quad_path(tmp_path_factory):
    """A unit quad in the z=0 plane facing +z, as a mesh file."""
    mesh = quad((-0.5, -0.5, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0))
    path = tmp_path_factory.mktemp("meshes") / "quad.mesh"
    path.write_text(dumps_mesh(mesh))
    return path


def make_quad_spec(quad_path, reflectivity=0.0, environment=None,
                   lights=None, width=65, height=49):
    if lights is None:
        lights = (LightSpec("point", (0.5, 1.0, 1.5), 0.8),)
    placement = PlacementSpec(
        instance_id=1, name="toilet", model_ref=f"file:{quad_path}",
        class_name="toilet", sub_class_name="toilet_rounded_1",
        position=(0.0, 0.0, 0.0), size=1.0, color=QUAD_COLOR,
        reflectivity=reflectivity)
    return FrameSpec(
        frame_id=0, seed=5, protocol="PRESTUDY", width=width, height=height,
        renderer="local",
        camera=CameraSpec((0.0, 0.0, 2.0), (0.0, 0.0, 0.0),
                          fov_deg=45.0, roll_deg=0.0),
        lights=tuple(lights), placements=(placement,),
        background_mode="BLACK", environment=environment)


def test_black_background_is_exactly_zero(catalog, textures):
    spec = make_single_model_spec(background_mode="BLACK")
    frame = render_local_frame(spec, catalog, textures)
    background = frame.ids == 0
    assert background.any() and (frame.ids == 1).any()
    assert np.all(frame.color[background] == 0)


def test_color_background_is_exact(catalog, textures):
    bg = (0.2, 0.4, 0.6)
    spec = make_single_model_spec(background_mode="COLOR", background_color=bg)
    frame = render_local_frame(spec, catalog, textures)
    expected = encode_color(np.array([[bg]], dtype=np.float64))[0, 0]
    background = frame.ids == 0
    assert np.all(frame.color[background] == expected)


def test_envmap_background_not_black(catalog, textures):
    spec = make_single_model_spec(background_mode="ENVMAP",
                                  environment="proc:checker:7")
    frame = render_local_frame(spec, catalog, textures)
    background = frame.ids == 0
    assert frame.color[background].mean() > 0


def test_render_is_deterministic(catalog, textures):
    spec = make_single_model_spec(background_mode="ENVMAP",
                                  environment="proc:noise:3", reflectivity=0.4)
    a = render_local_frame(spec, catalog, textures)
    b = render_local_frame(spec, catalog, textures)
    np.testing.assert_array_equal(a.color, b.color)
    np.testing.assert_array_equal(a.ids, b.ids)


def test_reflection_off_equals_zero_reflectivity(catalog, textures):
    """Disabling reflections and zeroing reflectivity give the same bytes."""
    off = make_single_model_spec(reflectivity=0.7, reflection_on=False,
                                 environment="proc:noise:3")
    zero = make_single_model_spec(reflectivity=0.0, reflection_on=True,
                                  environment="proc:noise:3")
    a = render_local_frame(off, catalog, textures)
    b = render_local_frame(zero, catalog, textures)
    np.testing.assert_array_equal(a.color, b.color)


def test_center_pixel_matches_shading_oracle(catalog, textures, quad_path):
    spec = make_quad_spec(quad_path)
    frame = render_local_frame(spec, catalog, textures)
    # odd dimensions put the middle pixel's ray exactly through the
    # origin: normal (0,0,1), view (0,0,1)
    normal = np.array([0.0, 0.0, 1.0])
    view = np.array([0.0, 0.0, 1.0])
    light = spec.lights[0]
    light_dir = np.asarray(light.position) / np.linalg.norm(light.position)
    expected = AMBIENT * np.asarray(QUAD_COLOR) + shade_blinn_phong(
        normal, view, light_dir, QUAD_COLOR, (0.6, 0.6, 0.6), 64.0,
        intensity=light.intensity)
    expected8 = encode_color(np.clip(expected, 0.0, 1.0)[None, None])[0, 0]
    got = frame.color[spec.height // 2, spec.width // 2].astype(int)
    assert np.abs(got - expected8.astype(int)).max() <= 1


def test_full_reflectivity_shows_environment(catalog, textures, quad_path):
    env_ref = "proc:checker:11"
    spec = make_quad_spec(quad_path, reflectivity=1.0, environment=env_ref)
    frame = render_local_frame(spec, catalog, textures)
    env = textures.resolve(env_ref)
    # the center ray reflects straight back toward the viewer, which is
    # the sphere map's center texel
    h, w = env.shape[:2]
    expected = encode_color(env[h // 2, w // 2].astype(np.float64)[None, None])[0, 0]
    got = frame.color[spec.height // 2, spec.width // 2].astype(int)
    assert np.abs(got - expected.astype(int)).max() <= 1


def test_unlit_object_has_only_ambient(catalog, textures, quad_path):
    spec = make_quad_spec(quad_path, lights=())
    frame = render_local_frame(spec, catalog, textures)
    expected = encode_color(
        (AMBIENT * np.asarray(QUAD_COLOR))[None, None])[0, 0]
    got = frame.color[spec.height // 2, spec.width // 2].astype(int)
    assert np.abs(got - expected.astype(int)).max() <= 1


def test_id_buffer_matches_color_pass(catalog, textures):
    spec = make_single_model_spec()
    frame = render_local_frame(spec, catalog, textures)
    ids = render_id_frame(spec, catalog, textures)
    np.testing.assert_array_equal(frame.ids, ids)
    assert set(np.unique(ids)) <= {0, 1}


def test_render_frame_dispatch_and_renderer_check(catalog, textures):
    spec = make_single_model_spec()
    frame = render_frame(spec, catalog, textures)
    assert frame.color.shape == (spec.height, spec.width, 3)
    with pytest.raises(ValueError, match="renderer"):
        render_local_frame(make_single_model_spec(renderer="pbr"),
                           catalog, textures)
