import numpy as np
import pytest

from reflectgen.config import (FRAME_DIMENSIONS, ROOM_HEIGHT, ROOM_WIDTH,
                               Protocol, default_config)
from reflectgen.geometry import Aabb
from reflectgen.planner import (FramePlanner, FrameSpec,
                                PlacementExhaustedError,
                                place_models, sample_camera_hemisphere)


@pytest.fixture(scope="module")
def planners(catalog):
    return {p: FramePlanner(default_config(p), catalog)
            for p in (Protocol.PRESTUDY, Protocol.RA, Protocol.DR,
                      Protocol.MLTDR, Protocol.SC)}


@pytest.mark.parametrize("protocol", list(Protocol))
def test_planning_is_deterministic(planners, protocol):
    a = planners[protocol].plan_frame(99, 3)
    b = planners[protocol].plan_frame(99, 3)
    assert a == b


def test_frames_are_independent(planners):
    planner = planners[Protocol.DR]
    specs = [planner.plan_frame(7, i) for i in range(8)]
    assert len({s.seed for s in specs}) == 8
    # planning out of order gives the same frame
    assert planner.plan_frame(7, 5) == specs[5]


@pytest.mark.parametrize("protocol", list(Protocol))
def test_spec_json_round_trip(planners, protocol):
    spec = planners[protocol].plan_frame(11, 2)
    assert FrameSpec.from_json(spec.to_json()) == spec


def test_negative_frame_index(planners):
    with pytest.raises(ValueError):
        planners[Protocol.RA].plan_frame(0, -1)


def test_prestudy_shape(planners):
    spec = planners[Protocol.PRESTUDY].plan_frame(4, 0)
    assert spec.renderer == "local"
    assert (spec.width, spec.height) == (200, 200)
    assert len(spec.placements) == 1
    assert spec.placements[0].position == (0.0, 0.0, 0.0)
    assert len(spec.lights) == 2


def test_prestudy_camera_radius_and_hemisphere(planners):
    config = default_config(Protocol.PRESTUDY)
    planner = planners[Protocol.PRESTUDY]
    for i in range(40):
        spec = planner.plan_frame(21, i)
        pos = np.asarray(spec.camera.position)
        radius = np.linalg.norm(pos)
        assert min(abs(radius - r) for r in config.prestudy.radii) < 1e-9
        assert pos[2] >= -1e-9  # never behind the wall-mounted object


def test_prestudy_reflection_mode_mixed(planners):
    flags = {planners[Protocol.PRESTUDY].plan_frame(5, i).reflection_on
             for i in range(30)}
    assert flags == {True, False}


def test_prestudy_reflectivity_follows_flag(planners):
    for i in range(20):
        spec = planners[Protocol.PRESTUDY].plan_frame(5, i)
        expected = 0.5 if spec.reflection_on else 0.0
        assert spec.placements[0].reflectivity == expected


def test_ra_repeats_camera_positions(planners):
    planner = planners[Protocol.RA]
    config = default_config(Protocol.RA)
    k = config.ra.frames_per_position
    specs = [planner.plan_frame(3, i) for i in range(2 * k)]
    # lighting differs every frame even with the shared camera
    intensities = {s.lights[0].intensity for s in specs[:k]}
    assert len(intensities) == k


def test_ra_dimensions_from_config_set(planners):
    allowed = {d for d in FRAME_DIMENSIONS} | {(h, w) for w, h in FRAME_DIMENSIONS}
    for i in range(20):
        spec = planners[Protocol.RA].plan_frame(8, i)
        assert (spec.width, spec.height) in allowed


def test_ra_material_fixed(planners):
    spec = planners[Protocol.RA].plan_frame(1, 0)
    assert spec.placements[0].reflectivity == 0.5
    assert spec.background_mode == "ENVMAP"


@pytest.mark.parametrize("protocol", [Protocol.DR, Protocol.MLTDR, Protocol.SC])
def test_randomized_ranges(planners, protocol):
    config = default_config(protocol)
    planner = planners[protocol]
    for i in range(15):
        spec = planner.plan_frame(13, i)
        assert 1 <= len(spec.placements) <= config.n_classes
        lo, hi = config.dr.occluder_count
        assert lo <= len(spec.occluders) <= hi
        assert abs(spec.camera.roll_deg) <= config.dr.roll_limit_deg
        for p in spec.placements:
            assert 0.0 <= p.reflectivity <= 1.0
            assert 0.0 <= p.metalness <= 1.0
            assert 0.0 <= p.specular <= 1.0
        for o in spec.occluders:
            lo_s = config.dr.occluder_scale[0] * ROOM_HEIGHT
            hi_s = config.dr.occluder_scale[1] * ROOM_HEIGHT
            assert all(lo_s <= s <= hi_s for s in o.scale)


def test_dr_uses_local_renderer_and_static_lights(planners):
    spec = planners[Protocol.DR].plan_frame(2, 0)
    assert spec.renderer == "local"
    assert [l.kind for l in spec.lights] == ["point", "point"]
    assert spec.background_mode == "GEOMETRY"


def test_mltdr_uses_pbr_and_spot_lights(planners):
    config = default_config(Protocol.MLTDR)
    for i in range(10):
        spec = planners[Protocol.MLTDR].plan_frame(17, i)
        assert spec.renderer == "pbr"
        lo, hi = config.mltdr.light_count
        assert lo <= len(spec.lights) <= hi
        for l in spec.lights:
            assert l.kind == "spot"
            a, b = config.mltdr.cone_angle_range
            assert a <= l.cone_angle_deg <= b
            assert 0.0 <= l.intensity <= 1.0
        for p in spec.placements:
            assert p.roughness == config.mltdr.roughness


def test_mltdr_lights_not_below_lowest_model(planners, catalog):
    planner = planners[Protocol.MLTDR]
    half_y = {e.name: catalog.half_extents(e.model_ref)[1]
              for e in planner.config.classes}
    for i in range(10):
        spec = planner.plan_frame(23, i)
        floor = max(min(p.position[1] - half_y[p.name] * p.size
                        for p in spec.placements), 0.1)
        for l in spec.lights:
            assert l.position[1] >= floor - 1e-9


def test_placed_models_do_not_overlap(planners, catalog):
    planner = planners[Protocol.DR]
    halves = {e.name: catalog.half_extents(e.model_ref) for e in planner.config.classes}
    for i in range(15):
        spec = planner.plan_frame(31, i)
        boxes = []
        for p in spec.placements:
            h = halves[p.name] * p.size
            c = np.asarray(p.position)
            boxes.append(Aabb(c - h, c + h))
        for a in range(len(boxes)):
            for b in range(a + 1, len(boxes)):
                assert not boxes[a].overlaps(boxes[b])


def test_placements_stay_on_wall(planners, catalog):
    planner = planners[Protocol.DR]
    halves = {e.name: catalog.half_extents(e.model_ref) for e in planner.config.classes}
    for i in range(15):
        spec = planner.plan_frame(37, i)
        for p in spec.placements:
            h = halves[p.name] * p.size
            x, y, z = p.position
            assert -ROOM_WIDTH / 2 <= x - h[0] and x + h[0] <= ROOM_WIDTH / 2
            assert 0.0 <= y - h[1] and y + h[1] <= ROOM_HEIGHT
            assert z == pytest.approx(h[2])  # back face on the wall plane


def test_place_models_exhaustion():
    from reflectgen.config import six_class_models
    rng = np.random.default_rng(0)
    # models far too large for the wall
    half = np.array([0.5, 0.5, 0.5])
    entry = six_class_models()[0]
    with pytest.raises(PlacementExhaustedError):
        place_models(rng, [(entry, half)], wall_width=0.5, wall_height=0.5)


def test_place_models_crowded_wall_exhausts():
    from reflectgen.config import six_class_models
    entries = six_class_models()
    half = np.array([0.5, 0.5, 0.1])
    candidates = [(e, half) for e in entries]
    failures = 0
    for s in range(5):
        rng = np.random.default_rng(s)
        try:
            place_models(rng, candidates, wall_width=1.3, wall_height=1.3,
                         attempts=50)
        except PlacementExhaustedError:
            failures += 1
    assert failures > 0


def test_sample_camera_hemisphere_radii(rng):
    radii = (1.0, 2.0)
    for _ in range(50):
        pos = sample_camera_hemisphere(rng, radii, (0.0, 0.0, 0.0))
        r = np.linalg.norm(pos)
        assert min(abs(r - v) for v in radii) < 1e-9
        assert pos[2] >= -1e-9
