import json

import pytest
from hypothesis import given, strategies as st

from gazewarp.errors import ConsistencyError, SchemaError
from gazewarp.geometry import Pose, Ray, UnitQuat, Vec3
from gazewarp.scene import (
    Scene,
    SceneObject,
    Space,
    gaze_target,
    scene_from_dict,
    scene_to_dict,
    sphere_intersects,
)


def _obj(id, pos, half=0.1, interactable=True, space=Space.FAR):
    return SceneObject(
        id=id,
        pose=Pose(pos, UnitQuat.identity()),
        half_extents=Vec3(half, half, half),
        interactable=interactable,
        space=space,
    )


FORWARD_RAY = Ray(Vec3(0, 0, 0), Vec3(0, 0, 1))


def test_gaze_target_single_hit():
    scene = Scene.from_objects([_obj("a", Vec3(0, 0, 2))])
    assert gaze_target(scene, FORWARD_RAY) == "a"


def test_gaze_target_nearest_hit_wins():
    scene = Scene.from_objects([_obj("far", Vec3(0, 0, 2)), _obj("near", Vec3(0, 0, 1.5))])
    assert gaze_target(scene, FORWARD_RAY) == "near"


def test_gaze_target_miss():
    scene = Scene.from_objects([_obj("a", Vec3(5, 5, 2))])
    assert gaze_target(scene, FORWARD_RAY) is None


def test_gaze_target_ignores_near_space_and_non_interactable():
    scene = Scene.from_objects(
        [
            _obj("deco", Vec3(0, 0, 1.0), interactable=False),
            _obj("proxy", Vec3(0, 0, 1.2), space=Space.NEAR),
            _obj("real", Vec3(0, 0, 2.0)),
        ]
    )
    assert gaze_target(scene, FORWARD_RAY) == "real"


def test_gaze_target_dwell_gate():
    scene = Scene.from_objects([_obj("a", Vec3(0, 0, 2))])
    assert gaze_target(scene, FORWARD_RAY, fixation_ms=50, dwell_ms=100) is None
    assert gaze_target(scene, FORWARD_RAY, fixation_ms=100, dwell_ms=100) == "a"


@given(st.floats(min_value=0, max_value=500), st.floats(min_value=0, max_value=500))
def test_gaze_target_dwell_monotonicity(fixation, dwell):
    # Shrinking dwell never removes a hit produced at a larger dwell.
    scene = Scene.from_objects([_obj("a", Vec3(0, 0, 2))])
    if gaze_target(scene, FORWARD_RAY, fixation, dwell) == "a":
        assert gaze_target(scene, FORWARD_RAY, fixation, dwell / 2) == "a"


def test_gaze_target_inside_sphere():
    scene = Scene.from_objects([_obj("wrap", Vec3(0, 0, 0.05), half=0.5)])
    assert gaze_target(scene, FORWARD_RAY) == "wrap"


def test_sphere_intersects_basics():
    obj = _obj("a", Vec3(0, 0, 0), half=0.1)
    r_obj = obj.bounding_radius()
    assert sphere_intersects(obj, Vec3(0, 0, 0), 1.0)
    # Closed boundary: exact touch counts.
    assert sphere_intersects(obj, Vec3(1.0 + r_obj, 0, 0), 1.0)
    assert not sphere_intersects(obj, Vec3(10 * (1.0 + r_obj), 0, 0), 1.0)


@given(
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=0.05, max_value=1.0),
    st.floats(min_value=0.05, max_value=1.0),
)
def test_sphere_intersects_symmetric(x, y, r1, r2):
    a = SceneObject("a", Pose(Vec3(x, y, 0), UnitQuat.identity()), Vec3(r1, 0, 0))
    b = SceneObject("b", Pose(Vec3(0, 0, 0), UnitQuat.identity()), Vec3(r2, 0, 0))
    assert sphere_intersects(a, b.pose.position, r2) == sphere_intersects(
        b, a.pose.position, r1
    )


def test_scene_rejects_duplicate_ids():
    with pytest.raises(ConsistencyError):
        Scene.from_objects([_obj("a", Vec3()), _obj("a", Vec3(1, 0, 0))])


def test_scene_unknown_id():
    scene = Scene.from_objects([_obj("a", Vec3())])
    with pytest.raises(ConsistencyError):
        scene.get("missing")


def test_scene_json_round_trip():
    scene = Scene.from_objects(
        [
            _obj("a", Vec3(0, 0, 2)),
            SceneObject(
                "b",
                Pose(Vec3(1, 2, 3), UnitQuat.from_axis_angle(Vec3(0, 1, 0), 30.0)),
                Vec3(0.1, 0.2, 0.3),
                interactable=False,
                space=Space.NEAR,
            ),
        ],
        eye=Vec3(0, 1.5, 0),
    )
    doc = scene_to_dict(scene)
    assert doc["schema"] == 1
    back = scene_from_dict(json.loads(json.dumps(doc)))
    assert set(back.objects) == {"a", "b"}
    assert back.eye == scene.eye
    b = back.get("b")
    assert b.space is Space.NEAR
    assert not b.interactable
    assert b.pose.orientation.dot(scene.get("b").pose.orientation) == pytest.approx(1.0)


def test_scene_schema_version_checked():
    with pytest.raises(SchemaError):
        scene_from_dict({"schema": 99, "objects": []})


def test_scene_missing_field_is_named():
    doc = {"schema": 1, "objects": [{"id": "a", "position": [0, 0, 1]}]}
    with pytest.raises(SchemaError) as err:
        scene_from_dict(doc)
    assert "half_extents" in str(err.value)


def test_negative_half_extents_rejected():
    with pytest.raises(SchemaError):
        SceneObject("a", Pose.identity(), Vec3(-0.1, 0.1, 0.1))
