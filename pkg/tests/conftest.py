"""Shared frame/scene factories for driving the interaction engine in tests."""

from __future__ import annotations

from gazewarp.fsm import EngineConfig, EngineState, fsm_step
from gazewarp.geometry import Pose, Ray, UnitQuat, Vec3
from gazewarp.scene import Scene, SceneObject, Space
from gazewarp.trace import InputFrame

EYE = Vec3(0, 0, 0)
OBJECT_POS = Vec3(0, 0, 2)
OFF_TARGET = Vec3(3, 1, 2)
REST_HAND = Vec3(0.12, -0.36, 0.18)


def scene_object(id, pos, half=0.131, interactable=True, space=Space.FAR, quat=None):
    return SceneObject(
        id=id,
        pose=Pose(pos, quat or UnitQuat.identity()),
        half_extents=Vec3(half, half, half),
        interactable=interactable,
        space=space,
    )


def one_object_scene():
    return Scene.from_objects([scene_object("a", OBJECT_POS)], eye=EYE)


def two_object_scene():
    return Scene.from_objects(
        [scene_object("a", OBJECT_POS), scene_object("b", Vec3(0.25, 0, 2), half=0.05)],
        eye=EYE,
    )


def hand_on_gaze(gaze_to: Vec3, depth: float = 0.42) -> Vec3:
    return (gaze_to - EYE).normalized().scaled(depth)


def make_frame(
    t,
    gaze_to: Vec3 = OBJECT_POS,
    hand: Vec3 = REST_HAND,
    pinch: bool = False,
    hand_quat: UnitQuat | None = None,
    hand_valid: bool = True,
) -> InputFrame:
    return InputFrame(
        t_ms=t,
        gaze=Ray(EYE, (gaze_to - EYE).normalized()),
        head_pose=Pose(EYE, UnitQuat.identity()),
        hand_pose=Pose(hand, hand_quat or UnitQuat.identity()),
        pinch=pinch,
        hand_valid=hand_valid,
    )


def run_frames(config: EngineConfig, frames, scene: Scene):
    """Drive fsm_step over the frames; returns (states, events, edges, scene, state)."""
    state = EngineState.initial(config)
    states = []
    events = []
    edges = []
    for frame in frames:
        result = fsm_step(state, config, frame, scene)
        state, scene = result.state, result.scene
        states.append(state.interaction)
        events.extend(result.events)
        edges.extend(result.edges)
    return states, events, edges, scene, state
