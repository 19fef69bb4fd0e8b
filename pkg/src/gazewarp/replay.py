"""Trial replay: drive the interaction engine with frames, detect completion,
and fold the run into events plus metrics. Used by the CLI and the live
session endpoint so both paths share one code path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .docking import TrialSpec, TrialState, completion_step, make_trial, trial_scene
from .errors import IncompleteTrialError, SchemaError
from .fsm import (
    DirectManipulation,
    EngineConfig,
    EngineState,
    EventKind,
    SemanticEvent,
    Summoning,
    fsm_step,
)
from .geometry import Pose
from .metrics import MetricsRecord, compute_metrics
from .scene import Scene, scene_from_dict
from .trace import InputFrame


def authoritative_far_pose(state: EngineState, scene: Scene, object_id: str) -> Pose:
    """Far-space pose of an object: the scene's stored pose, falling back to
    the summon-time snapshot while the object is hidden by a live binding."""
    obj = scene.objects.get(object_id)
    if obj is not None:
        return obj.pose
    interaction = state.interaction
    if isinstance(interaction, (Summoning, DirectManipulation)):
        member = interaction.binding.far_members.get(object_id)
        if member is not None:
            return member.pose
    raise SchemaError(f"object {object_id!r} is neither in the scene nor summoned")


@dataclass(frozen=True, slots=True)
class ReplayResult:
    events: list[SemanticEvent]
    metrics: Optional[MetricsRecord]
    trial: TrialState
    scene: Scene
    state: EngineState
    frames_consumed: int


def replay_trial(
    frames: list[InputFrame],
    trial: TrialState,
    config: EngineConfig,
    scene: Optional[Scene] = None,
    *,
    require_completion: bool = True,
) -> ReplayResult:
    """Feed frames through the engine until the docking trial completes.

    The event log opens with ObjectAppear at the first frame's timestamp and,
    on success, closes with TrialComplete at the completion frame. A trace
    that ends before completion raises IncompleteTrialError unless
    `require_completion` is False.
    """
    if not frames:
        raise IncompleteTrialError("empty trace")
    if scene is None:
        scene = trial_scene(trial, eye=frames[0].gaze.origin)
    state = EngineState.initial(config)
    events: list[SemanticEvent] = [
        SemanticEvent(frames[0].t_ms, EventKind.OBJECT_APPEAR, trial.object.id)
    ]
    consumed = 0
    for frame in frames:
        result = fsm_step(state, config, frame, scene)
        state, scene = result.state, result.scene
        events.extend(result.events)
        consumed += 1
        pose = authoritative_far_pose(state, scene, trial.object.id)
        trial = completion_step(trial, frame.t_ms, pose)
        if trial.completed_at_ms is not None:
            events.append(
                SemanticEvent(trial.completed_at_ms, EventKind.TRIAL_COMPLETE, trial.object.id)
            )
            break
    if trial.completed_at_ms is None:
        if require_completion:
            raise IncompleteTrialError(
                f"trace ended after {consumed} frames without meeting the "
                "completion conditions"
            )
        return ReplayResult(events, None, trial, scene, state, consumed)
    metrics = compute_metrics(events, frames[:consumed], trial.object.id)
    return ReplayResult(events, metrics, trial, scene, state, consumed)


def load_replay_scene(path: str) -> tuple[Scene, Optional[TrialSpec]]:
    """Scene file loader that also extracts the optional embedded trial spec."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}", path=path) from None
    scene = scene_from_dict(doc, path=path)
    spec = None
    if "trial" in doc:
        try:
            spec = TrialSpec.from_dict(doc["trial"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad trial block: {exc!r}", path=path, field="trial") from None
    return scene, spec


def replay_scene_file(
    frames: list[InputFrame], scene: Scene, spec: TrialSpec, config: EngineConfig
) -> ReplayResult:
    """Replay against a scene file whose trial objects came from `spec`.

    The scene file's stored poses win over regenerated ones, so a scene with
    extra context objects or edited trial poses replays as written.
    """
    from dataclasses import replace as dc_replace

    trial = make_trial(spec, eye=scene.eye)
    obj = scene.objects.get(trial.object.id, trial.object)
    target = scene.objects.get(trial.target.id, trial.target)
    trial = dc_replace(trial, object=obj, target=target)
    merged = scene.with_objects([obj, target])
    return replay_trial(frames, trial, config, scene=merged)
