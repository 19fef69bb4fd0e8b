"""Live engine endpoint: message-driven wrapper around the interaction engine.

One Session owns one engine loop. Inbound messages (JSON objects) are
`configure`, `load_scene`, `start_trial`, and `frame`; every frame is answered
by at most one `snapshot`, and a completed docking trial additionally emits a
`trial_result`. The protocol is versioned (`protocol: 1`) and documented
field-by-field in docs/protocol.md. Processing a trace through a Session
yields byte-identical event logs and metrics to the direct replay path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .docking import TrialSpec, TrialState, completion_step, make_trial
from .errors import GazewarpError
from .fsm import (
    DirectManipulation,
    EngineConfig,
    EngineState,
    EventKind,
    Hovering,
    IndirectManipulation,
    SemanticEvent,
    Summoning,
    fsm_step,
)
from .metrics import compute_metrics
from .replay import authoritative_far_pose
from .scene import Scene, scene_from_dict, scene_to_dict
from .trace import InputFrame

PROTOCOL_VERSION = 1
HEARTBEAT_INTERVAL_S = 1.0


def hello_message() -> dict:
    return {"type": "hello", "protocol": PROTOCOL_VERSION}


def error_message(code: str, text: str) -> dict:
    return {"type": "error", "code": code, "text": text}


@dataclass
class Session:
    """Single-writer engine loop fed by session messages."""

    config: EngineConfig = field(default_factory=EngineConfig)
    scene: Optional[Scene] = None
    engine: Optional[EngineState] = None
    trial: Optional[TrialState] = None
    trial_events: list[SemanticEvent] = field(default_factory=list)
    trial_frames: list[InputFrame] = field(default_factory=list)
    trial_pending_appear: bool = False
    dropped_since_snapshot: int = 0

    def note_dropped(self, count: int) -> None:
        self.dropped_since_snapshot += count


def _state_payload(session: Session) -> tuple[str, Optional[str], Optional[dict]]:
    interaction = session.engine.interaction
    target = None
    spheres = None
    if isinstance(interaction, Hovering):
        target = interaction.target
    elif isinstance(interaction, IndirectManipulation):
        target = interaction.target
    elif isinstance(interaction, DirectManipulation):
        target = interaction.grabbed
    if isinstance(interaction, (Summoning, DirectManipulation)):
        binding = interaction.binding
        spheres = {
            "far": {"c": binding.far_sphere.center.to_list(), "r": binding.far_sphere.radius},
            "near": {"c": binding.near_sphere.center.to_list(), "r": binding.near_sphere.radius},
        }
    return interaction.name, target, spheres


def _snapshot(session: Session, t_ms: int, events: list[SemanticEvent]) -> dict:
    name, target, spheres = _state_payload(session)
    trial_doc = None
    if session.trial is not None:
        trial_doc = {
            "object": session.trial.object.id,
            "target": session.trial.target.id,
            "width_m": session.trial.width_m(),
            "dwell_ms": session.trial.dwell_elapsed_ms,
            "completed_at_ms": session.trial.completed_at_ms,
        }
    doc = {
        "type": "snapshot",
        "protocol": PROTOCOL_VERSION,
        "t": t_ms,
        "state": name,
        "target": target,
        "aligned": session.engine.detector.aligned,
        "objects": [
            {
                "id": o.id,
                "p": o.pose.position.to_list(),
                "q": o.pose.orientation.to_list(),
                "half_extents": o.half_extents.to_list(),
                "space": o.space.value,
                "interactable": o.interactable,
                "clipped": o.clipped,
            }
            for o in session.scene.objects.values()
        ],
        "spheres": spheres,
        "events": [e.to_dict() for e in events],
        "trial": trial_doc,
        "dropped": session.dropped_since_snapshot,
    }
    session.dropped_since_snapshot = 0
    return doc


def session_tick(session: Session, message: dict) -> list[dict]:
    """Process one inbound message; returns the outbound messages in order."""
    if not isinstance(message, dict) or "type" not in message:
        return [error_message("bad-message", "message must be an object with a 'type'")]
    kind = message["type"]
    try:
        if kind == "configure":
            session.config = EngineConfig.from_dict(message.get("config", {}))
            if session.scene is not None:
                session.engine = EngineState.initial(session.config)
            return []
        if kind == "load_scene":
            session.scene = scene_from_dict(message.get("scene", {}))
            session.engine = EngineState.initial(session.config)
            session.trial = None
            session.trial_events = []
            session.trial_frames = []
            return []
        if kind == "start_trial":
            if session.scene is None:
                return [error_message("no-scene", "load a scene before starting a trial")]
            trial = make_trial(TrialSpec.from_dict(message.get("spec", {})), eye=session.scene.eye)
            session.trial = trial
            session.trial_events = []
            session.trial_frames = []
            session.trial_pending_appear = True
            session.scene = session.scene.with_objects([trial.object, trial.target])
            return []
        if kind == "frame":
            if session.scene is None:
                return [error_message("no-scene", "load a scene before sending frames")]
            frame = InputFrame.from_dict(message.get("frame", {}))
            return _tick_frame(session, frame)
        return [error_message("bad-message", f"unknown message type {kind!r}")]
    except GazewarpError as exc:
        return [error_message(_error_code(exc), str(exc))]
    except (KeyError, TypeError, ValueError) as exc:
        return [error_message("bad-message", f"malformed {kind} message: {exc!r}")]


def _tick_frame(session: Session, frame: InputFrame) -> list[dict]:
    out: list[dict] = []
    events: list[SemanticEvent] = []
    trial_active = session.trial is not None and session.trial.completed_at_ms is None
    if trial_active and session.trial_pending_appear:
        appear = SemanticEvent(frame.t_ms, EventKind.OBJECT_APPEAR, session.trial.object.id)
        events.append(appear)
        session.trial_events.append(appear)
        session.trial_pending_appear = False
    result = fsm_step(session.engine, session.config, frame, session.scene)
    session.engine, session.scene = result.state, result.scene
    events.extend(result.events)
    if trial_active:
        session.trial_events.extend(result.events)
        session.trial_frames.append(frame)
        pose = authoritative_far_pose(session.engine, session.scene, session.trial.object.id)
        session.trial = completion_step(session.trial, frame.t_ms, pose)
        if session.trial.completed_at_ms is not None:
            done = SemanticEvent(
                session.trial.completed_at_ms, EventKind.TRIAL_COMPLETE, session.trial.object.id
            )
            events.append(done)
            session.trial_events.append(done)
            record = compute_metrics(
                session.trial_events, session.trial_frames, session.trial.object.id
            )
            out.append(
                {
                    "type": "trial_result",
                    "completed_at_ms": session.trial.completed_at_ms,
                    "metrics": record.to_dict(),
                }
            )
    snapshot = _snapshot(session, frame.t_ms, events)
    return [snapshot] + out


def _error_code(exc: GazewarpError) -> str:
    from . import errors

    mapping = {
        errors.DomainError: "domain",
        errors.DegenerateInputError: "degenerate-input",
        errors.SequencingError: "sequencing",
        errors.ConsistencyError: "consistency",
        errors.ConfigError: "config",
        errors.SchemaError: "schema",
        errors.TraceParseError: "parse",
        errors.IncompleteTrialError: "incomplete-trial",
        errors.MalformedLogError: "malformed-log",
    }
    for klass, code in mapping.items():
        if isinstance(exc, klass):
            return code
    return "internal"


def scene_message(scene: Scene) -> dict:
    return {"type": "load_scene", "scene": scene_to_dict(scene)}


def frame_message(frame: InputFrame) -> dict:
    return {"type": "frame", "frame": frame.to_dict()}


def configure_message(config: EngineConfig) -> dict:
    return {"type": "configure", "config": config.to_dict()}


def start_trial_message(spec: TrialSpec) -> dict:
    return {"type": "start_trial", "spec": spec.to_dict()}
