"""The seven per-trial measures, computed from an event log plus the trace.

Clutches are re-grabs of the trial object beyond the first. A grab handoff
(the far<->near retarget that happens mid-pinch when a summon begins) shows
up as a same-timestamp GrabEnd/GrabStart pair on the same logical object with
different raw ids; handoffs do not count as fresh grabs. Failed pinches never
count as clutches. Motion sums cover frame intervals during which the pinch
was held on both ends, truncated at trial completion.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IncompleteTrialError, MalformedLogError
from .fsm import EventKind, SemanticEvent
from .geometry import quat_angle
from .trace import InputFrame
from .warp import far_id_of


@dataclass(frozen=True, slots=True)
class MetricsRecord:
    trial_completion_time_ms: float
    acquisition_time_ms: float
    first_manipulation_duration_ms: float
    clutch_count: int
    failed_gesture_count: int
    hand_translation_m: float
    hand_rotation_deg: float

    def to_dict(self) -> dict:
        return {
            "trial_completion_time_ms": self.trial_completion_time_ms,
            "acquisition_time_ms": self.acquisition_time_ms,
            "first_manipulation_duration_ms": self.first_manipulation_duration_ms,
            "clutch_count": self.clutch_count,
            "failed_gesture_count": self.failed_gesture_count,
            "hand_translation_m": self.hand_translation_m,
            "hand_rotation_deg": self.hand_rotation_deg,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MetricsRecord":
        return cls(
            trial_completion_time_ms=float(doc["trial_completion_time_ms"]),
            acquisition_time_ms=float(doc["acquisition_time_ms"]),
            first_manipulation_duration_ms=float(doc["first_manipulation_duration_ms"]),
            clutch_count=int(doc["clutch_count"]),
            failed_gesture_count=int(doc["failed_gesture_count"]),
            hand_translation_m=float(doc["hand_translation_m"]),
            hand_rotation_deg=float(doc["hand_rotation_deg"]),
        )

MEASURE_FIELDS = (
    "trial_completion_time_ms",
    "acquisition_time_ms",
    "first_manipulation_duration_ms",
    "clutch_count",
    "failed_gesture_count",
    "hand_translation_m",
    "hand_rotation_deg",
)


def _object_id(events: list[SemanticEvent]) -> str:
    for event in events:
        if event.kind is EventKind.OBJECT_APPEAR:
            if event.id is None:
                raise MalformedLogError("ObjectAppear event carries no object id")
            return event.id
    raise IncompleteTrialError("event log has no ObjectAppear")


def compute_metrics(
    events: list[SemanticEvent],
    frames: list[InputFrame],
    object_id: str | None = None,
) -> MetricsRecord:
    """Fold one trial's event log and input trace into a MetricsRecord.

    The log must be bracketed by ObjectAppear and TrialComplete; the trial
    object defaults to the id carried by ObjectAppear.
    """
    if object_id is None:
        object_id = _object_id(events)
    t_appear = t_complete = None
    for event in events:
        if event.kind is EventKind.OBJECT_APPEAR and t_appear is None:
            t_appear = event.t_ms
        elif event.kind is EventKind.TRIAL_COMPLETE and t_complete is None:
            t_complete = event.t_ms
    if t_appear is None:
        raise IncompleteTrialError("event log has no ObjectAppear")
    if t_complete is None:
        raise IncompleteTrialError("event log has no TrialComplete")

    span = [e for e in events if t_appear <= e.t_ms <= t_complete]

    # Pinch pairing (open pinches are truncated at completion).
    pinch_starts: list[int] = []
    pinch_pairs: list[tuple[int, int]] = []
    open_pinch: int | None = None
    for event in span:
        if event.kind is EventKind.PINCH_START:
            if open_pinch is not None:
                raise MalformedLogError(f"overlapping pinch at t={event.t_ms}")
            open_pinch = event.t_ms
            pinch_starts.append(event.t_ms)
        elif event.kind is EventKind.PINCH_END:
            if open_pinch is None:
                raise MalformedLogError(f"PinchEnd without PinchStart at t={event.t_ms}")
            pinch_pairs.append((open_pinch, event.t_ms))
            open_pinch = None
    if open_pinch is not None:
        pinch_pairs.append((open_pinch, t_complete))

    completion = float(t_complete - t_appear)
    acquisition = float(pinch_starts[0] - t_appear) if pinch_starts else completion
    first_manipulation = (
        float(min(pinch_pairs[0][1], t_complete) - pinch_pairs[0][0]) if pinch_pairs else 0.0
    )

    # Grabs on the trial object, with mid-pinch handoffs collapsed.
    grabs = 0
    for i, event in enumerate(span):
        if event.kind is not EventKind.GRAB_START or event.id is None:
            continue
        if far_id_of(event.id) != object_id:
            continue
        handoff = any(
            other.kind is EventKind.GRAB_END
            and other.t_ms == event.t_ms
            and other.id is not None
            and other.id != event.id
            and far_id_of(other.id) == object_id
            for other in span[:i]
        )
        if not handoff:
            grabs += 1
    clutch_count = max(0, grabs - 1)

    failed = sum(1 for e in span if e.kind is EventKind.FAILED_PINCH)

    translation = 0.0
    rotation = 0.0
    for prev, cur in zip(frames, frames[1:]):
        if cur.t_ms > t_complete:
            break
        if prev.pinch and cur.pinch:
            translation += cur.hand_pose.position.distance_to(prev.hand_pose.position)
            rotation += quat_angle(prev.hand_pose.orientation, cur.hand_pose.orientation)

    return MetricsRecord(
        trial_completion_time_ms=completion,
        acquisition_time_ms=acquisition,
        first_manipulation_duration_ms=first_manipulation,
        clutch_count=clutch_count,
        failed_gesture_count=failed,
        hand_translation_m=translation,
        hand_rotation_deg=rotation,
    )
