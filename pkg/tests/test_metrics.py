import pytest
from hypothesis import given, strategies as st

from conftest import EYE, make_frame
from gazewarp.errors import IncompleteTrialError, MalformedLogError
from gazewarp.fsm import EventKind, SemanticEvent
from gazewarp.geometry import Pose, Ray, UnitQuat, Vec3
from gazewarp.metrics import MetricsRecord, compute_metrics
from gazewarp.scene import Space
from gazewarp.trace import InputFrame
from gazewarp.warp import proxy_id


def _ev(t, kind, id=None, space=None):
    return SemanticEvent(t, kind, id, space)


def _still_frames(times, pinch_spans=()):
    frames = []
    for t in times:
        pinched = any(lo <= t <= hi for lo, hi in pinch_spans)
        frames.append(make_frame(t, pinch=pinched))
    return frames


GOLDEN_LOG = [
    _ev(0, EventKind.OBJECT_APPEAR, "a"),
    _ev(500, EventKind.PINCH_START),
    _ev(500, EventKind.GRAB_START, "a", Space.FAR),
    _ev(1500, EventKind.GRAB_END, "a"),
    _ev(1500, EventKind.PINCH_END),
    _ev(1500, EventKind.TRIAL_COMPLETE, "a"),
]


def test_golden_single_grab_log():
    frames = _still_frames(range(0, 1600, 10), pinch_spans=[(500, 1500)])
    record = compute_metrics(GOLDEN_LOG, frames)
    assert record.trial_completion_time_ms == 1500
    assert record.acquisition_time_ms == 500
    assert record.first_manipulation_duration_ms == 1000
    assert record.clutch_count == 0
    assert record.failed_gesture_count == 0
    assert record.hand_translation_m == 0.0
    assert record.hand_rotation_deg == 0.0


def test_two_grabs_is_one_clutch():
    log = [
        _ev(0, EventKind.OBJECT_APPEAR, "a"),
        _ev(100, EventKind.PINCH_START),
        _ev(100, EventKind.GRAB_START, "a", Space.FAR),
        _ev(300, EventKind.GRAB_END, "a"),
        _ev(300, EventKind.PINCH_END),
        _ev(400, EventKind.PINCH_START),
        _ev(400, EventKind.GRAB_START, "a", Space.FAR),
        _ev(600, EventKind.GRAB_END, "a"),
        _ev(600, EventKind.PINCH_END),
        _ev(900, EventKind.TRIAL_COMPLETE, "a"),
    ]
    frames = _still_frames(range(0, 1000, 10), pinch_spans=[(100, 300), (400, 600)])
    record = compute_metrics(log, frames)
    assert record.clutch_count == 1
    assert record.first_manipulation_duration_ms == 200


def test_handoff_retarget_does_not_count_as_clutch():
    # Mid-pinch far->near retarget: GrabEnd and the proxy GrabStart share a
    # timestamp; logically still one grab.
    log = [
        _ev(0, EventKind.OBJECT_APPEAR, "a"),
        _ev(100, EventKind.PINCH_START),
        _ev(100, EventKind.GRAB_START, "a", Space.FAR),
        _ev(200, EventKind.SUMMON_START, "a"),
        _ev(200, EventKind.GRAB_END, "a"),
        _ev(200, EventKind.GRAB_START, proxy_id("a"), Space.NEAR),
        _ev(600, EventKind.GRAB_END, proxy_id("a")),
        _ev(600, EventKind.PINCH_END),
        _ev(650, EventKind.SUMMON_END),
        _ev(950, EventKind.TRIAL_COMPLETE, "a"),
    ]
    frames = _still_frames(range(0, 1000, 10), pinch_spans=[(100, 600)])
    record = compute_metrics(log, frames)
    assert record.clutch_count == 0


def test_failed_pinches_counted_but_not_clutches():
    log = [
        _ev(0, EventKind.OBJECT_APPEAR, "a"),
        _ev(50, EventKind.PINCH_START),
        _ev(50, EventKind.FAILED_PINCH),
        _ev(80, EventKind.PINCH_END),
        _ev(100, EventKind.PINCH_START),
        _ev(100, EventKind.GRAB_START, "a", Space.FAR),
        _ev(300, EventKind.GRAB_END, "a"),
        _ev(300, EventKind.PINCH_END),
        _ev(700, EventKind.TRIAL_COMPLETE, "a"),
    ]
    frames = _still_frames(range(0, 750, 10), pinch_spans=[(50, 80), (100, 300)])
    record = compute_metrics(log, frames)
    assert record.failed_gesture_count == 1
    assert record.clutch_count == 0
    assert record.acquisition_time_ms == 50  # first pinch, even a failed one


def test_split_grab_increments_clutch_only():
    base = [
        _ev(0, EventKind.OBJECT_APPEAR, "a"),
        _ev(100, EventKind.PINCH_START),
        _ev(100, EventKind.GRAB_START, "a", Space.FAR),
        _ev(500, EventKind.GRAB_END, "a"),
        _ev(500, EventKind.PINCH_END),
        _ev(900, EventKind.TRIAL_COMPLETE, "a"),
    ]
    split = [
        _ev(0, EventKind.OBJECT_APPEAR, "a"),
        _ev(100, EventKind.PINCH_START),
        _ev(100, EventKind.GRAB_START, "a", Space.FAR),
        _ev(300, EventKind.GRAB_END, "a"),
        _ev(300, EventKind.PINCH_END),
        _ev(320, EventKind.PINCH_START),
        _ev(320, EventKind.GRAB_START, "a", Space.FAR),
        _ev(500, EventKind.GRAB_END, "a"),
        _ev(500, EventKind.PINCH_END),
        _ev(900, EventKind.TRIAL_COMPLETE, "a"),
    ]
    frames = _still_frames(range(0, 950, 10), pinch_spans=[(100, 500)])
    a = compute_metrics(base, frames)
    b = compute_metrics(split, frames)
    assert b.clutch_count == a.clutch_count + 1
    assert b.hand_translation_m == a.hand_translation_m
    assert b.hand_rotation_deg == a.hand_rotation_deg


def _moving_frames():
    frames = []
    for i, t in enumerate(range(0, 1000, 10)):
        pinched = 200 <= t <= 800
        hand = Vec3(0.001 * i, -0.3, 0.2)
        quat = UnitQuat.from_axis_angle(Vec3(0, 0, 1), 0.5 * i)
        frames.append(
            InputFrame(
                t_ms=t,
                gaze=Ray(EYE, Vec3(0, 0, 1)),
                head_pose=Pose(EYE, UnitQuat.identity()),
                hand_pose=Pose(hand, quat),
                pinch=pinched,
            )
        )
    return frames


def _simple_log(t_complete=1000):
    return [
        _ev(0, EventKind.OBJECT_APPEAR, "a"),
        _ev(200, EventKind.PINCH_START),
        _ev(200, EventKind.GRAB_START, "a", Space.FAR),
        _ev(800, EventKind.GRAB_END, "a"),
        _ev(800, EventKind.PINCH_END),
        _ev(t_complete, EventKind.TRIAL_COMPLETE, "a"),
    ]


def test_motion_sums_cover_pinch_held_intervals_only():
    frames = _moving_frames()
    record = compute_metrics(_simple_log(990), frames)
    # 60 intervals with both ends pinched (t=200..800), 1 mm and 0.5 deg each.
    assert record.hand_translation_m == pytest.approx(0.060, abs=1e-9)
    assert record.hand_rotation_deg == pytest.approx(30.0, abs=1e-6)


def test_motion_truncated_at_completion():
    frames = _moving_frames()
    full = compute_metrics(_simple_log(990), frames)
    early_log = [
        _ev(0, EventKind.OBJECT_APPEAR, "a"),
        _ev(200, EventKind.PINCH_START),
        _ev(200, EventKind.GRAB_START, "a", Space.FAR),
        _ev(500, EventKind.TRIAL_COMPLETE, "a"),
    ]
    early = compute_metrics(early_log, frames)
    assert early.hand_translation_m < full.hand_translation_m
    assert early.first_manipulation_duration_ms == 300  # truncated open pinch


def test_metrics_invariant_under_time_translation():
    frames = _moving_frames()
    record = compute_metrics(_simple_log(990), frames)
    shift = 12345
    shifted_log = [SemanticEvent(e.t_ms + shift, e.kind, e.id, e.space) for e in _simple_log(990)]
    shifted_frames = [
        InputFrame(f.t_ms + shift, f.gaze, f.head_pose, f.hand_pose, f.pinch, f.hand_valid)
        for f in frames
    ]
    shifted = compute_metrics(shifted_log, shifted_frames)
    assert shifted == record


@given(st.integers(min_value=0, max_value=359))
def test_hand_rotation_invariant_under_left_composition(angle):
    prefix = UnitQuat.from_axis_angle(Vec3(1, 2, 3), float(angle))
    frames = _moving_frames()
    twisted = [
        InputFrame(
            f.t_ms,
            f.gaze,
            f.head_pose,
            Pose(f.hand_pose.position, prefix.compose(f.hand_pose.orientation)),
            f.pinch,
        )
        for f in frames
    ]
    a = compute_metrics(_simple_log(990), frames)
    b = compute_metrics(_simple_log(990), twisted)
    assert b.hand_rotation_deg == pytest.approx(a.hand_rotation_deg, abs=1e-6)
    assert b.hand_translation_m == pytest.approx(a.hand_translation_m, abs=1e-12)


def test_hand_translation_invariant_under_world_rotation():
    spin = UnitQuat.from_axis_angle(Vec3(0, 1, 0), 73.0)
    frames = _moving_frames()
    rotated = [
        InputFrame(
            f.t_ms,
            f.gaze,
            f.head_pose,
            Pose(spin.rotate(f.hand_pose.position), f.hand_pose.orientation),
            f.pinch,
        )
        for f in frames
    ]
    a = compute_metrics(_simple_log(990), frames)
    b = compute_metrics(_simple_log(990), rotated)
    assert b.hand_translation_m == pytest.approx(a.hand_translation_m, abs=1e-12)


def test_incomplete_logs_rejected():
    frames = _still_frames(range(0, 100, 10))
    with pytest.raises(IncompleteTrialError):
        compute_metrics([_ev(0, EventKind.OBJECT_APPEAR, "a")], frames)
    with pytest.raises(IncompleteTrialError):
        compute_metrics([_ev(10, EventKind.TRIAL_COMPLETE, "a")], frames)


def test_overlapping_pinches_rejected():
    log = [
        _ev(0, EventKind.OBJECT_APPEAR, "a"),
        _ev(10, EventKind.PINCH_START),
        _ev(20, EventKind.PINCH_START),
        _ev(30, EventKind.TRIAL_COMPLETE, "a"),
    ]
    with pytest.raises(MalformedLogError):
        compute_metrics(log, _still_frames(range(0, 40, 10)))


def test_record_round_trip():
    record = MetricsRecord(1500, 500, 1000, 1, 2, 0.25, 90.0)
    assert MetricsRecord.from_dict(record.to_dict()) == record
