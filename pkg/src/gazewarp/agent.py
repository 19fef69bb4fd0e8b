"""Scripted docking agents: deterministic synthetic input traces.

An agent plans hand waypoints through the same control-display mapping the
engine will apply, so a synthesized trace, replayed under its technique,
completes the trial. Hand translation follows a minimum-jerk profile and
wrist orientation interpolates spherically; gaze shifts happen after the
reaction latency and are sample-and-held at the eye-tracker rate onto the
frame grid. Rotation demands beyond the per-grab wrist comfort produce
deliberate clutch cycles: ceil(rotation / rotation_per_grab) grabs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, fields

from .docking import TrialSpec, TrialState, make_trial
from .errors import ConfigError
from .fsm import AlignmentDetector, EngineConfig, Technique, alignment_update
from .geometry import RIGHT, Pose, Ray, UnitQuat, Vec3
from .trace import InputFrame
from .warp import Placement


@dataclass(frozen=True, slots=True)
class AgentProfile:
    """Scripted stand-in for a participant."""

    reaction_ms: float = 300.0
    hand_speed_mps: float = 0.6
    rotation_per_grab_deg: float = 60.0
    technique: Technique = Technique.BASELINE
    noise_seed: int = 1
    rotation_speed_dps: float = 120.0
    frame_rate_hz: float = 90.0
    eye_rate_hz: float = 30.0

    def __post_init__(self):
        if self.reaction_ms <= 0 or self.hand_speed_mps <= 0 or self.rotation_speed_dps <= 0:
            raise ConfigError("agent profile values must be positive")
        if not 0.0 < self.rotation_per_grab_deg <= 180.0:
            raise ConfigError("rotation_per_grab_deg must be in (0, 180]")
        if self.frame_rate_hz <= 0 or self.eye_rate_hz <= 0:
            raise ConfigError("rates must be positive")

    def to_dict(self) -> dict:
        doc = {f.name: getattr(self, f.name) for f in fields(self)}
        doc["technique"] = self.technique.value
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "AgentProfile":
        names = {f.name for f in fields(cls)} - {"technique"}
        kwargs = {k: doc[k] for k in doc.keys() & names}
        return cls(technique=Technique(doc.get("technique", "baseline")), **kwargs)


def _minjerk(tau: float) -> float:
    return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau))


class _Builder:
    """Emits frames while mirroring the engine's alignment detector, so the
    script knows exactly when and where summoning triggers."""

    def __init__(self, profile: AgentProfile, config: EngineConfig, eye: Vec3, rest: Vec3):
        self.profile = profile
        self.config = config
        self.eye = eye
        self.frames: list[InputFrame] = []
        self.k = 0
        self.stride = max(1, round(profile.frame_rate_hz / profile.eye_rate_hz))
        self.hand_pos = rest
        self.hand_quat = UnitQuat.identity()
        self.pinch = False
        self.gaze_point = eye + Vec3(0.0, 0.0, 1.0)
        self.held_dir: Vec3 | None = None
        self.detector: AlignmentDetector = config.detector
        self.aligned = False
        self.entry_pos: Vec3 | None = None
        self.entry_ray: Ray | None = None

    def look_at(self, point: Vec3):
        self.gaze_point = point

    def set_pinch(self, down: bool):
        self.pinch = down

    def last_gaze(self) -> Ray:
        return self.frames[-1].gaze

    def emit(self):
        if self.k % self.stride == 0 or self.held_dir is None:
            self.held_dir = (self.gaze_point - self.eye).normalized()
        gaze = Ray(self.eye, self.held_dir)
        frame = InputFrame(
            t_ms=round(1000.0 * self.k / self.profile.frame_rate_hz),
            gaze=gaze,
            head_pose=Pose(self.eye, UnitQuat.identity()),
            hand_pose=Pose(self.hand_pos, self.hand_quat),
            pinch=self.pinch,
        )
        self.frames.append(frame)
        self.k += 1
        was_aligned = self.aligned
        self.detector, self.aligned = alignment_update(self.detector, gaze, self.hand_pos)
        if self.aligned and not was_aligned:
            self.entry_pos = self.hand_pos
            self.entry_ray = gaze

    def hold(self, ms: float):
        for _ in range(max(1, math.ceil(ms * self.profile.frame_rate_hz / 1000.0))):
            self.emit()

    def move_hand(
        self,
        pos: Vec3 | None = None,
        quat: UnitQuat | None = None,
        *,
        track_gaze: bool = False,
    ):
        p0, q0 = self.hand_pos, self.hand_quat
        p1 = pos if pos is not None else p0
        q1 = quat if quat is not None else q0
        dist = p1.distance_to(p0)
        angle = math.degrees(2.0 * math.acos(min(1.0, abs(q0.dot(q1)))))
        dur_s = max(
            dist / self.profile.hand_speed_mps,
            angle / self.profile.rotation_speed_dps,
            2.0 / self.profile.frame_rate_hz,
        )
        steps = max(1, math.ceil(dur_s * self.profile.frame_rate_hz))
        for i in range(1, steps + 1):
            s = _minjerk(i / steps)
            self.hand_pos = p0.lerp(p1, s)
            self.hand_quat = q0.slerp(q1, s)
            if track_gaze:
                self.look_at(self.hand_pos)
            self.emit()
        self.hand_pos = p1
        self.hand_quat = q1


def _segment_depth_range(eye: Vec3, a: Vec3, b: Vec3) -> tuple[float, float]:
    """Min/max distance from the eye over the straight segment a..b."""
    ab = b - a
    len_sq = ab.dot(ab)
    if len_sq < 1e-18:
        d = a.distance_to(eye)
        return d, d
    t = max(0.0, min(1.0, (eye - a).dot(ab) / len_sq))
    closest = a + ab.scaled(t)
    return closest.distance_to(eye), max(a.distance_to(eye), b.distance_to(eye))


def _choose_summon_depth(
    eye: Vec3,
    direction: Vec3,
    far_center: Vec3,
    delta_far: Vec3,
    reorientation: UnitQuat,
    gain_override: float | None,
) -> float:
    """Hand depth for summoning that keeps the whole manipulation path inside
    the relaxed alignment depth band (with margin). Falls back to the least-bad
    candidate when nothing fits (demands beyond the benchmark grid)."""
    far_dist = far_center.distance_to(eye)
    rotated = reorientation.rotate(delta_far)
    best_d0, best_margin = 0.40, float("-inf")
    d0 = 0.32
    while d0 <= 0.4951:
        start = eye + direction.scaled(d0)
        scale = (1.0 / gain_override) if gain_override else d0 / far_dist
        end = start + rotated.scaled(scale)
        lo, hi = _segment_depth_range(eye, start, end)
        if lo >= 0.262 and hi <= 0.638:
            return d0
        margin = min(lo - 0.25, 0.65 - hi)
        if margin > best_margin:
            best_d0, best_margin = d0, margin
        d0 += 0.005
    return best_d0


def _grab_count(rotation_deg: float, per_grab_deg: float) -> int:
    return max(1, math.ceil(rotation_deg / per_grab_deg - 1e-9))


def synthesize_trace(
    spec: TrialSpec,
    profile: AgentProfile,
    config: EngineConfig,
    eye: Vec3 = Vec3(),
) -> list[InputFrame]:
    """Deterministic trace that completes the trial under the configured
    technique when replayed through the engine."""
    if profile.technique is not config.technique:
        raise ConfigError(
            f"profile technique {profile.technique.value} does not match "
            f"config technique {config.technique.value}"
        )
    trial = make_trial(spec, eye)
    rng = random.Random(f"{profile.noise_seed}:{spec.seed}:{profile.technique.value}")
    jitter = Vec3(
        rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01)
    )
    rest = eye + Vec3(0.12, -0.36, 0.18) + jitter

    builder = _Builder(profile, config, eye, rest)
    n_grabs = _grab_count(spec.rotation_magnitude_deg, profile.rotation_per_grab_deg)
    quat_waypoints = [
        trial.object.pose.orientation.slerp(trial.target.pose.orientation, i / n_grabs)
        for i in range(n_grabs + 1)
    ]

    builder.look_at(trial.object.pose.position)
    builder.hold(profile.reaction_ms)

    if profile.technique is Technique.BASELINE:
        _run_baseline(builder, trial, quat_waypoints)
    elif profile.technique is Technique.GAZE_TO_HAND:
        _run_gaze_to_hand(builder, config, trial, quat_waypoints)
    else:
        _run_hand_to_gaze(builder, config, trial, quat_waypoints)

    builder.hold(450.0)  # completion dwell plus slack
    return builder.frames


def _run_baseline(builder: _Builder, trial: TrialState, quat_waypoints: list[UnitQuat]):
    eye = builder.eye
    target_pos = trial.target.pose.position
    tracked_pos = trial.object.pose.position
    tracked_quat = trial.object.pose.orientation
    n = len(quat_waypoints) - 1
    builder.set_pinch(True)
    builder.emit()
    gain = tracked_pos.distance_to(eye) / builder.hand_pos.distance_to(eye)
    for i in range(1, n + 1):
        hand_end = builder.hand_pos + (target_pos - tracked_pos).scaled(1.0 / gain)
        dq = quat_waypoints[i].compose(tracked_quat.inverse())
        builder.move_hand(hand_end, dq.compose(builder.hand_quat))
        tracked_pos, tracked_quat = target_pos, quat_waypoints[i]
        builder.hold(30.0)
        builder.set_pinch(False)
        builder.emit()
        if i < n:
            # Clutch: recenter the wrist, keep gaze on the moved object.
            builder.look_at(tracked_pos)
            builder.move_hand(quat=UnitQuat.identity())
            builder.hold(80.0)
            builder.set_pinch(True)
            builder.emit()
            gain = tracked_pos.distance_to(eye) / builder.hand_pos.distance_to(eye)


def _summon_geometry(
    builder: _Builder,
    config: EngineConfig,
    trial: TrialState,
    anchor_pos: Vec3,
    anchor_ray: Ray,
) -> tuple[Vec3, Vec3, float, UnitQuat]:
    """Near center, far center, scale, and re-orientation exactly as the
    engine derives them at the summon moment."""
    eye = builder.eye
    if config.placement is Placement.AT_HAND:
        near_center = anchor_pos
    else:
        near_center = anchor_ray.point_at(anchor_pos.distance_to(eye))
    far_center = trial.object.pose.position
    if config.gain_override:
        scale = 1.0 / config.gain_override
    else:
        scale = near_center.distance_to(eye) / far_center.distance_to(eye)
    return near_center, far_center, scale, config.resolved_reorientation()


def _manipulate_direct(
    builder: _Builder,
    config: EngineConfig,
    trial: TrialState,
    quat_waypoints: list[UnitQuat],
    anchor_pos: Vec3,
    anchor_ray: Ray,
):
    """Drive the grabbed proxy to the target image through 1:1 direct motion,
    clutching between rotation chunks, then break alignment to commit."""
    near_center, far_center, scale, rot = _summon_geometry(
        builder, config, trial, anchor_pos, anchor_ray
    )
    target_pos = trial.target.pose.position
    proxy_target = near_center + rot.rotate(target_pos - far_center).scaled(scale)
    proxy_pos = near_center
    proxy_quat = rot.compose(trial.object.pose.orientation)
    n = len(quat_waypoints) - 1
    for i in range(1, n + 1):
        want_quat = rot.compose(quat_waypoints[i])
        dq = want_quat.compose(proxy_quat.inverse())
        hand_end = builder.hand_pos + (proxy_target - proxy_pos)
        builder.move_hand(hand_end, dq.compose(builder.hand_quat), track_gaze=True)
        proxy_pos, proxy_quat = proxy_target, want_quat
        builder.hold(30.0)
        builder.set_pinch(False)
        builder.emit()
        if i < n:
            builder.move_hand(quat=UnitQuat.identity(), track_gaze=True)
            builder.hold(80.0)
            builder.set_pinch(True)
            builder.emit()
    # Break the alignment: gaze back to far space, hand drops to rest.
    builder.look_at(target_pos)
    builder.hold(2000.0 / builder.profile.eye_rate_hz)
    builder.move_hand(builder.eye + Vec3(0.12, -0.36, 0.18))


def _run_gaze_to_hand(
    builder: _Builder, config: EngineConfig, trial: TrialState, quat_waypoints: list[UnitQuat]
):
    eye = builder.eye
    obj_pos = trial.object.pose.position
    gaze_dir = (obj_pos - eye).normalized()
    start_dir = UnitQuat.from_axis_angle(RIGHT, 35.0).rotate(gaze_dir)
    d0 = _choose_summon_depth(
        eye,
        start_dir,
        obj_pos,
        trial.target.pose.position - obj_pos,
        config.resolved_reorientation(),
        config.gain_override,
    )
    builder.move_hand(eye + start_dir.scaled(d0))
    builder.hold(60.0)
    builder.set_pinch(True)  # indirect grab; the hand stays put
    builder.emit()
    builder.hold(30.0)
    builder.look_at(builder.hand_pos)  # trigger: gaze to the pinching hand
    builder.hold(2000.0 / builder.profile.eye_rate_hz + 30.0)
    if builder.entry_pos is None or builder.entry_ray is None:
        raise ConfigError("gaze-to-hand alignment never engaged; check detector bands")
    _manipulate_direct(
        builder, config, trial, quat_waypoints, builder.entry_pos, builder.entry_ray
    )


def _run_hand_to_gaze(
    builder: _Builder, config: EngineConfig, trial: TrialState, quat_waypoints: list[UnitQuat]
):
    eye = builder.eye
    obj_pos = trial.object.pose.position
    gaze_dir = (obj_pos - eye).normalized()
    d0 = _choose_summon_depth(
        eye,
        gaze_dir,
        obj_pos,
        trial.target.pose.position - obj_pos,
        config.resolved_reorientation(),
        config.gain_override,
    )
    if config.summon_on_pinch:
        # Raise the hand into the gaze line, then pinch: summon + grab at once.
        builder.move_hand(eye + gaze_dir.scaled(d0))
        builder.hold(60.0)
        builder.set_pinch(True)
        builder.emit()
        anchor_pos, anchor_ray = builder.hand_pos, builder.last_gaze()
    else:
        # Entering the alignment band summons; pinch on the proxy afterwards.
        approach_dir = UnitQuat.from_axis_angle(RIGHT, 20.0).rotate(gaze_dir)
        builder.move_hand(eye + approach_dir.scaled(d0))
        builder.hold(60.0)
        if builder.entry_pos is None or builder.entry_ray is None:
            raise ConfigError("hand-to-gaze alignment never engaged; check detector bands")
        anchor_pos, anchor_ray = builder.entry_pos, builder.entry_ray
        near_center, _, _, _ = _summon_geometry(builder, config, trial, anchor_pos, anchor_ray)
        builder.move_hand(near_center)
        builder.hold(30.0)
        builder.set_pinch(True)
        builder.emit()
    builder.hold(30.0)
    _manipulate_direct(builder, config, trial, quat_waypoints, anchor_pos, anchor_ray)
