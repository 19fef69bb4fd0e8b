"""6DOF docking benchmark: trial generation, session composition, completion.

A trial spawns a cube 2 m in front of the eye plus a non-interactive target
cube displaced by twice the object's metric width along +X/-X/+Z/-Z and
rotated 45 or 90 degrees about a signed diagonal axis. The trial completes
once the positional offset falls strictly below 20% of the object's width
and the orientation difference is within 15 degrees, held for 300 ms.
"""

from __future__ import annotations

import json
import random
import zlib
from dataclasses import dataclass, replace
from enum import Enum
from typing import IO, Optional

from .errors import ConfigError, SchemaError, SequencingError
from .fsm import Technique
from .geometry import FORWARD, Pose, UnitQuat, Vec3, quat_angle, width_from_angle
from .scene import Scene, SceneObject, Space

TRIAL_OBJECT_ID = "trial-object"
TRIAL_TARGET_ID = "trial-target"

OBJECT_SIZES_DEG = (7.5, 12.5)
ROTATION_MAGNITUDES_DEG = (45.0, 90.0)

DEFAULT_POSITION_THRESHOLD_FRAC = 0.2
DEFAULT_ROTATION_THRESHOLD_DEG = 15.0
DEFAULT_DWELL_REQUIRED_MS = 300.0

SESSION_SCHEMA_VERSION = 1


class DisplacementDir(Enum):
    POS_X = "+x"
    NEG_X = "-x"
    POS_Z = "+z"
    NEG_Z = "-z"

    def unit(self) -> Vec3:
        return {
            DisplacementDir.POS_X: Vec3(1.0, 0.0, 0.0),
            DisplacementDir.NEG_X: Vec3(-1.0, 0.0, 0.0),
            DisplacementDir.POS_Z: Vec3(0.0, 0.0, 1.0),
            DisplacementDir.NEG_Z: Vec3(0.0, 0.0, -1.0),
        }[self]


class AxisPair(Enum):
    XY = "xy"
    YZ = "yz"
    XZ = "xz"

    def basis(self) -> tuple[Vec3, Vec3]:
        return {
            AxisPair.XY: (Vec3(1, 0, 0), Vec3(0, 1, 0)),
            AxisPair.YZ: (Vec3(0, 1, 0), Vec3(0, 0, 1)),
            AxisPair.XZ: (Vec3(1, 0, 0), Vec3(0, 0, 1)),
        }[self]


@dataclass(frozen=True, slots=True)
class TrialSpec:
    object_size_deg: float
    rotation_magnitude_deg: float
    displacement_dir: DisplacementDir
    axis_pair: AxisPair
    spawn_distance_m: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.object_size_deg not in OBJECT_SIZES_DEG:
            raise ConfigError(f"object size must be one of {OBJECT_SIZES_DEG}")
        if self.rotation_magnitude_deg not in ROTATION_MAGNITUDES_DEG:
            raise ConfigError(f"rotation magnitude must be one of {ROTATION_MAGNITUDES_DEG}")
        if self.spawn_distance_m <= 0.0:
            raise ConfigError("spawn distance must be positive")

    def width_m(self) -> float:
        """Metric width realizing the nominal visual angle at spawn distance."""
        return width_from_angle(self.object_size_deg, self.spawn_distance_m)

    def to_dict(self) -> dict:
        return {
            "object_size_deg": self.object_size_deg,
            "rotation_magnitude_deg": self.rotation_magnitude_deg,
            "displacement_dir": self.displacement_dir.value,
            "axis_pair": self.axis_pair.value,
            "spawn_distance_m": self.spawn_distance_m,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TrialSpec":
        return cls(
            object_size_deg=float(doc["object_size_deg"]),
            rotation_magnitude_deg=float(doc["rotation_magnitude_deg"]),
            displacement_dir=DisplacementDir(doc["displacement_dir"]),
            axis_pair=AxisPair(doc["axis_pair"]),
            spawn_distance_m=float(doc.get("spawn_distance_m", 2.0)),
            seed=int(doc.get("seed", 0)),
        )


@dataclass(frozen=True, slots=True)
class TrialState:
    """Live docking trial: the manipulable object, its target, dwell progress."""

    spec: TrialSpec
    object: SceneObject
    target: SceneObject
    dwell_elapsed_ms: float = 0.0
    completed_at_ms: Optional[int] = None
    hold_start_ms: Optional[int] = None
    last_step_ms: Optional[int] = None

    def width_m(self) -> float:
        return self.spec.width_m()


def rotation_axis(pair: AxisPair, sign_a: int, sign_b: int) -> Vec3:
    """Signed diagonal axis: normalize(s1*e_a + s2*e_b)."""
    ea, eb = pair.basis()
    return (ea.scaled(float(sign_a)) + eb.scaled(float(sign_b))).normalized()


def make_trial(spec: TrialSpec, eye: Vec3 = Vec3()) -> TrialState:
    """Deterministically instantiate a trial's object and target from its spec."""
    width = spec.width_m()
    half = width / 2.0
    rng = random.Random(spec.seed)
    sign_a = rng.choice((1, -1))
    sign_b = rng.choice((1, -1))
    axis = rotation_axis(spec.axis_pair, sign_a, sign_b)

    object_pos = eye + FORWARD.scaled(spec.spawn_distance_m)
    target_pos = object_pos + spec.displacement_dir.unit().scaled(2.0 * width)
    obj = SceneObject(
        id=TRIAL_OBJECT_ID,
        pose=Pose(object_pos, UnitQuat.identity()),
        half_extents=Vec3(half, half, half),
        interactable=True,
        space=Space.FAR,
    )
    target = SceneObject(
        id=TRIAL_TARGET_ID,
        pose=Pose(target_pos, UnitQuat.from_axis_angle(axis, spec.rotation_magnitude_deg)),
        half_extents=Vec3(half, half, half),
        interactable=False,
        space=Space.FAR,
    )
    return TrialState(spec=spec, object=obj, target=target)


def trial_scene(trial: TrialState, eye: Vec3 = Vec3()) -> Scene:
    return Scene.from_objects([trial.object, trial.target], eye=eye)


def conditions_met(
    trial: TrialState,
    object_pose: Pose,
    threshold_pos_frac: float = DEFAULT_POSITION_THRESHOLD_FRAC,
    threshold_rot_deg: float = DEFAULT_ROTATION_THRESHOLD_DEG,
) -> bool:
    """Position strictly below the fraction of width; rotation within (closed)."""
    offset = object_pose.position.distance_to(trial.target.pose.position)
    if offset >= threshold_pos_frac * trial.width_m():
        return False
    return quat_angle(object_pose.orientation, trial.target.pose.orientation) <= threshold_rot_deg


def completion_step(
    trial: TrialState,
    now_ms: int,
    object_pose: Optional[Pose] = None,
    threshold_pos_frac: float = DEFAULT_POSITION_THRESHOLD_FRAC,
    threshold_rot_deg: float = DEFAULT_ROTATION_THRESHOLD_DEG,
    dwell_required_ms: float = DEFAULT_DWELL_REQUIRED_MS,
) -> TrialState:
    """Advance completion detection by one frame.

    Dwell is the time since the start of the current unbroken run of frames
    meeting both conditions; completion stamps the first frame where dwell
    reaches the requirement. Calls after completion are idempotent.
    """
    if trial.completed_at_ms is not None:
        return trial
    if trial.last_step_ms is not None and now_ms <= trial.last_step_ms:
        raise SequencingError(
            f"completion_step timestamp {now_ms} does not increase past {trial.last_step_ms}"
        )
    pose = object_pose if object_pose is not None else trial.object.pose
    trial = replace(trial, object=trial.object.moved_to(pose), last_step_ms=now_ms)
    if conditions_met(trial, pose, threshold_pos_frac, threshold_rot_deg):
        start = trial.hold_start_ms if trial.hold_start_ms is not None else now_ms
        dwell = float(now_ms - start)
        completed = now_ms if dwell >= dwell_required_ms else None
        return replace(
            trial,
            hold_start_ms=start,
            dwell_elapsed_ms=min(dwell, dwell_required_ms),
            completed_at_ms=completed,
        )
    return replace(trial, hold_start_ms=None, dwell_elapsed_ms=0.0)


# ---------------------------------------------------------------------------
# Session composition


@dataclass(frozen=True, slots=True)
class SessionEntry:
    technique: Technique
    block: int
    spec: TrialSpec


# Balanced Latin square for three techniques: forward cyclic orders plus
# their reversals, so each technique precedes and follows every other
# equally often across seeds.
_TECHNIQUE_ORDERS = (
    (Technique.BASELINE, Technique.GAZE_TO_HAND, Technique.HAND_TO_GAZE),
    (Technique.GAZE_TO_HAND, Technique.HAND_TO_GAZE, Technique.BASELINE),
    (Technique.HAND_TO_GAZE, Technique.BASELINE, Technique.GAZE_TO_HAND),
    (Technique.HAND_TO_GAZE, Technique.GAZE_TO_HAND, Technique.BASELINE),
    (Technique.BASELINE, Technique.HAND_TO_GAZE, Technique.GAZE_TO_HAND),
    (Technique.GAZE_TO_HAND, Technique.BASELINE, Technique.HAND_TO_GAZE),
)


def trial_seed(
    technique: Technique,
    rotation_deg: float,
    size_deg: float,
    direction: DisplacementDir,
    pair: AxisPair,
) -> int:
    """Stable per-condition seed so the trial multiset is participant-independent."""
    key = f"{technique.value}|{rotation_deg}|{size_deg}|{direction.value}|{pair.value}"
    return zlib.crc32(key.encode("ascii"))


def make_session(participant_seed: int) -> list[SessionEntry]:
    """Ordered 144-trial session: 3 techniques x 2 rotations x 2 sizes blocks
    of 12 trials (the full 4-direction x 3-axis-pair cross), technique order
    counterbalanced by a balanced Latin square, block-internal order shuffled.
    """
    rng = random.Random(participant_seed)
    techniques = _TECHNIQUE_ORDERS[participant_seed % len(_TECHNIQUE_ORDERS)]
    entries: list[SessionEntry] = []
    block_index = 0
    for technique in techniques:
        cells = [(r, s) for r in ROTATION_MAGNITUDES_DEG for s in OBJECT_SIZES_DEG]
        rng.shuffle(cells)
        for rotation_deg, size_deg in cells:
            specs = [
                TrialSpec(
                    object_size_deg=size_deg,
                    rotation_magnitude_deg=rotation_deg,
                    displacement_dir=direction,
                    axis_pair=pair,
                    seed=trial_seed(technique, rotation_deg, size_deg, direction, pair),
                )
                for direction in DisplacementDir
                for pair in AxisPair
            ]
            rng.shuffle(specs)
            entries.extend(SessionEntry(technique, block_index, spec) for spec in specs)
            block_index += 1
    return entries


def session_to_dict(participant_seed: int, entries: list[SessionEntry]) -> dict:
    return {
        "schema": SESSION_SCHEMA_VERSION,
        "participant_seed": participant_seed,
        "trials": [
            {"technique": e.technique.value, "block": e.block, "spec": e.spec.to_dict()}
            for e in entries
        ],
    }


def session_from_dict(doc: dict, *, path: str | None = None) -> tuple[int, list[SessionEntry]]:
    if doc.get("schema") != SESSION_SCHEMA_VERSION:
        raise SchemaError(
            f"unsupported session schema {doc.get('schema')!r}", path=path, field="schema"
        )
    try:
        entries = [
            SessionEntry(
                technique=Technique(t["technique"]),
                block=int(t["block"]),
                spec=TrialSpec.from_dict(t["spec"]),
            )
            for t in doc["trials"]
        ]
        return int(doc["participant_seed"]), entries
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad session document: {exc!r}", path=path) from None


def save_session(participant_seed: int, entries: list[SessionEntry], stream: IO[str]) -> None:
    json.dump(session_to_dict(participant_seed, entries), stream, indent=2, sort_keys=True)
    stream.write("\n")


def load_session(path: str) -> tuple[int, list[SessionEntry]]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}", path=path) from None
    return session_from_dict(doc, path=path)
