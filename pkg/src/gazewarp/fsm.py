"""Five-state gaze+pinch interaction machine with hysteretic alignment.

States: Idle, Hovering, IndirectManipulation, Summoning, DirectManipulation.
A frame tick may traverse several edges (e.g. an aligned pinch summons and
grabs in the same frame, summon preceding grab); every traversed edge is
reported so conformance tests can check the reachable edge set exactly.

Technique gating:
  * BASELINE      - pinch grabs the gazed target indirectly; alignment is
                    ignored, so the summoned states are unreachable.
  * GAZE_TO_HAND  - indirect grab first; shifting gaze onto the hand while
                    pinching warps the context to the hand for direct
                    manipulation.
  * HAND_TO_GAZE  - raising the hand into the gaze line summons the context;
                    pinching a proxy manipulates it directly. There is no
                    indirect path in this technique.

Event log files are JSON lines, one event per line, integer-ms timestamps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import IO, Iterable, Optional, Union

from .errors import ConfigError, DegenerateInputError, SchemaError, SequencingError
from .geometry import Ray, UnitQuat, Vec3, alignment_angle
from .scene import Scene, SceneObject, Space, gaze_target
from .trace import InputFrame
from .warp import (
    TOP_VIEW_REORIENTATION,
    GrabState,
    Placement,
    ProxyBinding,
    SummonMode,
    apply_grab_delta,
    capture_context,
    cd_ratio,
    default_context_radius,
    map_near_to_far,
    summon,
)


class Technique(Enum):
    BASELINE = "baseline"
    GAZE_TO_HAND = "gaze_to_hand"
    HAND_TO_GAZE = "hand_to_gaze"


@dataclass(frozen=True, slots=True)
class AlignmentDetector:
    """Hysteretic gaze-hand alignment state: enter on the tight band, leave
    only when the relaxed band is violated."""

    aligned: bool = False
    enter_angle_deg: float = 25.0
    exit_angle_deg: float = 30.0
    enter_depth_m: tuple[float, float] = (0.3, 0.5)
    exit_depth_m: tuple[float, float] = (0.25, 0.65)

    def __post_init__(self):
        if self.exit_angle_deg < self.enter_angle_deg:
            raise ConfigError("exit angle must be >= enter angle")
        if not (
            self.exit_depth_m[0] <= self.enter_depth_m[0]
            and self.enter_depth_m[1] <= self.exit_depth_m[1]
        ):
            raise ConfigError("exit depth interval must contain the enter interval")
        for angle in (self.enter_angle_deg, self.exit_angle_deg):
            if not 0.0 < angle < 180.0:
                raise ConfigError(f"alignment angle must be in (0, 180), got {angle}")


def alignment_update(
    det: AlignmentDetector, gaze: Ray, hand_point: Vec3
) -> tuple[AlignmentDetector, bool]:
    """Advance the detector one frame; a hand coincident with the eye counts
    as not aligned."""
    try:
        angle = alignment_angle(gaze, hand_point)
    except DegenerateInputError:
        return replace(det, aligned=False), False
    depth = hand_point.distance_to(gaze.origin)
    if det.aligned:
        lo, hi = det.exit_depth_m
        now = angle <= det.exit_angle_deg and lo <= depth <= hi
    else:
        lo, hi = det.enter_depth_m
        now = angle <= det.enter_angle_deg and lo <= depth <= hi
    return replace(det, aligned=now), now


@dataclass(frozen=True, slots=True)
class EngineConfig:
    technique: Technique = Technique.HAND_TO_GAZE
    detector: AlignmentDetector = AlignmentDetector()
    summon_on_pinch: bool = True
    dwell_ms: float = 0.0
    placement: Placement = Placement.AT_HAND
    reorientation: Optional[UnitQuat] = None  # None: per-technique default
    hide_far_on_summon: bool = True
    grab_radius_margin_m: float = 0.02
    context_radius_m: Optional[float] = None  # None: derived from the target
    context_radius_from_box: bool = False
    gain_override: Optional[float] = None

    def __post_init__(self):
        if self.dwell_ms < 0.0:
            raise ConfigError("dwell must be non-negative")
        if self.grab_radius_margin_m < 0.0:
            raise ConfigError("grab radius margin must be non-negative")
        if self.gain_override is not None and self.gain_override <= 0.0:
            raise ConfigError("gain override must be positive")

    def resolved_reorientation(self) -> UnitQuat:
        if self.reorientation is not None:
            return self.reorientation
        if self.technique is Technique.GAZE_TO_HAND:
            return TOP_VIEW_REORIENTATION
        return UnitQuat.identity()

    def to_dict(self) -> dict:
        return {
            "technique": self.technique.value,
            "enter_angle_deg": self.detector.enter_angle_deg,
            "exit_angle_deg": self.detector.exit_angle_deg,
            "enter_depth_m": list(self.detector.enter_depth_m),
            "exit_depth_m": list(self.detector.exit_depth_m),
            "summon_on_pinch": self.summon_on_pinch,
            "dwell_ms": self.dwell_ms,
            "placement": self.placement.value,
            "reorientation": None if self.reorientation is None else self.reorientation.to_list(),
            "hide_far_on_summon": self.hide_far_on_summon,
            "grab_radius_margin_m": self.grab_radius_margin_m,
            "context_radius_m": self.context_radius_m,
            "context_radius_from_box": self.context_radius_from_box,
            "gain_override": self.gain_override,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "EngineConfig":
        known = set(cls().to_dict())  # field names of the wire form
        unknown = set(doc) - known
        if unknown:
            raise SchemaError(
                f"unknown engine config field(s): {sorted(unknown)}",
                field=", ".join(sorted(unknown)),
            )
        detector = AlignmentDetector(
            enter_angle_deg=float(doc.get("enter_angle_deg", 25.0)),
            exit_angle_deg=float(doc.get("exit_angle_deg", 30.0)),
            enter_depth_m=tuple(doc.get("enter_depth_m", (0.3, 0.5))),
            exit_depth_m=tuple(doc.get("exit_depth_m", (0.25, 0.65))),
        )
        reorientation = doc.get("reorientation")
        return cls(
            technique=Technique(doc.get("technique", "hand_to_gaze")),
            detector=detector,
            summon_on_pinch=bool(doc.get("summon_on_pinch", True)),
            dwell_ms=float(doc.get("dwell_ms", 0.0)),
            placement=Placement(doc.get("placement", "at_hand")),
            reorientation=None if reorientation is None else UnitQuat.from_list(reorientation),
            hide_far_on_summon=bool(doc.get("hide_far_on_summon", True)),
            grab_radius_margin_m=float(doc.get("grab_radius_margin_m", 0.02)),
            context_radius_m=(
                None if doc.get("context_radius_m") is None else float(doc["context_radius_m"])
            ),
            context_radius_from_box=bool(doc.get("context_radius_from_box", False)),
            gain_override=(
                None if doc.get("gain_override") is None else float(doc["gain_override"])
            ),
        )


class EventKind(Enum):
    OBJECT_APPEAR = "ObjectAppear"
    PINCH_START = "PinchStart"
    PINCH_END = "PinchEnd"
    GRAB_START = "GrabStart"
    GRAB_END = "GrabEnd"
    FAILED_PINCH = "FailedPinch"
    SUMMON_START = "SummonStart"
    SUMMON_END = "SummonEnd"
    TRIAL_COMPLETE = "TrialComplete"


@dataclass(frozen=True, slots=True)
class SemanticEvent:
    t_ms: int
    kind: EventKind
    id: Optional[str] = None
    space: Optional[Space] = None

    def to_dict(self) -> dict:
        doc: dict = {"t": self.t_ms, "kind": self.kind.value}
        if self.id is not None:
            doc["id"] = self.id
        if self.space is not None:
            doc["space"] = self.space.value
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "SemanticEvent":
        return cls(
            t_ms=int(doc["t"]),
            kind=EventKind(doc["kind"]),
            id=doc.get("id"),
            space=Space(doc["space"]) if "space" in doc else None,
        )


def write_event_log(events: Iterable[SemanticEvent], stream: IO[str]) -> None:
    for event in events:
        stream.write(json.dumps(event.to_dict(), separators=(",", ":")))
        stream.write("\n")


def read_event_log(stream: IO[str]) -> list[SemanticEvent]:
    return [SemanticEvent.from_dict(json.loads(line)) for line in stream if line.strip()]


# ---------------------------------------------------------------------------
# Interaction states


@dataclass(frozen=True, slots=True)
class Idle:
    name = "Idle"


@dataclass(frozen=True, slots=True)
class Hovering:
    target: str
    name = "Hovering"


@dataclass(frozen=True, slots=True)
class IndirectManipulation:
    target: str
    grab: GrabState
    name = "IndirectManipulation"


@dataclass(frozen=True, slots=True)
class Summoning:
    binding: ProxyBinding
    name = "Summoning"


@dataclass(frozen=True, slots=True)
class DirectManipulation:
    binding: ProxyBinding
    grabbed: str
    grab: GrabState
    name = "DirectManipulation"


InteractionState = Union[Idle, Hovering, IndirectManipulation, Summoning, DirectManipulation]

STATE_NAMES = ("Idle", "Hovering", "IndirectManipulation", "Summoning", "DirectManipulation")


@dataclass(frozen=True, slots=True)
class EngineState:
    """Full per-session machine state threaded through fsm_step."""

    interaction: InteractionState = Idle()
    detector: AlignmentDetector = AlignmentDetector()
    fixation_target: Optional[str] = None
    fixation_ms: float = 0.0
    last_t_ms: Optional[int] = None
    pinch_held: bool = False

    @classmethod
    def initial(cls, config: EngineConfig) -> "EngineState":
        return cls(detector=config.detector)


@dataclass(frozen=True, slots=True)
class FsmStepResult:
    state: EngineState
    events: tuple[SemanticEvent, ...]
    scene: Scene
    edges: tuple[tuple[str, str], ...]


class _Tick:
    """Mutable scratch for one frame's micro-transitions."""

    def __init__(
        self,
        state: EngineState,
        config: EngineConfig,
        frame: InputFrame,
        scene: Scene,
        dt_ms: float,
    ):
        self.config = config
        self.frame = frame
        self.scene = scene
        self.interaction: InteractionState = state.interaction
        self.events: list[SemanticEvent] = []
        self.edges: list[tuple[str, str]] = []
        self.candidate = gaze_target(scene, frame.gaze)
        if self.candidate is not None and self.candidate == state.fixation_target:
            self.fixation_ms = state.fixation_ms + dt_ms
        else:
            self.fixation_ms = 0.0

    def emit(self, kind: EventKind, id: Optional[str] = None, space: Optional[Space] = None):
        self.events.append(SemanticEvent(self.frame.t_ms, kind, id, space))

    def go(self, new_state: InteractionState):
        old_name = self.interaction.name
        self.interaction = new_state
        if new_state.name != old_name:
            self.edges.append((old_name, new_state.name))

    def hover(self) -> Optional[str]:
        """Dwell-gated hover target against the current scene; a change of
        nearest-hit candidate resets the fixation credit."""
        fresh = gaze_target(self.scene, self.frame.gaze)
        if fresh != self.candidate:
            self.candidate = fresh
            self.fixation_ms = 0.0
        if fresh is not None and self.fixation_ms >= self.config.dwell_ms:
            return fresh
        return None

    def normalize_hover(self):
        cur = self.interaction
        if not isinstance(cur, (Idle, Hovering)):
            return
        hover = self.hover()
        if isinstance(cur, Idle) and hover is not None:
            self.go(Hovering(hover))
        elif isinstance(cur, Hovering):
            if hover is None:
                self.go(Idle())
            elif hover != cur.target:
                self.interaction = Hovering(hover)  # retarget, not a graph edge

    # -- summoning helpers --------------------------------------------------

    def build_binding(self, target_id: str) -> tuple[ProxyBinding, list[SceneObject]]:
        cfg = self.config
        radius = cfg.context_radius_m
        if radius is None:
            radius = default_context_radius(
                self.scene.get(target_id), bounding_box=cfg.context_radius_from_box
            )
        sphere, members = capture_context(self.scene, target_id, radius)
        mode = (
            SummonMode.GAZE_TO_HAND
            if cfg.technique is Technique.GAZE_TO_HAND
            else SummonMode.HAND_TO_GAZE
        )
        return summon(
            self.scene,
            sphere,
            members,
            mode=mode,
            placement=cfg.placement,
            gaze=self.frame.gaze,
            hand_point=self.frame.hand_pose.position,
            reorientation=cfg.resolved_reorientation(),
            gain_override=cfg.gain_override,
        )

    def do_summon(self, target_id: str) -> ProxyBinding:
        binding, proxies = self.build_binding(target_id)
        self.emit(EventKind.SUMMON_START, target_id)
        scene = self.scene
        if self.config.hide_far_on_summon:
            scene = scene.without(binding.member_map.keys())
        self.scene = scene.with_objects(proxies)
        return binding

    def release_summon(self, binding: ProxyBinding):
        """Alignment broke: write proxy poses back to far space, drop the
        proxies, and land on Hovering or Idle."""
        restored = []
        for far_id, pid in binding.member_map.items():
            snapshot = binding.far_members[far_id]
            proxy = self.scene.objects.get(pid)
            pose = map_near_to_far(binding, proxy.pose) if proxy is not None else snapshot.pose
            restored.append(snapshot.moved_to(pose))
        self.scene = self.scene.without(binding.member_map.values()).with_objects(restored)
        self.emit(EventKind.SUMMON_END)
        hover = self.hover()
        self.go(Hovering(hover) if hover is not None else Idle())

    def proxy_under_hand(self, binding: ProxyBinding) -> Optional[str]:
        """Nearest interactable proxy within its bounding sphere plus margin."""
        hand = self.frame.hand_pose.position
        best: Optional[str] = None
        best_gap = float("inf")
        for pid in binding.member_map.values():
            proxy = self.scene.objects.get(pid)
            if proxy is None or not proxy.interactable:
                continue
            gap = proxy.pose.position.distance_to(hand)
            if gap <= proxy.bounding_radius() + self.config.grab_radius_margin_m and gap < best_gap:
                best_gap = gap
                best = pid
        return best

    def make_grab(self, pid: str) -> GrabState:
        proxy = self.scene.get(pid)
        return GrabState(self.frame.hand_pose, proxy.pose, cd_gain=1.0)


def fsm_step(
    state: EngineState, config: EngineConfig, frame: InputFrame, scene: Scene
) -> FsmStepResult:
    """Advance the interaction machine by one input frame.

    Returns the next machine state, the semantic events emitted this frame
    (all stamped with the frame's timestamp), the updated scene, and the
    state-graph edges traversed.
    """
    if state.last_t_ms is not None and frame.t_ms <= state.last_t_ms:
        raise SequencingError(
            f"frame timestamp {frame.t_ms} does not increase past {state.last_t_ms}"
        )
    dt_ms = 0.0 if state.last_t_ms is None else float(frame.t_ms - state.last_t_ms)
    tick = _Tick(state, config, frame, scene, dt_ms)

    # Pinch edges; an invalid hand freezes the pinch state and the detector.
    if frame.hand_valid:
        pinch_now = frame.pinch
        detector, aligned = alignment_update(state.detector, frame.gaze, frame.hand_pose.position)
    else:
        pinch_now = state.pinch_held
        detector, aligned = replace(state.detector, aligned=False), False
    pinch_down = pinch_now and not state.pinch_held
    pinch_up = not pinch_now and state.pinch_held
    if pinch_down:
        tick.emit(EventKind.PINCH_START)
    if pinch_up:
        tick.emit(EventKind.PINCH_END)
    technique = config.technique
    aligned = aligned and technique is not Technique.BASELINE

    # Gaze selects before the pinch is interpreted.
    tick.normalize_hover()

    # Alignment-driven transitions (summon precedes any grab this frame).
    cur = tick.interaction
    if isinstance(cur, Summoning) and not aligned:
        tick.release_summon(cur.binding)
    elif isinstance(cur, Hovering) and aligned and technique is Technique.HAND_TO_GAZE:
        if not config.summon_on_pinch:
            binding = tick.do_summon(cur.target)
            tick.go(Summoning(binding))
        elif pinch_down:
            binding = tick.do_summon(cur.target)
            tick.go(Summoning(binding))
            pid = tick.proxy_under_hand(binding)
            if pid is not None:
                grab = tick.make_grab(pid)
                tick.emit(EventKind.GRAB_START, pid, Space.NEAR)
                tick.go(DirectManipulation(binding, pid, grab))
            else:
                tick.emit(EventKind.FAILED_PINCH)
            pinch_down = False  # consumed by the summon+grab composite
    elif (
        isinstance(cur, IndirectManipulation)
        and aligned
        and technique is Technique.GAZE_TO_HAND
    ):
        target = cur.target
        binding = tick.do_summon(target)
        tick.emit(EventKind.GRAB_END, target)
        pid = binding.member_map[target]
        grab = tick.make_grab(pid)
        tick.emit(EventKind.GRAB_START, pid, Space.NEAR)
        tick.go(DirectManipulation(binding, pid, grab))

    # Pinch-edge transitions.
    cur = tick.interaction
    if pinch_down:
        if isinstance(cur, Hovering) and technique in (
            Technique.BASELINE,
            Technique.GAZE_TO_HAND,
        ):
            if aligned:
                tick.emit(EventKind.FAILED_PINCH)
            else:
                target_obj = tick.scene.get(cur.target)
                gain = cd_ratio(
                    frame.gaze.origin, target_obj.pose.position, frame.hand_pose.position
                )
                grab = GrabState(frame.hand_pose, target_obj.pose, cd_gain=gain)
                tick.emit(EventKind.GRAB_START, cur.target, Space.FAR)
                tick.go(IndirectManipulation(cur.target, grab))
        elif isinstance(cur, Summoning):
            pid = tick.proxy_under_hand(cur.binding)
            if pid is not None:
                grab = tick.make_grab(pid)
                tick.emit(EventKind.GRAB_START, pid, Space.NEAR)
                tick.go(DirectManipulation(cur.binding, pid, grab))
            else:
                tick.emit(EventKind.FAILED_PINCH)
        else:
            tick.emit(EventKind.FAILED_PINCH)
    elif pinch_up:
        if isinstance(cur, IndirectManipulation):
            tick.emit(EventKind.GRAB_END, cur.target)
            tick.go(Hovering(cur.target))
        elif isinstance(cur, DirectManipulation):
            tick.emit(EventKind.GRAB_END, cur.grabbed)
            tick.go(Summoning(cur.binding))

    # A summon left unaligned (e.g. after a pinch-up) releases this frame.
    cur = tick.interaction
    if isinstance(cur, Summoning) and not aligned:
        tick.release_summon(cur.binding)

    # Continuous manipulation while the pinch is held.
    cur = tick.interaction
    if isinstance(cur, IndirectManipulation) and frame.hand_valid:
        obj = tick.scene.get(cur.target)
        tick.scene = tick.scene.with_object(
            obj.moved_to(apply_grab_delta(cur.grab, frame.hand_pose))
        )
    elif isinstance(cur, DirectManipulation) and frame.hand_valid:
        proxy = tick.scene.get(cur.grabbed)
        tick.scene = tick.scene.with_object(
            proxy.moved_to(apply_grab_delta(cur.grab, frame.hand_pose))
        )
        if not config.hide_far_on_summon:
            mirrored = []
            for far_id, pid in cur.binding.member_map.items():
                p = tick.scene.objects.get(pid)
                if p is not None:
                    mirrored.append(
                        cur.binding.far_members[far_id].moved_to(
                            map_near_to_far(cur.binding, p.pose)
                        )
                    )
            tick.scene = tick.scene.with_objects(mirrored)

    # Hover may have changed after manipulation moved the scene.
    tick.normalize_hover()

    next_state = EngineState(
        interaction=tick.interaction,
        detector=detector,
        fixation_target=tick.candidate,
        fixation_ms=tick.fixation_ms,
        last_t_ms=frame.t_ms,
        pinch_held=pinch_now,
    )
    return FsmStepResult(next_state, tuple(tick.events), tick.scene, tuple(tick.edges))
