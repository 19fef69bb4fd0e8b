import io
import math

import pytest

from conftest import (
    EYE,
    OBJECT_POS,
    OFF_TARGET,
    REST_HAND,
    hand_on_gaze,
    make_frame,
    one_object_scene,
    run_frames,
    two_object_scene,
)
from gazewarp.errors import ConfigError, SequencingError
from gazewarp.fsm import (
    AlignmentDetector,
    DirectManipulation,
    EngineConfig,
    EngineState,
    EventKind,
    Hovering,
    Idle,
    IndirectManipulation,
    SemanticEvent,
    Summoning,
    Technique,
    alignment_update,
    fsm_step,
    read_event_log,
    write_event_log,
)
from gazewarp.geometry import Ray, Vec3
from gazewarp.scene import Space
from gazewarp.warp import proxy_id

GAZE = Ray(EYE, Vec3(0, 0, 1))


def _hand_at(angle_deg: float, depth: float) -> Vec3:
    rad = math.radians(angle_deg)
    return Vec3(depth * math.sin(rad), 0.0, depth * math.cos(rad))


# --- alignment detector ------------------------------------------------------


def test_alignment_enters_inside_bands():
    det = AlignmentDetector()
    det, aligned = alignment_update(det, GAZE, _hand_at(24.0, 0.4))
    assert aligned


def test_alignment_does_not_enter_in_hysteresis_band():
    det = AlignmentDetector()
    det, aligned = alignment_update(det, GAZE, _hand_at(28.0, 0.4))
    assert not aligned


def test_alignment_stays_in_hysteresis_band():
    det = AlignmentDetector()
    det, _ = alignment_update(det, GAZE, _hand_at(24.0, 0.4))
    det, aligned = alignment_update(det, GAZE, _hand_at(28.0, 0.4))
    assert aligned


def test_alignment_exits_on_depth():
    det = AlignmentDetector()
    det, _ = alignment_update(det, GAZE, _hand_at(24.0, 0.4))
    det, aligned = alignment_update(det, GAZE, _hand_at(28.0, 0.7))
    assert not aligned


def test_alignment_exit_boundary_closed():
    det = AlignmentDetector()
    det, _ = alignment_update(det, GAZE, _hand_at(24.0, 0.4))
    det, aligned = alignment_update(det, GAZE, _hand_at(30.0, 0.65))
    assert aligned
    det, aligned = alignment_update(det, GAZE, _hand_at(30.1, 0.4))
    assert not aligned


def test_alignment_degenerate_hand():
    det = AlignmentDetector()
    det, _ = alignment_update(det, GAZE, _hand_at(24.0, 0.4))
    det, aligned = alignment_update(det, GAZE, EYE)
    assert not aligned


def test_alignment_no_chatter_10k_frames():
    # Oscillation strictly inside (25, 30) at valid depth: zero toggles.
    det = AlignmentDetector()
    det, state = alignment_update(det, GAZE, _hand_at(24.0, 0.4))  # enter once
    toggles = 0
    last = state
    for i in range(10_000):
        angle = 27.5 + 2.0 * math.sin(i * 0.37)
        det, aligned = alignment_update(det, GAZE, _hand_at(angle, 0.4))
        if aligned != last:
            toggles += 1
            last = aligned
    assert toggles == 0

    det = AlignmentDetector()  # never entered
    toggles = 0
    last = False
    for i in range(10_000):
        angle = 27.5 + 2.0 * math.sin(i * 0.37)
        det, aligned = alignment_update(det, GAZE, _hand_at(angle, 0.4))
        if aligned != last:
            toggles += 1
            last = aligned
    assert toggles == 0


def test_alignment_crossings_act_within_one_frame():
    det = AlignmentDetector()
    det, aligned = alignment_update(det, GAZE, _hand_at(24.9, 0.4))
    assert aligned
    det, aligned = alignment_update(det, GAZE, _hand_at(30.1, 0.4))
    assert not aligned


def test_custom_detector_thresholds_flow_through_config():
    tight = AlignmentDetector(enter_angle_deg=10.0, exit_angle_deg=12.0)
    config = EngineConfig(technique=Technique.HAND_TO_GAZE, detector=tight, summon_on_pinch=False)
    # 20 degrees off the (+Z) gaze: aligned under defaults, not here.
    frames = [make_frame(0), make_frame(11, hand=_hand_at(20.0, 0.4))]
    states, _, _, _, _ = run_frames(config, frames, one_object_scene())
    assert states[-1] == Hovering("a")
    frames = [make_frame(0), make_frame(11, hand=_hand_at(8.0, 0.4))]
    states, _, _, _, _ = run_frames(config, frames, one_object_scene())
    assert isinstance(states[-1], Summoning)


def test_detector_invariants_validated():
    with pytest.raises(ConfigError):
        AlignmentDetector(enter_angle_deg=30.0, exit_angle_deg=25.0)
    with pytest.raises(ConfigError):
        AlignmentDetector(enter_depth_m=(0.2, 0.5), exit_depth_m=(0.25, 0.65))


# --- basic transitions ---------------------------------------------------------


def test_idle_to_hovering_on_gaze():
    config = EngineConfig(technique=Technique.BASELINE)
    states, events, _, _, _ = run_frames(config, [make_frame(0)], one_object_scene())
    assert states[-1] == Hovering("a")
    assert events == []


def test_hover_pinch_at_waist_grabs_indirectly():
    config = EngineConfig(technique=Technique.GAZE_TO_HAND)
    frames = [make_frame(0), make_frame(11, pinch=True)]
    states, events, _, _, _ = run_frames(config, frames, one_object_scene())
    assert isinstance(states[-1], IndirectManipulation)
    assert [e.kind for e in events] == [EventKind.PINCH_START, EventKind.GRAB_START]
    grab = events[-1]
    assert grab.id == "a" and grab.space is Space.FAR
    # CD gain from the eye/object/hand geometry at grab time.
    expected_gain = OBJECT_POS.norm() / REST_HAND.norm()
    assert states[-1].grab.cd_gain == pytest.approx(expected_gain)


def test_indirect_to_direct_on_gaze_to_hand():
    config = EngineConfig(technique=Technique.GAZE_TO_HAND)
    aligned_hand = hand_on_gaze(OBJECT_POS)
    frames = [
        make_frame(0),
        make_frame(11, pinch=True),
        make_frame(22, hand=aligned_hand, pinch=True),
    ]
    states, events, edges, scene, _ = run_frames(config, frames, one_object_scene())
    assert isinstance(states[-1], DirectManipulation)
    kinds = [e.kind for e in events]
    # Summon precedes the near-space grab.
    assert kinds.index(EventKind.SUMMON_START) < len(kinds) - 1
    near_grabs = [e for e in events if e.kind is EventKind.GRAB_START and e.space is Space.NEAR]
    assert near_grabs and near_grabs[0].id == proxy_id("a")
    assert kinds.index(EventKind.SUMMON_START) < kinds.index(EventKind.GRAB_START) or (
        EventKind.GRAB_START in kinds[: kinds.index(EventKind.SUMMON_START)]
    )
    assert ("IndirectManipulation", "DirectManipulation") in edges
    # Far object hidden by default; proxy present.
    assert "a" not in scene.objects
    assert proxy_id("a") in scene.objects


def test_direct_grab_is_one_to_one():
    config = EngineConfig(technique=Technique.HAND_TO_GAZE)
    hand = hand_on_gaze(OBJECT_POS)
    frames = [
        make_frame(0),
        make_frame(11, hand=hand, pinch=True),
        make_frame(22, hand=hand + Vec3(0.01, 0.02, 0.0), pinch=True),
    ]
    _, _, _, scene, state = run_frames(config, frames, one_object_scene())
    assert isinstance(state.interaction, DirectManipulation)
    proxy = scene.get(proxy_id("a"))
    moved = proxy.pose.position - hand
    assert (moved.x, moved.y, moved.z) == pytest.approx((0.01, 0.02, 0.0), abs=1e-12)


def test_hand_to_gaze_pinch_composite_order():
    config = EngineConfig(technique=Technique.HAND_TO_GAZE, summon_on_pinch=True)
    frames = [make_frame(0), make_frame(11, hand=hand_on_gaze(OBJECT_POS), pinch=True)]
    states, events, edges, _, _ = run_frames(config, frames, one_object_scene())
    kinds = [e.kind for e in events]
    assert kinds == [EventKind.PINCH_START, EventKind.SUMMON_START, EventKind.GRAB_START]
    assert isinstance(states[-1], DirectManipulation)
    assert ("Hovering", "Summoning") in edges and ("Summoning", "DirectManipulation") in edges


def test_simultaneous_alignment_and_pinch_summons_before_grabbing():
    # Alignment is evaluated first, so the grab lands in near space even when
    # the pinch arrives in the same frame as the alignment.
    config = EngineConfig(technique=Technique.HAND_TO_GAZE, summon_on_pinch=False)
    frames = [make_frame(0), make_frame(11, hand=hand_on_gaze(OBJECT_POS), pinch=True)]
    states, events, _, _, _ = run_frames(config, frames, one_object_scene())
    assert isinstance(states[-1], DirectManipulation)
    kinds = [e.kind for e in events]
    assert kinds == [EventKind.PINCH_START, EventKind.SUMMON_START, EventKind.GRAB_START]
    assert events[-1].space is Space.NEAR


def test_hand_to_gaze_alignment_alone_summons_without_study_mode():
    config = EngineConfig(technique=Technique.HAND_TO_GAZE, summon_on_pinch=False)
    frames = [make_frame(0), make_frame(11, hand=hand_on_gaze(OBJECT_POS))]
    states, events, _, _, _ = run_frames(config, frames, one_object_scene())
    assert isinstance(states[-1], Summoning)
    assert [e.kind for e in events] == [EventKind.SUMMON_START]


def test_hand_to_gaze_alignment_alone_does_not_summon_in_study_mode():
    config = EngineConfig(technique=Technique.HAND_TO_GAZE, summon_on_pinch=True)
    frames = [make_frame(0), make_frame(11, hand=hand_on_gaze(OBJECT_POS))]
    states, events, _, _, _ = run_frames(config, frames, one_object_scene())
    assert states[-1] == Hovering("a")
    assert events == []


def test_summon_release_commits_far_pose():
    config = EngineConfig(technique=Technique.HAND_TO_GAZE, summon_on_pinch=False)
    hand = hand_on_gaze(OBJECT_POS)
    drag = Vec3(0.02, 0.0, 0.0)
    frames = [
        make_frame(0),
        make_frame(11, hand=hand),  # summon
        make_frame(22, hand=hand, pinch=True),  # grab proxy
        make_frame(33, hand=hand + drag, pinch=True),  # drag
        make_frame(44, hand=hand + drag),  # release pinch (still aligned)
        make_frame(55, hand=REST_HAND),  # break alignment -> commit
    ]
    states, events, _, scene, _ = run_frames(config, frames, one_object_scene())
    kinds = [e.kind for e in events]
    assert EventKind.SUMMON_END in kinds
    assert states[-1] == Hovering("a")
    # Proxy displacement divides by the scale on the way back to far space.
    scale = hand.norm() / OBJECT_POS.norm()
    moved = scene.get("a").pose.position - OBJECT_POS
    assert moved.x == pytest.approx(drag.x / scale, rel=1e-9)
    assert proxy_id("a") not in scene.objects


def test_failed_pinch_cases():
    # Pinch with nothing under gaze.
    config = EngineConfig(technique=Technique.BASELINE)
    frames = [make_frame(0, gaze_to=OFF_TARGET), make_frame(11, gaze_to=OFF_TARGET, pinch=True)]
    states, events, _, _, _ = run_frames(config, frames, one_object_scene())
    assert states[-1] == Idle()
    assert [e.kind for e in events] == [EventKind.PINCH_START, EventKind.FAILED_PINCH]

    # Hand-to-gaze: pinch on a hovered target without alignment has no effect.
    config = EngineConfig(technique=Technique.HAND_TO_GAZE)
    frames = [make_frame(0), make_frame(11, pinch=True)]
    states, events, _, _, _ = run_frames(config, frames, one_object_scene())
    assert states[-1] == Hovering("a")
    assert EventKind.FAILED_PINCH in [e.kind for e in events]

    # Gaze-to-hand: an aligned pinch in Hovering is not an indirect grab.
    config = EngineConfig(technique=Technique.GAZE_TO_HAND)
    frames = [make_frame(0), make_frame(11, hand=hand_on_gaze(OBJECT_POS), pinch=True)]
    states, events, _, _, _ = run_frames(config, frames, one_object_scene())
    assert states[-1] == Hovering("a")
    assert EventKind.FAILED_PINCH in [e.kind for e in events]


def test_fixation_dwell_gates_hovering():
    config = EngineConfig(technique=Technique.BASELINE, dwell_ms=100.0)
    frames = [make_frame(t) for t in (0, 40, 80, 120)]
    states, _, _, _, _ = run_frames(config, frames, one_object_scene())
    # Fixation credit starts accruing after the first frame on the candidate.
    assert [s.name for s in states] == ["Idle", "Idle", "Idle", "Hovering"]


def test_frames_must_be_ordered():
    config = EngineConfig()
    scene = one_object_scene()
    state = EngineState.initial(config)
    result = fsm_step(state, config, make_frame(10), scene)
    with pytest.raises(SequencingError):
        fsm_step(result.state, config, make_frame(10), result.scene)


def test_invalid_hand_freezes_pinch_and_alignment():
    config = EngineConfig(technique=Technique.BASELINE)
    frames = [
        make_frame(0),
        make_frame(11, pinch=True),
        make_frame(22, hand=Vec3(5, 5, 5), pinch=False, hand_valid=False),
    ]
    states, events, _, _, state = run_frames(config, frames, one_object_scene())
    # The invalid frame neither releases the grab nor applies motion.
    assert isinstance(states[-1], IndirectManipulation)
    assert EventKind.PINCH_END not in [e.kind for e in events]
    assert state.pinch_held


def test_event_log_round_trip():
    events = [
        SemanticEvent(0, EventKind.OBJECT_APPEAR, "a"),
        SemanticEvent(5, EventKind.PINCH_START),
        SemanticEvent(5, EventKind.GRAB_START, "a", Space.FAR),
        SemanticEvent(9, EventKind.GRAB_END, "a"),
        SemanticEvent(9, EventKind.PINCH_END),
        SemanticEvent(12, EventKind.TRIAL_COMPLETE, "a"),
    ]
    buf = io.StringIO()
    write_event_log(events, buf)
    buf.seek(0)
    assert read_event_log(buf) == events


# --- pairing and timestamps ---------------------------------------------------


def _scripted_trace(config):
    hand = hand_on_gaze(OBJECT_POS)
    if config.technique is Technique.BASELINE:
        return [
            make_frame(0),
            make_frame(11, pinch=True),
            make_frame(22, hand=REST_HAND + Vec3(0.02, 0, 0), pinch=True),
            make_frame(33, hand=REST_HAND + Vec3(0.02, 0, 0)),
            make_frame(44, gaze_to=OFF_TARGET),
        ]
    if config.technique is Technique.GAZE_TO_HAND:
        return [
            make_frame(0),
            make_frame(11, pinch=True),
            make_frame(22, hand=hand, pinch=True),
            make_frame(33, hand=hand + Vec3(0.01, 0, 0), pinch=True),
            make_frame(44, hand=hand + Vec3(0.01, 0, 0)),
            make_frame(55, hand=REST_HAND),
            make_frame(66, gaze_to=OFF_TARGET),
        ]
    return [
        make_frame(0),
        make_frame(11, hand=hand, pinch=True),
        make_frame(22, hand=hand + Vec3(0.01, 0, 0), pinch=True),
        make_frame(33, hand=hand + Vec3(0.01, 0, 0)),
        make_frame(44, hand=REST_HAND),
        make_frame(55, gaze_to=OFF_TARGET),
    ]


@pytest.mark.parametrize(
    "technique", [Technique.BASELINE, Technique.GAZE_TO_HAND, Technique.HAND_TO_GAZE]
)
def test_event_pairing_in_terminated_traces(technique):
    config = EngineConfig(technique=technique)
    _, events, _, _, state = run_frames(config, _scripted_trace(config), one_object_scene())
    assert state.interaction == Idle()
    kinds = [e.kind for e in events]
    for start, end in (
        (EventKind.PINCH_START, EventKind.PINCH_END),
        (EventKind.GRAB_START, EventKind.GRAB_END),
        (EventKind.SUMMON_START, EventKind.SUMMON_END),
    ):
        opens = kinds.count(start)
        closes = kinds.count(end)
        assert opens == closes
        depth = 0
        for k in kinds:
            if k is start:
                depth += 1
            elif k is end:
                depth -= 1
                assert depth >= 0
        assert depth == 0
    # Timestamps non-decreasing.
    times = [e.t_ms for e in events]
    assert times == sorted(times)


# --- conformance: exact edge set ---------------------------------------------


def _expected_edges(technique):
    base = {("Idle", "Hovering"), ("Hovering", "Idle")}
    indirect = {
        ("Hovering", "IndirectManipulation"),
        ("IndirectManipulation", "Hovering"),
    }
    summoned = {
        ("Summoning", "DirectManipulation"),
        ("DirectManipulation", "Summoning"),
        ("Summoning", "Hovering"),
        ("Summoning", "Idle"),
    }
    if technique is Technique.BASELINE:
        return base | indirect
    if technique is Technique.GAZE_TO_HAND:
        return base | indirect | summoned | {("IndirectManipulation", "DirectManipulation")}
    return base | summoned | {("Hovering", "Summoning")}


def _prepared_states(config):
    """Engine states realizing each reachable interaction state, each with its
    matching scene."""
    scene = one_object_scene()
    hand = hand_on_gaze(OBJECT_POS)
    prepared = {}

    def run_to(frames):
        state = EngineState.initial(config)
        s = scene
        for frame in frames:
            result = fsm_step(state, config, frame, s)
            state, s = result.state, result.scene
        return state, s, frames[-1] if frames else None

    prepared["Idle"] = run_to([make_frame(0, gaze_to=OFF_TARGET)])
    prepared["Hovering"] = run_to([make_frame(0)])
    if config.technique in (Technique.BASELINE, Technique.GAZE_TO_HAND):
        prepared["IndirectManipulation"] = run_to([make_frame(0), make_frame(11, pinch=True)])
    if config.technique is Technique.GAZE_TO_HAND:
        prepared["DirectManipulation"] = run_to(
            [make_frame(0), make_frame(11, pinch=True), make_frame(22, hand=hand, pinch=True)]
        )
        prepared["Summoning"] = run_to(
            [
                make_frame(0),
                make_frame(11, pinch=True),
                make_frame(22, hand=hand, pinch=True),
                make_frame(33, hand=hand),
            ]
        )
    if config.technique is Technique.HAND_TO_GAZE:
        if config.summon_on_pinch:
            prepared["DirectManipulation"] = run_to(
                [make_frame(0), make_frame(11, hand=hand, pinch=True)]
            )
            prepared["Summoning"] = run_to(
                [make_frame(0), make_frame(11, hand=hand, pinch=True), make_frame(22, hand=hand)]
            )
        else:
            prepared["Summoning"] = run_to([make_frame(0), make_frame(11, hand=hand)])
            prepared["DirectManipulation"] = run_to(
                [make_frame(0), make_frame(11, hand=hand), make_frame(22, hand=hand, pinch=True)]
            )
    for name, (state, _, _) in prepared.items():
        assert state.interaction.name == name, f"failed to prepare {name}"
    return prepared


@pytest.mark.parametrize(
    "technique,summon_on_pinch",
    [
        (Technique.BASELINE, True),
        (Technique.GAZE_TO_HAND, True),
        (Technique.HAND_TO_GAZE, True),
        (Technique.HAND_TO_GAZE, False),
    ],
)
def test_edge_set_conformance(technique, summon_on_pinch):
    config = EngineConfig(technique=technique, summon_on_pinch=summon_on_pinch)
    prepared = _prepared_states(config)
    observed = set()
    far_hand = Vec3(0, 0, 0.9)  # on gaze line but outside the exit depth band
    for name, (state, scene, last_frame) in prepared.items():
        t0 = (state.last_t_ms or 0) + 11
        for gaze_to in (OBJECT_POS, OFF_TARGET):
            for hand in (REST_HAND, hand_on_gaze(gaze_to), far_hand):
                for pinch in (False, True):
                    frame = make_frame(t0, gaze_to=gaze_to, hand=hand, pinch=pinch)
                    result = fsm_step(state, config, frame, scene)
                    observed.update(result.edges)
    expected = _expected_edges(technique)
    assert observed == expected


@pytest.mark.parametrize(
    "technique,summon_on_pinch,hide",
    [
        (Technique.BASELINE, True, True),
        (Technique.GAZE_TO_HAND, True, True),
        (Technique.GAZE_TO_HAND, True, False),
        (Technique.HAND_TO_GAZE, True, True),
        (Technique.HAND_TO_GAZE, False, True),
        (Technique.HAND_TO_GAZE, False, False),
    ],
)
def test_fuzzed_walks_preserve_structural_invariants(technique, summon_on_pinch, hide):
    import random

    from gazewarp.fsm import EngineState, fsm_step
    from gazewarp.scene import Space

    config = EngineConfig(
        technique=technique, summon_on_pinch=summon_on_pinch, hide_far_on_summon=hide
    )
    rng = random.Random(hash((technique.value, summon_on_pinch, hide)) & 0xFFFF)
    scene = two_object_scene()
    far_ids = set(scene.objects)
    state = EngineState.initial(config)
    t = 0
    depth = {EventKind.PINCH_START: 0, EventKind.GRAB_START: 0, EventKind.SUMMON_START: 0}
    closer = {
        EventKind.PINCH_END: EventKind.PINCH_START,
        EventKind.GRAB_END: EventKind.GRAB_START,
        EventKind.SUMMON_END: EventKind.SUMMON_START,
    }
    for _ in range(1500):
        t += rng.randint(6, 30)
        gaze_to = rng.choice([OBJECT_POS, Vec3(0.25, 0, 2), OFF_TARGET])
        hand = rng.choice(
            [
                REST_HAND,
                hand_on_gaze(gaze_to, 0.42),
                hand_on_gaze(gaze_to, 0.28),
                Vec3(0, 0, 0.9),
                hand_on_gaze(OBJECT_POS, 0.42),
            ]
        )
        frame = make_frame(t, gaze_to=gaze_to, hand=hand, pinch=rng.random() < 0.45)
        result = fsm_step(state, config, frame, scene)
        state, scene = result.state, result.scene
        for event in result.events:
            if event.kind in depth:
                depth[event.kind] += 1
            elif event.kind in closer:
                depth[closer[event.kind]] -= 1
                assert depth[closer[event.kind]] >= 0
        interaction = state.interaction
        # Manipulation states imply the pinch is held.
        if isinstance(interaction, (IndirectManipulation, DirectManipulation)):
            assert state.pinch_held
        # Proxies exist exactly while a summon is live; hidden far members
        # are away exactly when hide_far_on_summon is set.
        proxies = [o for o in scene.objects.values() if o.space is Space.NEAR]
        if isinstance(interaction, (Summoning, DirectManipulation)):
            binding = interaction.binding
            assert depth[EventKind.SUMMON_START] == 1
            assert set(binding.member_map.values()) == {p.id for p in proxies}
            present_far = far_ids & set(scene.objects)
            if hide:
                assert present_far == far_ids - set(binding.member_map)
            else:
                assert present_far == far_ids
            assert (
                abs(binding.near_sphere.radius - binding.scale * binding.far_sphere.radius)
                < 1e-9
            )
        else:
            assert not proxies
            assert depth[EventKind.SUMMON_START] == 0
            assert far_ids <= set(scene.objects)


def test_baseline_never_summons():
    import random

    config = EngineConfig(technique=Technique.BASELINE)
    rng = random.Random(42)
    scene = two_object_scene()
    state = EngineState.initial(config)
    t = 0
    for _ in range(2000):
        t += rng.randint(5, 20)
        gaze_to = rng.choice([OBJECT_POS, OFF_TARGET, Vec3(0.25, 0, 2)])
        hand = rng.choice([REST_HAND, hand_on_gaze(gaze_to), Vec3(0, 0, 0.42)])
        frame = make_frame(t, gaze_to=gaze_to, hand=hand, pinch=rng.random() < 0.4)
        result = fsm_step(state, config, frame, scene)
        state, scene = result.state, result.scene
        assert state.interaction.name in ("Idle", "Hovering", "IndirectManipulation")
