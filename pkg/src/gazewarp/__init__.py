"""Gaze+pinch interaction engine with near-space proxy summoning.

A headless engine for eye-hand-coordinated summoning of distant-object
proxies, plus a 6DOF docking benchmark, scripted agents, a trace replayer,
a metrics pipeline, and a live session endpoint.
"""

from .agent import AgentProfile, synthesize_trace
from .docking import (
    AxisPair,
    DisplacementDir,
    SessionEntry,
    TrialSpec,
    TrialState,
    completion_step,
    make_session,
    make_trial,
)
from .errors import GazewarpError
from .fsm import (
    AlignmentDetector,
    EngineConfig,
    EngineState,
    EventKind,
    SemanticEvent,
    Technique,
    alignment_update,
    fsm_step,
)
from .geometry import (
    OneEuroState,
    Pose,
    Ray,
    UnitQuat,
    Vec3,
    alignment_angle,
    one_euro_step,
    quat_angle,
    visual_angle,
    width_from_angle,
)
from .metrics import MetricsRecord, compute_metrics
from .replay import ReplayResult, replay_trial
from .scene import Scene, SceneObject, Space, gaze_target, load_scene, save_scene, sphere_intersects
from .session import Session, session_tick
from .trace import InputFrame, read_trace, read_trace_file, write_trace, write_trace_file
from .warp import (
    ContextSphere,
    GrabState,
    Placement,
    ProxyBinding,
    SummonMode,
    apply_indirect_delta,
    capture_context,
    cd_ratio,
    map_near_to_far,
    summon,
)

__version__ = "0.1.0"
