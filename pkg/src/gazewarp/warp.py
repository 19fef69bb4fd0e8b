"""Context capture, proxy placement, far<->near mapping, and CD-ratio math.

The far-space context is a sphere around a selected object; everything whose
bounding sphere touches it is captured. Summoning spawns scaled near-space
proxies of the members so that the selected object keeps its visual angle
from the eye (scale = reciprocal control-display ratio), optionally
re-oriented to present a different perspective (e.g. a top view).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import ConsistencyError, DegenerateInputError
from .geometry import Pose, Ray, RIGHT, UnitQuat, Vec3
from .scene import Scene, SceneObject, Space, sphere_intersects

PROXY_SUFFIX = "::proxy"

# Quarter-turn about the view-right axis that tips the far side of the
# context upward, presenting a top view of the captured region.
TOP_VIEW_REORIENTATION = UnitQuat.from_axis_angle(RIGHT, -90.0)


class SummonMode(Enum):
    GAZE_TO_HAND = "gaze_to_hand"
    HAND_TO_GAZE = "hand_to_gaze"


class Placement(Enum):
    AT_HAND = "at_hand"
    ALONG_GAZE = "along_gaze"


def proxy_id(far_id: str) -> str:
    """Deterministic id of the near-space proxy of a far object."""
    return far_id + PROXY_SUFFIX


def far_id_of(any_id: str) -> str:
    """Resolve a proxy id back to its far counterpart (identity for far ids)."""
    if any_id.endswith(PROXY_SUFFIX):
        return any_id[: -len(PROXY_SUFFIX)]
    return any_id


@dataclass(frozen=True, slots=True)
class ContextSphere:
    center: Vec3
    radius: float
    space: Space = Space.FAR

    def __post_init__(self):
        if self.radius <= 0.0:
            raise DegenerateInputError(f"context radius must be positive, got {self.radius}")


@dataclass(frozen=True, slots=True)
class ProxyBinding:
    """Live far<->near mapping: sphere pair, uniform scale, re-orientation.

    Maps a far pose to its proxy via
    p_near = C_near + scale * R (p_far - C_far),  q_near = R q_far,
    with R the re-orientation (identity preserves the viewing angle).
    `far_members` snapshots the captured far objects at summon time;
    `member_map` maps far ids to live proxy ids.
    """

    far_sphere: ContextSphere
    near_sphere: ContextSphere
    scale: float
    reorientation: UnitQuat
    member_map: dict[str, str]
    mode: SummonMode
    far_members: dict[str, SceneObject]

    def __post_init__(self):
        if self.scale <= 0.0:
            raise DegenerateInputError(f"binding scale must be positive, got {self.scale}")
        if abs(self.near_sphere.radius - self.scale * self.far_sphere.radius) > 1e-9:
            raise ConsistencyError("near sphere radius must equal scale * far radius")


def default_context_radius(target: SceneObject, *, bounding_box: bool = False) -> float:
    """Initial far-context radius for a target.

    Default reading: the bounding-sphere radius of the target's box, so the
    context diameter is twice the bounding sphere. The alternative
    `bounding_box` reading uses the box's largest full extent as the radius
    (context diameter = twice the box size).
    """
    if bounding_box:
        he = target.half_extents
        return 2.0 * max(he.x, he.y, he.z)
    return target.bounding_radius()


def capture_context(
    scene: Scene, target_id: str, radius: float | None = None
) -> tuple[ContextSphere, list[str]]:
    """Context sphere centered on the target plus the ids of captured members.

    Members are all FAR objects whose bounding sphere touches the context
    sphere; the target itself is always a member.
    """
    target = scene.get(target_id)
    if target.space is not Space.FAR:
        raise ConsistencyError(f"context target {target_id!r} is not in far space")
    if radius is None:
        radius = default_context_radius(target)
    sphere = ContextSphere(center=target.pose.position, radius=radius, space=Space.FAR)
    members = [
        o.id
        for o in scene.far_objects()
        if o.id == target_id or sphere_intersects(o, sphere.center, sphere.radius)
    ]
    return sphere, members


def is_fully_inside(obj: SceneObject, sphere: ContextSphere) -> bool:
    gap = obj.pose.position.distance_to(sphere.center)
    return gap + obj.bounding_radius() <= sphere.radius + 1e-12


def clamped_bounding_radius(obj: SceneObject, sphere: ContextSphere) -> float:
    """Bounding radius of `obj` cropped to stay within the sphere bounds."""
    gap = obj.pose.position.distance_to(sphere.center)
    return max(0.0, min(obj.bounding_radius(), sphere.radius - gap))


def cd_ratio(eye: Vec3, far_point: Vec3, hand_point: Vec3) -> float:
    """Control-display gain: eye-to-object distance over eye-to-hand distance."""
    d_far = far_point.distance_to(eye)
    d_hand = hand_point.distance_to(eye)
    if d_far <= 0.0 or d_hand <= 0.0:
        raise DegenerateInputError("cd_ratio requires both distances to be positive")
    return d_far / d_hand


def summon(
    scene: Scene,
    context: ContextSphere,
    member_ids: list[str],
    *,
    mode: SummonMode,
    placement: Placement,
    gaze: Ray,
    hand_point: Vec3,
    reorientation: UnitQuat | None = None,
    gain_override: float | None = None,
) -> tuple[ProxyBinding, list[SceneObject]]:
    """Create a near-space proxy of the captured context.

    The near sphere is centered at the hand (AT_HAND) or on the gaze line at
    the hand's depth (ALONG_GAZE). The proxy scale defaults to the reciprocal
    CD ratio, which preserves the context's visual angle from the eye;
    `gain_override` substitutes an explicit CD gain instead.
    """
    if not member_ids:
        raise ConsistencyError("cannot summon an empty context")
    eye = gaze.origin
    if placement is Placement.AT_HAND:
        near_center = hand_point
    else:
        near_center = gaze.point_at(hand_point.distance_to(eye))
    if gain_override is not None:
        if gain_override <= 0.0:
            raise DegenerateInputError("gain override must be positive")
        scale = 1.0 / gain_override
    else:
        scale = 1.0 / cd_ratio(eye, context.center, near_center)
    rot = reorientation if reorientation is not None else UnitQuat.identity()

    near_sphere = ContextSphere(center=near_center, radius=scale * context.radius, space=Space.NEAR)
    far_members: dict[str, SceneObject] = {}
    member_map: dict[str, str] = {}
    proxies: list[SceneObject] = []
    for far_id in member_ids:
        obj = scene.get(far_id)
        far_members[far_id] = obj
        pid = proxy_id(far_id)
        member_map[far_id] = pid
        offset = rot.rotate(obj.pose.position - context.center).scaled(scale)
        proxies.append(
            SceneObject(
                id=pid,
                pose=Pose(near_center + offset, rot.compose(obj.pose.orientation)),
                half_extents=obj.half_extents.scaled(scale),
                interactable=obj.interactable,
                space=Space.NEAR,
                clipped=not is_fully_inside(obj, context),
            )
        )
    binding = ProxyBinding(
        far_sphere=context,
        near_sphere=near_sphere,
        scale=scale,
        reorientation=rot,
        member_map=member_map,
        mode=mode,
        far_members=far_members,
    )
    return binding, proxies


def map_near_to_far(binding: ProxyBinding, proxy_pose: Pose) -> Pose:
    """Exact inverse of the summon mapping, taking a proxy pose to far space."""
    inv = binding.reorientation.inverse()
    offset = inv.rotate(proxy_pose.position - binding.near_sphere.center).scaled(
        1.0 / binding.scale
    )
    return Pose(
        binding.far_sphere.center + offset,
        inv.compose(proxy_pose.orientation),
    )


def map_far_to_near(binding: ProxyBinding, far_pose: Pose) -> Pose:
    """Forward summon mapping for a far pose."""
    offset = binding.reorientation.rotate(far_pose.position - binding.far_sphere.center).scaled(
        binding.scale
    )
    return Pose(
        binding.near_sphere.center + offset,
        binding.reorientation.compose(far_pose.orientation),
    )


@dataclass(frozen=True, slots=True)
class GrabState:
    """Frozen hand/object poses at grab time plus the translation gain."""

    start_hand_pose: Pose
    start_object_pose: Pose
    cd_gain: float = 1.0

    def __post_init__(self):
        if self.cd_gain <= 0.0:
            raise DegenerateInputError(f"cd gain must be positive, got {self.cd_gain}")


def apply_grab_delta(grab: GrabState, hand_pose_now: Pose) -> Pose:
    """Object pose after moving the hand: translation scaled by the CD gain,
    rotation applied 1:1 about the object's own center."""
    delta = (hand_pose_now.position - grab.start_hand_pose.position).scaled(grab.cd_gain)
    dq = hand_pose_now.orientation.compose(grab.start_hand_pose.orientation.inverse())
    return Pose(
        grab.start_object_pose.position + delta,
        dq.compose(grab.start_object_pose.orientation),
    )


# Indirect manipulation is the same transfer function with the CD gain taken
# from the eye/object/hand geometry at grab time.
apply_indirect_delta = apply_grab_delta


def resize_far_context(
    scene: Scene,
    sphere: ContextSphere,
    target_id: str,
    separation_start: float,
    separation_now: float,
) -> tuple[ContextSphere, list[str]]:
    """Rescale the far sphere by the hand-separation ratio and re-run capture."""
    factor = _resize_factor(separation_start, separation_now)
    new_sphere, members = capture_context(scene, target_id, sphere.radius * factor)
    return new_sphere, members


def resize_near_context(
    binding: ProxyBinding,
    proxies: list[SceneObject],
    separation_start: float,
    separation_now: float,
) -> tuple[ProxyBinding, list[SceneObject]]:
    """Rescale the near sphere: scale and every proxy offset grow by the same
    factor, so far poses recovered through the mapping are unchanged."""
    factor = _resize_factor(separation_start, separation_now)
    center = binding.near_sphere.center
    new_binding = replace(
        binding,
        scale=binding.scale * factor,
        near_sphere=ContextSphere(
            center=center, radius=binding.near_sphere.radius * factor, space=Space.NEAR
        ),
    )
    rescaled = [
        replace(
            p,
            pose=Pose(
                center + (p.pose.position - center).scaled(factor),
                p.pose.orientation,
            ),
            half_extents=p.half_extents.scaled(factor),
        )
        for p in proxies
    ]
    return new_binding, rescaled


def _resize_factor(separation_start: float, separation_now: float) -> float:
    if separation_start <= 0.0 or separation_now <= 0.0:
        raise DegenerateInputError("hand separations must be positive")
    return separation_now / separation_start
