"""Minimal scene model: posed objects with bounds, far/near tagging, gaze queries.

Scene description files are JSON documents with a top-level ``"schema": 1``
field; see docs/file-formats.md for the exact layout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional

from .errors import ConsistencyError, SchemaError
from .geometry import Pose, Ray, UnitQuat, Vec3

SCENE_SCHEMA_VERSION = 1


class Space(Enum):
    FAR = "far"
    NEAR = "near"


@dataclass(frozen=True, slots=True)
class SceneObject:
    """Posed, axis-aligned-box-bounded entity in far or near space."""

    id: str
    pose: Pose
    half_extents: Vec3
    interactable: bool = True
    space: Space = Space.FAR
    clipped: bool = False

    def __post_init__(self):
        if min(self.half_extents.x, self.half_extents.y, self.half_extents.z) < 0.0:
            raise SchemaError(f"object {self.id!r}: half_extents must be non-negative")

    def bounding_radius(self) -> float:
        """Radius of the rotation-invariant bounding sphere of the local box."""
        return self.half_extents.norm()

    def moved_to(self, pose: Pose) -> "SceneObject":
        return replace(self, pose=pose)


@dataclass(frozen=True, slots=True)
class Scene:
    """Immutable collection of uniquely-identified objects plus the viewpoint."""

    eye: Vec3 = field(default_factory=Vec3)
    objects: dict[str, SceneObject] = field(default_factory=dict)

    @classmethod
    def from_objects(cls, objects: Iterable[SceneObject], eye: Vec3 = Vec3()) -> "Scene":
        table: dict[str, SceneObject] = {}
        for obj in objects:
            if obj.id in table:
                raise ConsistencyError(f"duplicate object id {obj.id!r}")
            table[obj.id] = obj
        return cls(eye=eye, objects=table)

    def get(self, object_id: str) -> SceneObject:
        try:
            return self.objects[object_id]
        except KeyError:
            raise ConsistencyError(f"unknown object id {object_id!r}") from None

    def with_object(self, obj: SceneObject) -> "Scene":
        table = dict(self.objects)
        table[obj.id] = obj
        return Scene(eye=self.eye, objects=table)

    def with_objects(self, objs: Iterable[SceneObject]) -> "Scene":
        table = dict(self.objects)
        for obj in objs:
            table[obj.id] = obj
        return Scene(eye=self.eye, objects=table)

    def without(self, ids: Iterable[str]) -> "Scene":
        drop = set(ids)
        return Scene(
            eye=self.eye,
            objects={k: v for k, v in self.objects.items() if k not in drop},
        )

    def far_objects(self) -> list[SceneObject]:
        return [o for o in self.objects.values() if o.space is Space.FAR]

    def near_objects(self) -> list[SceneObject]:
        return [o for o in self.objects.values() if o.space is Space.NEAR]


def ray_sphere_distance(ray: Ray, center: Vec3, radius: float) -> Optional[float]:
    """Smallest non-negative ray parameter hitting the sphere, or None on miss."""
    oc = center - ray.origin
    proj = oc.dot(ray.direction)
    closest_sq = oc.dot(oc) - proj * proj
    rad_sq = radius * radius
    if closest_sq > rad_sq:
        return None
    half_chord = (rad_sq - closest_sq) ** 0.5
    t = proj - half_chord
    if t < 0.0:
        t = proj + half_chord  # origin inside the sphere
    return t if t >= 0.0 else None


def gaze_target(
    scene: Scene,
    gaze: Ray,
    fixation_ms: float = 0.0,
    dwell_ms: float = 0.0,
) -> Optional[str]:
    """Nearest interactable FAR object whose bounding sphere the gaze ray hits.

    Returns the object's id once the accumulated fixation duration reaches the
    configured dwell (default 0: hover is instantaneous), else None.
    """
    best_id: Optional[str] = None
    best_t = float("inf")
    for obj in scene.objects.values():
        if obj.space is not Space.FAR or not obj.interactable:
            continue
        t = ray_sphere_distance(gaze, obj.pose.position, obj.bounding_radius())
        if t is not None and t < best_t:
            best_t = t
            best_id = obj.id
    if best_id is None or fixation_ms < dwell_ms:
        return None
    return best_id


def sphere_intersects(obj: SceneObject, center: Vec3, radius: float) -> bool:
    """True iff the object's world bounding sphere overlaps the query sphere.

    The boundary condition is closed: touching spheres count as intersecting.
    """
    if radius <= 0.0:
        raise SchemaError(f"query radius must be positive, got {radius}")
    gap = obj.pose.position.distance_to(center)
    return gap <= radius + obj.bounding_radius()


def scene_to_dict(scene: Scene) -> dict:
    return {
        "schema": SCENE_SCHEMA_VERSION,
        "eye": scene.eye.to_list(),
        "objects": [
            {
                "id": o.id,
                "position": o.pose.position.to_list(),
                "orientation": o.pose.orientation.to_list(),
                "half_extents": o.half_extents.to_list(),
                "interactable": o.interactable,
                "space": o.space.value,
            }
            for o in scene.objects.values()
        ],
    }


def scene_from_dict(doc: dict, *, path: str | None = None) -> Scene:
    if not isinstance(doc, dict):
        raise SchemaError("scene document must be a JSON object", path=path)
    version = doc.get("schema")
    if version != SCENE_SCHEMA_VERSION:
        raise SchemaError(
            f"unsupported scene schema {version!r} (expected {SCENE_SCHEMA_VERSION})",
            path=path,
            field="schema",
        )
    try:
        eye = Vec3.from_list(doc.get("eye", [0.0, 0.0, 0.0]))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad eye: {exc}", path=path, field="eye") from None
    objects = []
    for i, entry in enumerate(doc.get("objects", [])):
        try:
            objects.append(
                SceneObject(
                    id=str(entry["id"]),
                    pose=Pose(
                        Vec3.from_list(entry["position"]),
                        UnitQuat.from_list(entry.get("orientation", [1, 0, 0, 0])),
                    ),
                    half_extents=Vec3.from_list(entry["half_extents"]),
                    interactable=bool(entry.get("interactable", True)),
                    space=Space(entry.get("space", "far")),
                )
            )
        except KeyError as exc:
            raise SchemaError(
                f"objects[{i}] missing required field {exc.args[0]!r}",
                path=path,
                field=f"objects[{i}]",
            ) from None
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc), path=path, field=f"objects[{i}]") from None
    return Scene.from_objects(objects, eye=eye)


def load_scene(path: str) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}", path=path) from None
    return scene_from_dict(doc, path=path)


def save_scene(scene: Scene, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scene_to_dict(scene), fh, indent=2, sort_keys=True)
        fh.write("\n")
