"""Scalar/vector/quaternion primitives, visual-angle math, and input smoothing.

Coordinate frame convention used throughout the package: X right, Y up,
Z forward along the user's initial view direction (right-handed). Angles at
the public API are degrees; distances are meters; time is seconds unless a
name says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateInputError, DomainError, SequencingError

_EPS = 1e-12


@dataclass(frozen=True, slots=True)
class Vec3:
    """Immutable 3-vector (position, displacement, or direction)."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def scaled(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def distance_to(self, other: "Vec3") -> float:
        return (self - other).norm()

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n < _EPS:
            raise DegenerateInputError("cannot normalize a zero-length vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def lerp(self, other: "Vec3", t: float) -> "Vec3":
        return Vec3(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
            self.z + (other.z - self.z) * t,
        )

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)

    def to_list(self) -> list[float]:
        return [self.x, self.y, self.z]

    @classmethod
    def from_list(cls, xyz) -> "Vec3":
        x, y, z = xyz
        return cls(float(x), float(y), float(z))


RIGHT = Vec3(1.0, 0.0, 0.0)
UP = Vec3(0.0, 1.0, 0.0)
FORWARD = Vec3(0.0, 0.0, 1.0)


@dataclass(frozen=True, slots=True)
class UnitQuat:
    """Unit quaternion (w, x, y, z), Hamilton convention, active rotation.

    Renormalized on construction; zero-norm input is rejected. q and -q
    represent the same rotation.
    """

    w: float = 1.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        n = math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)
        if n < _EPS:
            raise DegenerateInputError("zero-norm quaternion")
        if abs(n - 1.0) > 1e-12:
            object.__setattr__(self, "w", self.w / n)
            object.__setattr__(self, "x", self.x / n)
            object.__setattr__(self, "y", self.y / n)
            object.__setattr__(self, "z", self.z / n)

    @classmethod
    def identity(cls) -> "UnitQuat":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_axis_angle(cls, axis: Vec3, angle_deg: float) -> "UnitQuat":
        u = axis.normalized()
        half = math.radians(angle_deg) / 2.0
        s = math.sin(half)
        return cls(math.cos(half), u.x * s, u.y * s, u.z * s)

    def dot(self, other: "UnitQuat") -> float:
        return self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z

    def compose(self, other: "UnitQuat") -> "UnitQuat":
        """Hamilton product self * other (apply `other` first, then self)."""
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return UnitQuat(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )

    def inverse(self) -> "UnitQuat":
        return UnitQuat(self.w, -self.x, -self.y, -self.z)

    def rotate(self, v: Vec3) -> Vec3:
        # q * (0, v) * q^-1 expanded to avoid intermediate quaternions.
        tx = 2.0 * (self.y * v.z - self.z * v.y)
        ty = 2.0 * (self.z * v.x - self.x * v.z)
        tz = 2.0 * (self.x * v.y - self.y * v.x)
        return Vec3(
            v.x + self.w * tx + (self.y * tz - self.z * ty),
            v.y + self.w * ty + (self.z * tx - self.x * tz),
            v.z + self.w * tz + (self.x * ty - self.y * tx),
        )

    def slerp(self, other: "UnitQuat", t: float) -> "UnitQuat":
        """Spherical-linear interpolation along the shorter arc."""
        d = self.dot(other)
        ow, ox, oy, oz = other.w, other.x, other.y, other.z
        if d < 0.0:
            d, ow, ox, oy, oz = -d, -ow, -ox, -oy, -oz
        d = min(1.0, d)
        theta = math.acos(d)
        if theta < 1e-9:
            return UnitQuat(
                self.w + (ow - self.w) * t,
                self.x + (ox - self.x) * t,
                self.y + (oy - self.y) * t,
                self.z + (oz - self.z) * t,
            )
        s = math.sin(theta)
        a = math.sin((1.0 - t) * theta) / s
        b = math.sin(t * theta) / s
        return UnitQuat(
            a * self.w + b * ow,
            a * self.x + b * ox,
            a * self.y + b * oy,
            a * self.z + b * oz,
        )

    def to_list(self) -> list[float]:
        return [self.w, self.x, self.y, self.z]

    @classmethod
    def from_list(cls, wxyz) -> "UnitQuat":
        w, x, y, z = wxyz
        return cls(float(w), float(x), float(y), float(z))


@dataclass(frozen=True, slots=True)
class Ray:
    """Half-line with unit direction; `direction` is normalized on construction."""

    origin: Vec3
    direction: Vec3

    def __post_init__(self):
        n = self.direction.norm()
        if n < _EPS:
            raise DegenerateInputError("ray direction must be non-zero")
        if abs(n - 1.0) > 1e-12:
            object.__setattr__(self, "direction", self.direction.scaled(1.0 / n))

    def point_at(self, t: float) -> Vec3:
        return self.origin + self.direction.scaled(t)


@dataclass(frozen=True, slots=True)
class Pose:
    """Rigid pose: position in meters plus unit-quaternion orientation."""

    position: Vec3
    orientation: UnitQuat

    @classmethod
    def identity(cls) -> "Pose":
        return cls(Vec3(), UnitQuat.identity())


def visual_angle(width_m: float, distance_m: float) -> float:
    """Angular size in degrees of an object `width_m` wide seen at `distance_m`."""
    if distance_m <= 0.0:
        raise DomainError(f"distance must be positive, got {distance_m}")
    if width_m < 0.0:
        raise DomainError(f"width must be non-negative, got {width_m}")
    return math.degrees(2.0 * math.atan(width_m / (2.0 * distance_m)))


def width_from_angle(angle_deg: float, distance_m: float) -> float:
    """Metric width that subtends `angle_deg` at `distance_m`; inverse of visual_angle."""
    if distance_m <= 0.0:
        raise DomainError(f"distance must be positive, got {distance_m}")
    if not 0.0 <= angle_deg < 180.0:
        raise DomainError(f"angle must be in [0, 180), got {angle_deg}")
    return 2.0 * distance_m * math.tan(math.radians(angle_deg) / 2.0)


def quat_angle(a: UnitQuat, b: UnitQuat) -> float:
    """Rotation angle in degrees between two orientations, in [0, 180].

    Symmetric, and invariant under a sign flip of either argument.
    """
    d = abs(a.dot(b))
    if d > 1.0:
        d = 1.0
    return math.degrees(2.0 * math.acos(d))


def alignment_angle(gaze: Ray, hand_point: Vec3) -> float:
    """Angle in degrees between the gaze direction and the eye-to-hand vector."""
    offset = hand_point - gaze.origin
    n = offset.norm()
    if n < _EPS:
        raise DegenerateInputError("hand point coincides with the gaze origin")
    d = gaze.direction.dot(offset) / n
    d = max(-1.0, min(1.0, d))
    return math.degrees(math.acos(d))


@dataclass(frozen=True, slots=True)
class OneEuroState:
    """State of an adaptive low-pass (1-euro style) filter over Vec3 samples.

    Defaults follow the filter's canonical parameters: min_cutoff 1 Hz,
    beta 0.007, d_cutoff 1 Hz.
    """

    prev_value: Vec3
    prev_derivative: Vec3
    prev_time: float
    min_cutoff: float = 1.0
    beta: float = 0.007
    d_cutoff: float = 1.0

    def __post_init__(self):
        if self.min_cutoff <= 0.0 or self.d_cutoff <= 0.0:
            raise DomainError("filter cutoffs must be positive")

    @classmethod
    def initial(
        cls,
        value: Vec3,
        time_s: float,
        *,
        min_cutoff: float = 1.0,
        beta: float = 0.007,
        d_cutoff: float = 1.0,
    ) -> "OneEuroState":
        return cls(value, Vec3(), time_s, min_cutoff, beta, d_cutoff)


def _smoothing_alpha(dt: float, cutoff_hz: float) -> float:
    r = 2.0 * math.pi * cutoff_hz * dt
    return r / (r + 1.0)


def one_euro_step(state: OneEuroState, sample: Vec3, time_s: float) -> tuple[Vec3, OneEuroState]:
    """Advance the filter by one sample; returns (filtered value, next state).

    The cutoff adapts with the smoothed derivative magnitude:
    cutoff = min_cutoff + beta * |dx|. With beta = 0 this reduces to
    fixed-cutoff exponential smoothing.
    """
    dt = time_s - state.prev_time
    if dt <= 0.0:
        raise SequencingError(
            f"filter time must increase (prev {state.prev_time}, got {time_s})"
        )
    raw_derivative = (sample - state.prev_value).scaled(1.0 / dt)
    a_d = _smoothing_alpha(dt, state.d_cutoff)
    derivative = raw_derivative.scaled(a_d) + state.prev_derivative.scaled(1.0 - a_d)
    cutoff = state.min_cutoff + state.beta * derivative.norm()
    a = _smoothing_alpha(dt, cutoff)
    value = sample.scaled(a) + state.prev_value.scaled(1.0 - a)
    next_state = OneEuroState(
        value, derivative, time_s, state.min_cutoff, state.beta, state.d_cutoff
    )
    return value, next_state
