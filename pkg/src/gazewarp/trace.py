"""Input-frame format and trace file I/O.

Traces are JSON lines, one frame per line:

    {"t": 11, "gaze": {"o": [x,y,z], "d": [x,y,z]},
     "head": {"p": [x,y,z], "q": [w,x,y,z]},
     "hand": {"p": [x,y,z], "q": [w,x,y,z]}, "pinch": false, "valid": true}

Unknown fields are preserved across a read/write round-trip. Timestamps are
integer milliseconds and must strictly increase.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .errors import SequencingError, TraceParseError
from .geometry import OneEuroState, Pose, Ray, UnitQuat, Vec3, one_euro_step

_KNOWN_FIELDS = ("t", "gaze", "head", "hand", "pinch", "valid")


@dataclass(frozen=True, slots=True)
class InputFrame:
    """One timestamped sample of gaze ray, head pose, hand pose, pinch state."""

    t_ms: int
    gaze: Ray
    head_pose: Pose
    hand_pose: Pose
    pinch: bool = False
    hand_valid: bool = True
    extra: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        doc = {
            "t": self.t_ms,
            "gaze": {"o": self.gaze.origin.to_list(), "d": self.gaze.direction.to_list()},
            "head": {
                "p": self.head_pose.position.to_list(),
                "q": self.head_pose.orientation.to_list(),
            },
            "hand": {
                "p": self.hand_pose.position.to_list(),
                "q": self.hand_pose.orientation.to_list(),
            },
            "pinch": self.pinch,
            "valid": self.hand_valid,
        }
        doc.update(self.extra)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "InputFrame":
        return cls(
            t_ms=int(doc["t"]),
            gaze=Ray(Vec3.from_list(doc["gaze"]["o"]), Vec3.from_list(doc["gaze"]["d"])),
            head_pose=Pose(
                Vec3.from_list(doc["head"]["p"]), UnitQuat.from_list(doc["head"]["q"])
            ),
            hand_pose=Pose(
                Vec3.from_list(doc["hand"]["p"]), UnitQuat.from_list(doc["hand"]["q"])
            ),
            pinch=bool(doc["pinch"]),
            hand_valid=bool(doc["valid"]),
            extra={k: v for k, v in doc.items() if k not in _KNOWN_FIELDS},
        )


def frame_timestamps_ms(rate_hz: float, count: int) -> list[int]:
    """Integer-ms timestamps on an exact `rate_hz` grid, strictly increasing."""
    return [round(1000.0 * k / rate_hz) for k in range(count)]


def write_trace(frames: Iterable[InputFrame], stream: IO[str]) -> None:
    for frame in frames:
        stream.write(json.dumps(frame.to_dict(), separators=(",", ":")))
        stream.write("\n")


def write_trace_file(frames: Iterable[InputFrame], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_trace(frames, fh)


def read_trace(
    stream: IO[str],
    *,
    path: str | None = None,
    smooth_hand: bool = False,
    min_cutoff: float = 1.0,
    beta: float = 0.007,
    d_cutoff: float = 1.0,
) -> list[InputFrame]:
    """Parse a JSONL trace; optionally smooth hand positions at read time."""
    frames: list[InputFrame] = []
    last_t: int | None = None
    filt: OneEuroState | None = None
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceParseError(f"invalid JSON: {exc.msg}", line=lineno, path=path) from None
        try:
            frame = InputFrame.from_dict(doc)
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceParseError(f"bad frame: {exc!r}", line=lineno, path=path) from None
        if last_t is not None and frame.t_ms <= last_t:
            raise SequencingError(
                f"{path or 'trace'}:{lineno}: timestamp {frame.t_ms} does not "
                f"increase past {last_t}"
            )
        last_t = frame.t_ms
        if smooth_hand and frame.hand_valid:
            t_s = frame.t_ms / 1000.0
            if filt is None:
                filt = OneEuroState.initial(
                    frame.hand_pose.position,
                    t_s,
                    min_cutoff=min_cutoff,
                    beta=beta,
                    d_cutoff=d_cutoff,
                )
            else:
                smoothed, filt = one_euro_step(filt, frame.hand_pose.position, t_s)
                frame = InputFrame(
                    t_ms=frame.t_ms,
                    gaze=frame.gaze,
                    head_pose=frame.head_pose,
                    hand_pose=Pose(smoothed, frame.hand_pose.orientation),
                    pinch=frame.pinch,
                    hand_valid=frame.hand_valid,
                    extra=frame.extra,
                )
        frames.append(frame)
    return frames


def read_trace_file(path: str, **kwargs) -> list[InputFrame]:
    with open(path, "r", encoding="utf-8") as fh:
        return read_trace(fh, path=path, **kwargs)


def hold_gaze_to_rate(frames: list[InputFrame], eye_rate_hz: float, frame_rate_hz: float) -> Iterator[InputFrame]:
    """Sample-and-hold gaze rays of a lower-rate eye tracker onto the frame grid."""
    if eye_rate_hz >= frame_rate_hz:
        yield from frames
        return
    stride = max(1, round(frame_rate_hz / eye_rate_hz))
    held: Ray | None = None
    for i, frame in enumerate(frames):
        if i % stride == 0 or held is None:
            held = frame.gaze
        yield InputFrame(
            t_ms=frame.t_ms,
            gaze=held,
            head_pose=frame.head_pose,
            hand_pose=frame.hand_pose,
            pinch=frame.pinch,
            hand_valid=frame.hand_valid,
            extra=frame.extra,
        )
