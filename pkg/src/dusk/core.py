"""Shared domain types and coordinate conventions.

All geometry is in millimeters on the touchpad surface. The origin is the
pad's top-left corner and Y grows downward (screen convention); every other
module inherits these conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class Thumb(Enum):
    LEFT = "left"
    RIGHT = "right"

    def other(self) -> "Thumb":
        return Thumb.RIGHT if self is Thumb.LEFT else Thumb.LEFT


# Key identifiers: the 26 lowercase letters plus the five function keys.
LETTERS = "abcdefghijklmnopqrstuvwxyz"

KEY_SPACE = "space"
KEY_BACKSPACE = "backspace"
KEY_ENTER = "enter"
KEY_SUGGEST1 = "suggest1"
KEY_SUGGEST2 = "suggest2"

FUNCTION_KEYS = (KEY_SPACE, KEY_BACKSPACE, KEY_ENTER, KEY_SUGGEST1, KEY_SUGGEST2)
ALL_KEYS = tuple(LETTERS) + FUNCTION_KEYS


def is_letter(key: str) -> bool:
    return len(key) == 1 and "a" <= key <= "z"


def is_key(key: str) -> bool:
    return key in ALL_KEYS


@dataclass(frozen=True)
class TouchSample:
    """One touch point: position in pad millimeters, time in ms since session epoch."""

    x: float
    y: float
    t: float


@dataclass(frozen=True)
class PadSpec:
    """Physical touchpad dimensions, landscape orientation (width > height).

    The defaults approximate a 5.9-inch touchscreen held sideways. The true
    pad size is device-specific, so keep this configurable; profiles store
    millimeter-space statistics precisely so they transfer across devices.
    """

    width: float = 134.0
    height: float = 63.0

    def __post_init__(self) -> None:
        if not (self.width > self.height > 0):
            raise ValueError(f"pad must be landscape with positive size, got {self.width}x{self.height}")


@dataclass(frozen=True)
class Gesture:
    """A single contiguous contact: ordered samples from touch-down to touch-up."""

    samples: tuple[TouchSample, ...]
    pointer_id: int = 0

    def __post_init__(self) -> None:
        if not self.samples:
            raise ValueError("gesture needs at least one sample")
        ts = [s.t for s in self.samples]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ValueError("sample times must be nondecreasing within a gesture")

    @property
    def down_t(self) -> float:
        return self.samples[0].t

    @property
    def up_t(self) -> float:
        return self.samples[-1].t

    @property
    def duration(self) -> float:
        return self.up_t - self.down_t


def gesture(points: list[tuple[float, float]] | list[tuple[float, float, float]],
            pointer_id: int = 0, dt: float = 10.0) -> Gesture:
    """Build a Gesture from (x, y) or (x, y, t) tuples; 2-tuples get times 0, dt, 2*dt..."""
    samples = []
    for i, p in enumerate(points):
        if len(p) == 3:
            samples.append(TouchSample(p[0], p[1], p[2]))
        else:
            samples.append(TouchSample(p[0], p[1], i * dt))
    return Gesture(tuple(samples), pointer_id=pointer_id)


@dataclass(frozen=True)
class NormalizedEndpoint:
    """Stroke displacement: last sample minus first sample, in millimeters."""

    dx: float
    dy: float

    def norm(self) -> float:
        return math.hypot(self.dx, self.dy)


def normalized_endpoint(g: Gesture) -> NormalizedEndpoint:
    """Displacement from the gesture's first sample to its last."""
    first, last = g.samples[0], g.samples[-1]
    return NormalizedEndpoint(last.x - first.x, last.y - first.y)


def path_length(g: Gesture) -> float:
    """Total arc length: sum of distances between consecutive samples, in mm."""
    total = 0.0
    for a, b in zip(g.samples, g.samples[1:]):
        total += math.hypot(b.x - a.x, b.y - a.y)
    return total
