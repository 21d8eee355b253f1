"""Contact classification and stroke-shape recognition.

A contact is a tap when its total path length stays under 10 mm, otherwise
a stroke. Stroke shapes are matched against a 64-action alphabet: 8 tap
cells handled elsewhere plus 56 stroke templates (8 straight singles and 48
two-leg compounds) compared by dynamic time warping over angle sequences,
which makes recognition scale- and position-invariant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .core import Gesture, PadSpec, Thumb, path_length
from .layout import CellId

TAP_THRESHOLD_MM = 10.0

RESAMPLE_POINTS = 10  # resampled points per stroke; yields 9 segment angles


class ContactClass(Enum):
    TAP = "tap"
    STROKE = "stroke"


class NotAStrokeError(ValueError):
    pass


class NotATapError(ValueError):
    pass


def classify_contact(g: Gesture, threshold_mm: float = TAP_THRESHOLD_MM) -> ContactClass:
    """Tap iff the finger moved strictly less than the threshold in total."""
    return ContactClass.TAP if path_length(g) < threshold_mm else ContactClass.STROKE


def infer_thumb(g: Gesture, pad: PadSpec) -> Thumb:
    """Which thumb made the contact, from the touch-down half of the pad.

    A touch exactly on the midline counts as Right so the choice is stable
    under replay.
    """
    return Thumb.LEFT if g.samples[0].x < pad.width / 2 else Thumb.RIGHT


def tap_cell(x: float, y: float, pad: PadSpec) -> CellId:
    """3x3 grid cell containing a pad point; the far edges fold into the last cell."""
    col = min(int(3 * x / pad.width), 2)
    row = min(int(3 * y / pad.height), 2)
    return (row, col)


def recognize_tap(g: Gesture, pad: PadSpec) -> CellId:
    """Grid cell of a tap, taken at the touch-down position."""
    if classify_contact(g) is not ContactClass.TAP:
        raise NotATapError("contact moved too far to be a tap")
    first = g.samples[0]
    return tap_cell(first.x, first.y, pad)


# --- angle sequences ---


def _dedupe(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out = [points[0]]
    for p in points[1:]:
        if p != out[-1]:
            out.append(p)
    return out


def resample_polyline(points: list[tuple[float, float]], n: int = RESAMPLE_POINTS) -> list[tuple[float, float]]:
    """n points evenly spaced by arc length along the polyline, endpoints kept."""
    pts = _dedupe(points)
    if len(pts) < 2:
        raise NotAStrokeError("cannot resample a zero-length path")
    seg_len = [math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(pts, pts[1:])]
    total = sum(seg_len)
    out = [pts[0]]
    target = 0.0
    seg = 0
    walked = 0.0  # arc length consumed before segment `seg`
    for k in range(1, n - 1):
        target = total * k / (n - 1)
        while walked + seg_len[seg] < target and seg < len(seg_len) - 1:
            walked += seg_len[seg]
            seg += 1
        frac = (target - walked) / seg_len[seg]
        a, b = pts[seg], pts[seg + 1]
        out.append((a[0] + frac * (b[0] - a[0]), a[1] + frac * (b[1] - a[1])))
    out.append(pts[-1])
    return out


def angle_sequence(g: Gesture, n: int = RESAMPLE_POINTS) -> tuple[float, ...]:
    """Stroke shape as n-1 segment angles (radians, atan2 convention, y down)."""
    pts = resample_polyline([(s.x, s.y) for s in g.samples], n)
    return tuple(math.atan2(b[1] - a[1], b[0] - a[0]) for a, b in zip(pts, pts[1:]))


def angular_distance(a: float, b: float) -> float:
    """Circular distance between two angles, in [0, pi]."""
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def dtw_deviation(a: list[float] | tuple[float, ...], b: list[float] | tuple[float, ...]) -> float:
    """Unconstrained DTW cost between two angle sequences.

    Per-cell cost is circular angular distance; the warping window is the
    full matrix so equal shapes traced at uneven speeds still align.
    """
    if not a or not b:
        raise ValueError("empty angle sequence")
    n, m = len(a), len(b)
    inf = float("inf")
    prev = [inf] * m
    for i in range(n):
        cur = [0.0] * m
        for j in range(m):
            c = angular_distance(a[i], b[j])
            if i == 0 and j == 0:
                cur[j] = c
            else:
                best = inf
                if i > 0:
                    best = min(best, prev[j])
                if j > 0:
                    best = min(best, cur[j - 1])
                if i > 0 and j > 0:
                    best = min(best, prev[j - 1])
                cur[j] = c + best
        prev = cur
    return prev[m - 1]


# --- template alphabet ---

SINGLE8 = "single8"
LSHAPE = "lshape"
VSHAPE = "vshape"

# Compass directions in pad coordinates (y grows downward).
_DIRECTIONS = {
    "e": 0.0,
    "ne": -45.0,
    "n": -90.0,
    "nw": -135.0,
    "w": 180.0,
    "sw": 135.0,
    "s": 90.0,
    "se": 45.0,
}

_DIR_ORDER = ("e", "ne", "n", "nw", "w", "sw", "s", "se")
_CARDINALS = frozenset(("e", "n", "w", "s"))

_LEG_MM = 20.0


@dataclass(frozen=True)
class StrokeTemplate:
    id: str
    family: str
    angles: tuple[float, ...]


def _unit(deg: float) -> tuple[float, float]:
    r = math.radians(deg)
    return (math.cos(r), math.sin(r))


def _polyline_angles(points: list[tuple[float, float]]) -> tuple[float, ...]:
    pts = resample_polyline(points, RESAMPLE_POINTS)
    return tuple(math.atan2(b[1] - a[1], b[0] - a[0]) for a, b in zip(pts, pts[1:]))


def _turn_deg(d1: str, d2: str) -> float:
    """Signed second-leg heading change, normalized to (-180, 180]."""
    t = (_DIRECTIONS[d2] - _DIRECTIONS[d1]) % 360.0
    if t > 180.0:
        t -= 360.0
    return t


def build_templates() -> tuple[StrokeTemplate, ...]:
    """The 56-template stroke alphabet.

    8 straight singles, one per compass direction, plus every two-leg
    compound with equal legs and a bend of 45, 90 or 135 degrees in either
    direction (8 starts x 6 turns = 48). Bends of 90 degrees form the
    L-shaped family and 135-degree bends the V-shaped family; the shallow
    45-degree bends split by first-leg direction (cardinal start -> L,
    diagonal start -> V) so both families hold 24 shapes.
    """
    templates: list[StrokeTemplate] = []
    for d in _DIR_ORDER:
        ux, uy = _unit(_DIRECTIONS[d])
        poly = [(0.0, 0.0), (_LEG_MM * ux, _LEG_MM * uy)]
        templates.append(StrokeTemplate(id=d, family=SINGLE8, angles=_polyline_angles(poly)))
    for d1 in _DIR_ORDER:
        for d2 in _DIR_ORDER:
            turn = _turn_deg(d1, d2)
            if abs(turn) not in (45.0, 90.0, 135.0):
                continue
            if abs(turn) == 90.0:
                family = LSHAPE
            elif abs(turn) == 135.0:
                family = VSHAPE
            else:
                family = LSHAPE if d1 in _CARDINALS else VSHAPE
            u1, u2 = _unit(_DIRECTIONS[d1]), _unit(_DIRECTIONS[d2])
            mid = (_LEG_MM * u1[0], _LEG_MM * u1[1])
            end = (mid[0] + _LEG_MM * u2[0], mid[1] + _LEG_MM * u2[1])
            poly = [(0.0, 0.0), mid, end]
            templates.append(StrokeTemplate(id=f"{d1}-{d2}", family=family, angles=_polyline_angles(poly)))
    return tuple(templates)


_TEMPLATES: tuple[StrokeTemplate, ...] | None = None


def default_templates() -> tuple[StrokeTemplate, ...]:
    global _TEMPLATES
    if _TEMPLATES is None:
        _TEMPLATES = build_templates()
    return _TEMPLATES


def recognize_stroke(g: Gesture, templates: tuple[StrokeTemplate, ...] | None = None) -> StrokeTemplate:
    """Best-matching template for a stroke; ties keep the earliest template."""
    if classify_contact(g) is not ContactClass.STROKE:
        raise NotAStrokeError("contact too short to be a stroke")
    if templates is None:
        templates = default_templates()
    seq = angle_sequence(g)
    best = None
    best_cost = float("inf")
    for t in templates:
        cost = dtw_deviation(seq, t.angles)
        if cost < best_cost:
            best_cost = cost
            best = t
    assert best is not None
    return best


def batch_deviations(seqs: np.ndarray, templates: tuple[StrokeTemplate, ...] | None = None) -> np.ndarray:
    """DTW cost of many angle sequences against every template at once.

    seqs has shape (B, n); the result has shape (B, T). Matches
    dtw_deviation exactly but runs the DP vectorized, which the Monte-Carlo
    robustness checks need to finish in seconds.
    """
    if templates is None:
        templates = default_templates()
    tmpl = np.array([t.angles for t in templates])  # (T, m)
    seqs = np.asarray(seqs, dtype=float)
    n, m = seqs.shape[1], tmpl.shape[1]
    diff = np.abs(seqs[:, None, :, None] - tmpl[None, :, None, :]) % (2 * np.pi)
    cost = np.minimum(diff, 2 * np.pi - diff)  # (B, T, n, m)
    acc = np.empty_like(cost)
    acc[:, :, 0, 0] = cost[:, :, 0, 0]
    for j in range(1, m):
        acc[:, :, 0, j] = cost[:, :, 0, j] + acc[:, :, 0, j - 1]
    for i in range(1, n):
        acc[:, :, i, 0] = cost[:, :, i, 0] + acc[:, :, i - 1, 0]
        for j in range(1, m):
            acc[:, :, i, j] = cost[:, :, i, j] + np.minimum(
                acc[:, :, i - 1, j], np.minimum(acc[:, :, i, j - 1], acc[:, :, i - 1, j - 1])
            )
    return acc[:, :, n - 1, m - 1]


# --- template serialization (shared with the UI) ---


def templates_to_dict(templates: tuple[StrokeTemplate, ...]) -> dict:
    return {
        "templates": [
            {"id": t.id, "family": t.family, "angles": [round(a, 12) for a in t.angles]}
            for t in templates
        ]
    }


def templates_from_dict(d: dict) -> tuple[StrokeTemplate, ...]:
    return tuple(
        StrokeTemplate(id=t["id"], family=t["family"], angles=tuple(t["angles"]))
        for t in d["templates"]
    )


def save_templates(path: str | Path, templates: tuple[StrokeTemplate, ...] | None = None) -> None:
    if templates is None:
        templates = default_templates()
    Path(path).write_text(json.dumps(templates_to_dict(templates), indent=2) + "\n")


def load_templates(path: str | Path) -> tuple[StrokeTemplate, ...]:
    return templates_from_dict(json.loads(Path(path).read_text()))
