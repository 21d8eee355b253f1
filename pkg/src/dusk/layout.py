"""Virtual QWERTY layout geometry and key-to-thumb assignment.

Key positions live in abstract key units (1 unit = one key pitch, i.e. two
key radii). The keyboard never appears on the input surface; its geometry
only anchors the transfer functions and the decoder's nearest-key search.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    KEY_BACKSPACE,
    KEY_ENTER,
    KEY_SPACE,
    KEY_SUGGEST1,
    KEY_SUGGEST2,
    LETTERS,
    Thumb,
    is_letter,
)

QWERTY_ROWS = ("qwertyuiop", "asdfghjkl", "zxcvbnm")

# Horizontal stagger of each row, in key units.
QWERTY_ROW_OFFSETS = (0.0, 0.5, 1.5)

KEY_RADIUS = 0.5  # key units; adjacent keys in a row are exactly 1 unit apart

# Cell ids for the 3x3 tap grid: (row, col), row 0 at the top.
CellId = tuple[int, int]

# Function keys sit in tap cells; the center cell is reserved for the
# inferred thumb's start key and is resolved by the decoder, never mapped here.
DEFAULT_TAP_MAP: dict[CellId, str] = {
    (0, 0): KEY_SUGGEST1,
    (0, 2): KEY_SUGGEST2,
    (1, 2): KEY_ENTER,
    (2, 0): KEY_SPACE,
    (2, 2): KEY_BACKSPACE,
}

CENTER_CELL: CellId = (1, 1)

# Letters reachable by each thumb. Columns t/g/b and leftward belong to the
# left thumb; y/h/n and rightward to the right. Space is struck by the left
# thumb by convention, which the timing model relies on.
LEFT_LETTERS = frozenset("qwertasdfgzxcvb")
RIGHT_LETTERS = frozenset("yuiophjklnm")


def default_thumb_map() -> dict[str, Thumb]:
    m = {c: (Thumb.LEFT if c in LEFT_LETTERS else Thumb.RIGHT) for c in LETTERS}
    m[KEY_SPACE] = Thumb.LEFT
    return m


@dataclass
class Layout:
    rows: tuple[str, ...] = QWERTY_ROWS
    offsets: tuple[float, ...] = QWERTY_ROW_OFFSETS
    start_left: str = "d"
    start_right: str = "k"
    tap_map: dict[CellId, str] = field(default_factory=lambda: dict(DEFAULT_TAP_MAP))
    thumb_map: dict[str, Thumb] = field(default_factory=default_thumb_map)

    def __post_init__(self) -> None:
        if len(self.rows) != len(self.offsets):
            raise ValueError("rows and offsets must have equal length")
        letters = "".join(self.rows)
        if sorted(letters) != sorted(set(letters)):
            raise ValueError("duplicate letter in layout rows")
        for start in (self.start_left, self.start_right):
            if start not in letters:
                raise ValueError(f"start key {start!r} not in layout")
        if CENTER_CELL in self.tap_map:
            raise ValueError("center cell is reserved for the start keys")
        for cell in self.tap_map:
            if not (0 <= cell[0] <= 2 and 0 <= cell[1] <= 2):
                raise ValueError(f"tap cell out of range: {cell}")

    def letters(self) -> str:
        return "".join(self.rows)

    def key_position(self, key: str) -> tuple[float, float]:
        """Center of a letter key in key units: x = row offset + column, y = row index."""
        for row_idx, row in enumerate(self.rows):
            col = row.find(key)
            if col >= 0:
                return (self.offsets[row_idx] + col, float(row_idx))
        raise KeyError(f"no such letter key: {key!r}")

    def start_key(self, thumb: Thumb) -> str:
        return self.start_left if thumb is Thumb.LEFT else self.start_right

    def thumb_for(self, key: str) -> Thumb:
        try:
            return self.thumb_map[key]
        except KeyError:
            raise KeyError(f"no thumb assignment for key {key!r}") from None

    def side_letters(self, thumb: Thumb) -> list[str]:
        return [c for c in self.letters() if self.thumb_map.get(c) is thumb]

    def nearest_letter(self, point: tuple[float, float]) -> str:
        """Letter whose center is closest to a key-unit point; ties break alphabetically."""
        px, py = point
        best_key = None
        best = (float("inf"), "")
        for c in sorted(self.letters()):
            kx, ky = self.key_position(c)
            d = (kx - px) ** 2 + (ky - py) ** 2
            if (d, c) < best:
                best = (d, c)
                best_key = c
        assert best_key is not None
        return best_key

    def mean_key_distance(self, from_key: str, thumb: Thumb) -> float:
        """Mean center-to-center distance, in key units, from one key to every
        letter on the given thumb's side (the key itself included)."""
        fx, fy = self.key_position(from_key)
        side = self.side_letters(thumb)
        if not side:
            raise ValueError(f"no letters assigned to {thumb}")
        total = 0.0
        for c in side:
            kx, ky = self.key_position(c)
            total += ((kx - fx) ** 2 + (ky - fy) ** 2) ** 0.5
        return total / len(side)

    # --- serialization ---

    def to_dict(self) -> dict:
        return {
            "rows": list(self.rows),
            "offsets": list(self.offsets),
            "start_left": self.start_left,
            "start_right": self.start_right,
            "tap_map": {f"{r},{c}": k for (r, c), k in sorted(self.tap_map.items())},
            "thumb_map": {k: t.value for k, t in sorted(self.thumb_map.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Layout":
        tap_map = {}
        for cell, key in d["tap_map"].items():
            r, c = cell.split(",")
            tap_map[(int(r), int(c))] = key
        return cls(
            rows=tuple(d["rows"]),
            offsets=tuple(float(o) for o in d["offsets"]),
            start_left=d["start_left"],
            start_right=d["start_right"],
            tap_map=tap_map,
            thumb_map={k: Thumb(v) for k, v in d["thumb_map"].items()},
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Layout":
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> "Layout":
        return cls.from_json(Path(path).read_text())


def default_layout() -> Layout:
    return Layout()
