"""Gesture session logs: JSON Lines, one gesture or phrase marker per line.

A gesture line holds the raw samples plus optional calibration context
(target_key, thumb, stimulus_t). A phrase marker line holds the presented
text that the following gestures transcribe. Unknown fields survive a
read/write round trip, so logs from newer tools keep their annotations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

from .calibration import GestureLogRecord
from .core import Gesture, Thumb, TouchSample

KNOWN_GESTURE_FIELDS = frozenset(["samples", "pointer_id", "target_key", "thumb", "stimulus_t"])
KNOWN_MARKER_FIELDS = frozenset(["presented"])


class SessionLogError(ValueError):
    pass


@dataclass
class PhraseMarker:
    presented: str
    extras: dict = field(default_factory=dict)


LogEntry = GestureLogRecord | PhraseMarker


def entry_to_dict(entry: LogEntry) -> dict:
    if isinstance(entry, PhraseMarker):
        return {"presented": entry.presented, **entry.extras}
    d: dict = {"samples": [[s.x, s.y, s.t] for s in entry.gesture.samples]}
    if entry.gesture.pointer_id != 0:
        d["pointer_id"] = entry.gesture.pointer_id
    if entry.target_key is not None:
        d["target_key"] = entry.target_key
    if entry.thumb is not None:
        d["thumb"] = entry.thumb.value
    if entry.stimulus_t is not None:
        d["stimulus_t"] = entry.stimulus_t
    d.update(entry.extras)
    return d


def entry_from_dict(d: dict) -> LogEntry:
    if "samples" in d:
        samples = tuple(TouchSample(s[0], s[1], s[2]) for s in d["samples"])
        gesture = Gesture(samples, pointer_id=d.get("pointer_id", 0))
        thumb = Thumb(d["thumb"]) if "thumb" in d else None
        extras = {k: v for k, v in d.items() if k not in KNOWN_GESTURE_FIELDS}
        return GestureLogRecord(
            gesture=gesture,
            target_key=d.get("target_key"),
            thumb=thumb,
            stimulus_t=d.get("stimulus_t"),
            extras=extras,
        )
    if "presented" in d:
        extras = {k: v for k, v in d.items() if k not in KNOWN_MARKER_FIELDS}
        return PhraseMarker(presented=d["presented"], extras=extras)
    raise SessionLogError("line is neither a gesture (samples) nor a phrase marker (presented)")


def write_session_log(dest: str | Path | TextIO, entries: Iterable[LogEntry]) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as f:
            write_session_log(f, entries)
        return
    for entry in entries:
        dest.write(json.dumps(entry_to_dict(entry), sort_keys=True) + "\n")


def read_session_log(src: str | Path | TextIO) -> list[LogEntry]:
    if isinstance(src, (str, Path)):
        with open(src, encoding="utf-8") as f:
            return read_session_log(f)
    entries: list[LogEntry] = []
    for lineno, raw in enumerate(src, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            d = json.loads(line)
        except json.JSONDecodeError as e:
            raise SessionLogError(f"line {lineno}: invalid JSON: {e.msg}") from None
        if not isinstance(d, dict):
            raise SessionLogError(f"line {lineno}: expected an object")
        try:
            entries.append(entry_from_dict(d))
        except SessionLogError as e:
            raise SessionLogError(f"line {lineno}: {e}") from None
        except (KeyError, IndexError, TypeError, ValueError) as e:
            raise SessionLogError(f"line {lineno}: malformed entry: {e}") from None
    return entries


def gestures_only(entries: Iterable[LogEntry]) -> list[GestureLogRecord]:
    return [e for e in entries if isinstance(e, GestureLogRecord)]
