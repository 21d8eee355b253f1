"""TUIO 1.1 cursor ingestion: /tuio/2Dcur bundles to touch contacts.

Each UDP packet carries one frame: an `alive` message listing live session
ids, `set` messages with normalized positions, and an `fseq` sequence
number. Frames translate into down/move/up events keyed by session id, and
events assemble into finished Gestures. Pad coordinates come from scaling
the normalized [0,1] positions by the pad size.
"""

from __future__ import annotations

import logging
import socket
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

from .core import Gesture, PadSpec, TouchSample
from .osc import OscMessage, OscParseError, parse_packet

log = logging.getLogger(__name__)

CURSOR_ADDRESS = "/tuio/2Dcur"

DEFAULT_PORT = 3333


class TuioFrameError(ValueError):
    pass


@dataclass(frozen=True)
class CursorState:
    session_id: int
    x: float  # normalized [0,1]
    y: float


@dataclass(frozen=True)
class TuioFrame:
    fseq: int
    alive: tuple[int, ...]
    cursors: tuple[CursorState, ...]


class TouchEventKind(Enum):
    DOWN = "down"
    MOVE = "move"
    UP = "up"


@dataclass(frozen=True)
class TouchEvent:
    kind: TouchEventKind
    pointer_id: int
    sample: TouchSample


@dataclass
class TuioStats:
    frames: int = 0
    duplicate_frames: int = 0
    redundant_frames: int = 0
    malformed_frames: int = 0
    malformed_packets: int = 0
    ignored_messages: int = 0


def frame_from_messages(messages: Iterable[OscMessage], stats: TuioStats | None = None
                        ) -> TuioFrame | None:
    """Assemble one cursor frame from a packet's messages.

    Returns None when the packet carries no 2Dcur content. Raises
    TuioFrameError on structural problems (set without alive membership,
    missing fseq, bad argument types).
    """
    alive: tuple[int, ...] | None = None
    fseq: int | None = None
    cursors: list[CursorState] = []
    saw_cursor_profile = False
    for m in messages:
        if m.address != CURSOR_ADDRESS:
            if stats:
                stats.ignored_messages += 1
            continue
        saw_cursor_profile = True
        if not m.args:
            raise TuioFrameError("2Dcur message without a command argument")
        cmd = m.args[0]
        if cmd == "alive":
            if any(not isinstance(a, int) for a in m.args[1:]):
                raise TuioFrameError("alive ids must be int32")
            alive = tuple(m.args[1:])
        elif cmd == "set":
            if len(m.args) != 7:
                raise TuioFrameError(f"set expects 6 arguments, got {len(m.args) - 1}")
            sid = m.args[1]
            if not isinstance(sid, int):
                raise TuioFrameError("set session id must be int32")
            if any(not isinstance(a, float) for a in m.args[2:]):
                raise TuioFrameError("set coordinates must be float32")
            x, y = m.args[2], m.args[3]
            cursors.append(CursorState(session_id=sid, x=x, y=y))
        elif cmd == "fseq":
            if len(m.args) != 2 or not isinstance(m.args[1], int):
                raise TuioFrameError("fseq expects one int32")
            fseq = m.args[1]
        elif cmd == "source":
            continue  # sender identification; irrelevant here
        else:
            raise TuioFrameError(f"unknown 2Dcur command {cmd!r}")
    if not saw_cursor_profile:
        return None
    if alive is None or fseq is None:
        raise TuioFrameError("frame lacks alive or fseq")
    alive_set = set(alive)
    for c in cursors:
        if c.session_id not in alive_set:
            raise TuioFrameError(f"set for session id {c.session_id} not in alive")
    return TuioFrame(fseq=fseq, alive=alive, cursors=tuple(cursors))


class TouchAssembler:
    """Turns an ordered stream of frames into down/move/up events.

    Duplicate frames (fseq not greater than the last seen) and redundant
    frames (fseq -1) are dropped. A sender restart, detected by fseq
    falling back dramatically, resets the sequence tracking.
    """

    RESTART_GAP = 100_000

    def __init__(self, pad: PadSpec, stats: TuioStats | None = None) -> None:
        self.pad = pad
        self.stats = stats if stats is not None else TuioStats()
        self._positions: dict[int, tuple[float, float]] = {}  # sid -> last (x_mm, y_mm)
        self._last_fseq: int | None = None

    def feed(self, frame: TuioFrame, t_ms: float) -> list[TouchEvent]:
        if frame.fseq == -1:
            self.stats.redundant_frames += 1
            return []
        if self._last_fseq is not None and frame.fseq <= self._last_fseq:
            if self._last_fseq - frame.fseq < self.RESTART_GAP:
                self.stats.duplicate_frames += 1
                return []
            self._positions.clear()  # sender restarted; stale contacts are gone
        self._last_fseq = frame.fseq
        self.stats.frames += 1
        events: list[TouchEvent] = []
        alive = set(frame.alive)
        for sid in sorted(self._positions.keys() - alive):
            x, y = self._positions.pop(sid)
            events.append(TouchEvent(TouchEventKind.UP, sid, TouchSample(x, y, t_ms)))
        for c in frame.cursors:
            x = min(max(c.x, 0.0), 1.0) * self.pad.width
            y = min(max(c.y, 0.0), 1.0) * self.pad.height
            kind = TouchEventKind.MOVE if c.session_id in self._positions else TouchEventKind.DOWN
            self._positions[c.session_id] = (x, y)
            events.append(TouchEvent(kind, c.session_id, TouchSample(x, y, t_ms)))
        return events

    def feed_packet(self, data: bytes, t_ms: float) -> list[TouchEvent]:
        """Parse one datagram and feed it; malformed input is counted, not raised."""
        try:
            messages = parse_packet(data)
        except OscParseError as e:
            self.stats.malformed_packets += 1
            log.debug("dropping malformed OSC packet: %s", e)
            return []
        try:
            frame = frame_from_messages(messages, self.stats)
        except TuioFrameError as e:
            self.stats.malformed_frames += 1
            log.debug("rejecting TUIO frame: %s", e)
            return []
        if frame is None:
            return []
        return self.feed(frame, t_ms)


class GestureCollector:
    """Accumulates touch events into finished gestures, one per contact."""

    def __init__(self) -> None:
        self._open: dict[int, list[TouchSample]] = {}

    def feed(self, event: TouchEvent) -> Gesture | None:
        pid = event.pointer_id
        if event.kind is TouchEventKind.DOWN:
            self._open[pid] = [event.sample]
            return None
        if pid not in self._open:
            return None  # up/move for a contact that never went down here
        if event.kind is TouchEventKind.MOVE:
            self._open[pid].append(event.sample)
            return None
        samples = self._open.pop(pid)
        if event.sample != samples[-1]:
            samples.append(event.sample)
        return Gesture(tuple(samples), pointer_id=pid)

    def open_contacts(self) -> list[int]:
        return sorted(self._open)


def encode_frame(frame: TuioFrame) -> bytes:
    """Encode a cursor frame as an OSC bundle; the complement of frame_from_messages."""
    from .osc import encode_bundle

    messages = [OscMessage(CURSOR_ADDRESS, ("alive", *frame.alive))]
    for c in frame.cursors:
        messages.append(OscMessage(
            CURSOR_ADDRESS, ("set", c.session_id, c.x, c.y, 0.0, 0.0, 0.0)))
    messages.append(OscMessage(CURSOR_ADDRESS, ("fseq", frame.fseq)))
    return encode_bundle(messages)


def listen_udp(port: int, pad: PadSpec,
               on_event: Callable[[TouchEvent], None] | None = None,
               on_gesture: Callable[[Gesture], None] | None = None,
               clock: Callable[[], float] | None = None,
               max_packets: int | None = None,
               stats: TuioStats | None = None,
               on_bind: Callable[[int], None] | None = None) -> TuioStats:
    """Blocking UDP listen loop; returns stats when max_packets is reached
    or the socket is closed. Timestamps come from the local clock in ms.
    Port 0 binds an ephemeral port; on_bind receives the actual one."""
    import time

    clock = clock or (lambda: time.monotonic() * 1000.0)
    assembler = TouchAssembler(pad, stats)
    collector = GestureCollector()
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    try:
        sock.bind(("127.0.0.1" if port == 0 else "0.0.0.0", port))
        if on_bind is not None:
            on_bind(sock.getsockname()[1])
        seen = 0
        while max_packets is None or seen < max_packets:
            data, _ = sock.recvfrom(65536)
            seen += 1
            t = clock()
            for ev in assembler.feed_packet(data, t):
                if on_event:
                    on_event(ev)
                g = collector.feed(ev)
                if g is not None and on_gesture:
                    on_gesture(g)
    finally:
        sock.close()
    return assembler.stats
