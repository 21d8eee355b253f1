"""Live typing service: JSON messages over a WebSocket.

One decoder session per connection. The client streams raw touch contacts
in normalized pad coordinates; the server answers with state snapshots
after every decoded gesture, rate-limited cursor positions while a stroke
is in flight, and phrase metrics on demand. All message handling funnels
through handle_client_message, which is synchronous and free of IO so the
protocol is testable without sockets. See docs/protocol.md for the wire
format.
"""

from __future__ import annotations

import asyncio
import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .calibration import CalibrationProfile
from .core import Gesture, NormalizedEndpoint, Thumb, TouchSample
from .decoder import DecodeError, EventKind, KeyEvent, Session
from .layout import Layout
from .lexicon import Lexicon
from .recognizer import infer_thumb
from .replay import input_stream_from_events, phrase_metrics

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1

CURSOR_RATE_HZ = 60.0  # per-thumb cap on cursor messages

CLIENT_KINDS = frozenset(
    ["touch_down", "touch_move", "touch_up", "start_phrase", "end_phrase", "set_options"])


@dataclass
class ServiceConfig:
    profile: CalibrationProfile
    layout: Layout
    lexicon: Lexicon | None = None
    predictions_enabled: bool = True

    def __post_init__(self) -> None:
        if self.lexicon is None:
            self.predictions_enabled = False


def _error(message: str) -> dict:
    return {"kind": "error", "message": message}


class ClientState:
    """Per-connection decoder session plus in-flight contact tracking."""

    def __init__(self, config: ServiceConfig) -> None:
        self.config = config
        self.session = Session(
            profile=config.profile,
            layout=config.layout,
            lexicon=config.lexicon,
            predictions_enabled=config.predictions_enabled,
        )
        self.contacts: dict[int, list[TouchSample]] = {}
        self.presented: str | None = None
        self.phrase_events: list[KeyEvent] = []
        self.phrase_committed_start = ""
        self.phrase_first_down: float | None = None
        self.phrase_last_up: float | None = None
        self.phrase_gestures = 0
        self._cursor_last_t: dict[Thumb, float] = {}

    # --- message handling ---

    def hello_message(self) -> dict:
        return {
            "kind": "hello",
            "version": PROTOCOL_VERSION,
            "pad": {"width": self.config.profile.pad.width,
                    "height": self.config.profile.pad.height},
            "layout": self.config.layout.to_dict(),
            "predictions_enabled": self.session.predictions_enabled,
        }

    def state_message(self, events: list[KeyEvent] | None = None) -> dict:
        return {
            "kind": "state",
            "committed_text": self.session.committed_text,
            "current_word": self.session.current_word,
            "suggestions": list(self.session.suggestions),
            "events": [e.to_dict() for e in (events or [])
                       if e.kind is not EventKind.CURSOR_FEEDBACK],
        }

    def handle(self, msg: dict) -> list[dict]:
        """Process one client message; returns the server messages it provokes.

        Malformed or out-of-protocol messages produce a single error message
        and leave every bit of state untouched.
        """
        if not isinstance(msg, dict):
            return [_error("message must be a JSON object")]
        kind = msg.get("kind")
        if kind not in CLIENT_KINDS:
            return [_error(f"unknown message kind: {kind!r}")]
        handler = getattr(self, f"_on_{kind}")
        return handler(msg)

    def _touch_fields(self, msg: dict) -> tuple[int, float, float, float]:
        pointer = msg.get("pointer")
        x, y, t = msg.get("x"), msg.get("y"), msg.get("t")
        if not isinstance(pointer, int) or isinstance(pointer, bool):
            raise ValueError("pointer must be an integer")
        for name, v in (("x", x), ("y", y), ("t", t)):
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ValueError(f"{name} must be a number")
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            raise ValueError("x and y must be normalized to [0, 1]")
        pad = self.config.profile.pad
        return pointer, x * pad.width, y * pad.height, float(t)

    def _on_touch_down(self, msg: dict) -> list[dict]:
        try:
            pointer, x, y, t = self._touch_fields(msg)
        except ValueError as e:
            return [_error(str(e))]
        if pointer in self.contacts:
            return [_error(f"pointer {pointer} is already down")]
        self.contacts[pointer] = [TouchSample(x, y, t)]
        return []

    def _on_touch_move(self, msg: dict) -> list[dict]:
        try:
            pointer, x, y, t = self._touch_fields(msg)
        except ValueError as e:
            return [_error(str(e))]
        samples = self.contacts.get(pointer)
        if samples is None:
            return [_error(f"pointer {pointer} moved without going down")]
        if t < samples[-1].t:
            return [_error(f"pointer {pointer} moved backwards in time")]
        samples.append(TouchSample(x, y, t))
        return self._cursor_updates(samples, t)

    def _on_touch_up(self, msg: dict) -> list[dict]:
        try:
            pointer, x, y, t = self._touch_fields(msg)
        except ValueError as e:
            return [_error(str(e))]
        samples = self.contacts.get(pointer)
        if samples is None:
            return [_error(f"pointer {pointer} lifted without going down")]
        if t < samples[-1].t:
            return [_error(f"pointer {pointer} lifted backwards in time")]
        del self.contacts[pointer]
        last = samples[-1]
        if (x, y, t) != (last.x, last.y, last.t):
            samples.append(TouchSample(x, y, t))
        gesture = Gesture(tuple(samples), pointer_id=pointer)
        try:
            events = self.session.feed(gesture)
        except DecodeError as e:
            return [_error(str(e))]
        if self.presented is not None:
            self.phrase_events.extend(events)
            self.phrase_gestures += 1
            if self.phrase_first_down is None:
                self.phrase_first_down = gesture.down_t
            self.phrase_last_up = gesture.up_t
        return [self.state_message(events)]

    def _cursor_updates(self, samples: list[TouchSample], t: float) -> list[dict]:
        thumb = infer_thumb(Gesture((samples[0],)), self.config.profile.pad)
        last = self._cursor_last_t.get(thumb)
        if last is not None and (t - last) < 1000.0 / CURSOR_RATE_HZ:
            return []
        self._cursor_last_t[thumb] = t
        origin = samples[0]
        cur = samples[-1]
        pos = self.config.profile.transfer[thumb].apply(
            NormalizedEndpoint(cur.x - origin.x, cur.y - origin.y))
        return [{"kind": "cursor", "thumb": thumb.value, "x": pos[0], "y": pos[1], "t": t}]

    def _on_start_phrase(self, msg: dict) -> list[dict]:
        text = msg.get("text")
        if not isinstance(text, str) or not text:
            return [_error("start_phrase needs a nonempty text")]
        self.presented = text
        self.phrase_events = []
        self.phrase_committed_start = self.session.committed_text
        self.phrase_first_down = None
        self.phrase_last_up = None
        self.phrase_gestures = 0
        return [self.state_message()]

    def _on_end_phrase(self, msg: dict) -> list[dict]:
        if self.presented is None:
            return [_error("no phrase in progress")]
        delta = (self.session.committed_text[len(self.phrase_committed_start):]
                 + self.session.current_word)
        seconds = 0.0
        if self.phrase_first_down is not None and self.phrase_last_up is not None:
            seconds = (self.phrase_last_up - self.phrase_first_down) / 1000.0
        result = phrase_metrics(
            self.presented, delta, input_stream_from_events(self.phrase_events),
            seconds, self.phrase_gestures)
        self.presented = None
        self.phrase_events = []
        return [{
            "kind": "metrics",
            "presented": result.presented,
            "transcribed": result.transcribed,
            "seconds": result.seconds,
            "wpm": result.wpm,
            "uncorrected_error_rate": result.rates.get("uncorrected"),
            "corrected_error_rate": result.rates.get("corrected"),
            "gestures": result.gesture_count,
        }]

    def _on_set_options(self, msg: dict) -> list[dict]:
        enabled = msg.get("predictions_enabled")
        if not isinstance(enabled, bool):
            return [_error("set_options needs a boolean predictions_enabled")]
        if enabled and self.session.lexicon is None:
            return [_error("no lexicon loaded; predictions unavailable")]
        self.session.predictions_enabled = enabled
        self.session._refresh_suggestions()
        return [self.state_message()]


def handle_client_message(state: ClientState, msg: dict) -> list[dict]:
    return state.handle(msg)


def handle_client_text(state: ClientState, raw: str) -> list[dict]:
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError as e:
        return [_error(f"invalid JSON: {e.msg}")]
    return state.handle(msg)


# --- ASGI app ---


def build_app(config: ServiceConfig, static_dir: str | Path | None = None):
    """FastAPI app: WebSocket decoding at /ws, UI assets at /."""
    from fastapi import FastAPI, WebSocket, WebSocketDisconnect
    from fastapi.responses import HTMLResponse

    app = FastAPI(title="dusk", docs_url=None, redoc_url=None)
    app.state.bridge_queues = set()
    app.state.loop = None

    # Registered through starlette directly: the endpoint takes the raw
    # WebSocket, so no annotation needs resolving against lazily imported
    # names (this module defers all annotation evaluation).
    async def ws_endpoint(websocket: WebSocket) -> None:
        await websocket.accept()
        app.state.loop = asyncio.get_running_loop()
        state = ClientState(config)
        await websocket.send_json(state.hello_message())
        queue: asyncio.Queue = asyncio.Queue()
        app.state.bridge_queues.add(queue)
        recv_task: asyncio.Task | None = None
        queue_task: asyncio.Task | None = None
        try:
            while True:
                if recv_task is None:
                    recv_task = asyncio.ensure_future(websocket.receive_text())
                if queue_task is None:
                    queue_task = asyncio.ensure_future(queue.get())
                done, _ = await asyncio.wait(
                    {recv_task, queue_task}, return_when=asyncio.FIRST_COMPLETED)
                if recv_task in done:
                    raw = recv_task.result()
                    recv_task = None
                    for out in handle_client_text(state, raw):
                        await websocket.send_json(out)
                if queue_task in done:
                    injected = queue_task.result()
                    queue_task = None
                    for out in state.handle(injected):
                        await websocket.send_json(out)
        except WebSocketDisconnect:
            pass
        finally:
            app.state.bridge_queues.discard(queue)
            for task in (recv_task, queue_task):
                if task is not None:
                    task.cancel()

    app.router.add_websocket_route("/ws", ws_endpoint)

    index = _find_index(static_dir)
    if index is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=index.parent, html=True), name="ui")
    else:
        @app.get("/")
        async def placeholder() -> HTMLResponse:
            return HTMLResponse(
                "<h1>dusk service</h1>"
                "<p>No UI build found. Build the frontend (npm run build in frontend/) "
                "and restart, or connect a WebSocket client to <code>/ws</code>.</p>")

    return app


def _find_index(static_dir: str | Path | None) -> Path | None:
    if static_dir is None:
        return None
    index = Path(static_dir) / "index.html"
    return index if index.is_file() else None


def inject_client_message(app, msg: dict) -> None:
    """Queue a synthetic client message into every live connection.

    Called from the TUIO bridge thread; safe because the queues are only
    consumed on the event loop.
    """
    loop = app.state.loop
    if loop is None:
        return
    for queue in list(app.state.bridge_queues):
        loop.call_soon_threadsafe(queue.put_nowait, msg)


def bridge_touch_event(event, pad) -> dict:
    """Convert an ingested touch event into the equivalent client message."""
    from .tuio import TouchEventKind

    kind = {
        TouchEventKind.DOWN: "touch_down",
        TouchEventKind.MOVE: "touch_move",
        TouchEventKind.UP: "touch_up",
    }[event.kind]
    s = event.sample
    return {
        "kind": kind,
        "pointer": 100_000 + event.pointer_id,  # keep clear of browser pointer ids
        "x": s.x / pad.width,
        "y": s.y / pad.height,
        "t": s.t,
    }


def start_tuio_bridge(app, config: ServiceConfig, port: int) -> threading.Thread:
    """Listen for TUIO on a UDP port and mirror it into live connections."""
    from .tuio import listen_udp

    pad = config.profile.pad

    def on_event(ev) -> None:
        inject_client_message(app, bridge_touch_event(ev, pad))

    thread = threading.Thread(
        target=listen_udp,
        kwargs={"port": port, "pad": pad, "on_event": on_event},
        name="tuio-bridge",
        daemon=True,
    )
    thread.start()
    return thread
