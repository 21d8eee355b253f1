"""Synthetic gesture generation and end-to-end decode simulation.

The synthesizer inverts a calibration profile: for each intended character
it samples a stroke endpoint from that key's Gaussian (scaled by a noise
factor) and emits a plausible gesture reaching it. Function keys become
taps at their grid-cell centers. This drives the noise-robustness sweep,
OOV checks and the replayable demo fixtures without any human data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calibration import CalibrationProfile, GestureLogRecord
from .core import Gesture, PadSpec, Thumb, TouchSample
from .decoder import EventKind, Session
from .layout import CENTER_CELL, CellId, Layout
from .sessionlog import LogEntry, PhraseMarker

DETOUR_MM = 8.0  # perpendicular kink so even zero-displacement strokes exceed the tap threshold

TAP_DURATION_MS = 80.0
STROKE_DURATION_MS = 120.0
GAP_MS = 150.0  # idle time between consecutive gestures


class SimulationError(ValueError):
    pass


def cell_center(cell: CellId, pad: PadSpec) -> tuple[float, float]:
    row, col = cell
    return ((col + 0.5) * pad.width / 3.0, (row + 0.5) * pad.height / 3.0)


@dataclass
class StrokeSynthesizer:
    profile: CalibrationProfile
    layout: Layout

    @property
    def pad(self) -> PadSpec:
        return self.profile.pad

    def start_point(self, thumb: Thumb) -> tuple[float, float]:
        # inside the center tap cell, on the thumb's half of the pad
        x = 0.45 if thumb is Thumb.LEFT else 0.55
        return (x * self.pad.width, 0.5 * self.pad.height)

    def _clamp(self, x: float, y: float) -> tuple[float, float]:
        return (min(max(x, 0.0), self.pad.width), min(max(y, 0.0), self.pad.height))

    def tap_at(self, point: tuple[float, float], t0: float, pointer_id: int = 0) -> Gesture:
        x, y = self._clamp(*point)
        return Gesture((TouchSample(x, y, t0), TouchSample(x, y, t0 + TAP_DURATION_MS)),
                       pointer_id=pointer_id)

    def function_tap(self, key: str, t0: float) -> Gesture:
        for cell, mapped in self.layout.tap_map.items():
            if mapped == key:
                return self.tap_at(cell_center(cell, self.pad), t0)
        raise SimulationError(f"no tap cell assigned to {key!r}")

    def stroke_to_endpoint(self, endpoint: tuple[float, float], thumb: Thumb, t0: float) -> Gesture:
        """Stroke from the thumb's rest point with the given displacement (mm).

        A perpendicular detour keeps the path length above the tap threshold
        even when the displacement itself is tiny, without moving the
        endpoint the decoder sees.
        """
        sx, sy = self.start_point(thumb)
        dx, dy = endpoint
        norm = math.hypot(dx, dy)
        if norm < 1e-9:
            px, py = 0.0, -DETOUR_MM
        else:
            px, py = -dy / norm * DETOUR_MM, dx / norm * DETOUR_MM
        mid = self._clamp(sx + dx / 2 + px, sy + dy / 2 + py)
        if mid == (sx, sy):  # clamping collapsed the kink; bend the other way
            mid = self._clamp(sx + dx / 2 - px, sy + dy / 2 - py)
        end = self._clamp(sx + dx, sy + dy)
        return Gesture((
            TouchSample(sx, sy, t0),
            TouchSample(mid[0], mid[1], t0 + STROKE_DURATION_MS / 2),
            TouchSample(end[0], end[1], t0 + STROKE_DURATION_MS),
        ))

    def gesture_for_char(self, char: str, t0: float, noise: float = 0.0,
                         rng: np.random.Generator | None = None) -> Gesture:
        """A gesture that should enter the character: taps for start keys and
        Space/function keys, strokes sampled from the profile otherwise."""
        if char == " ":
            return self.function_tap("space", t0)
        thumb = self.layout.thumb_for(char)
        if char == self.layout.start_key(thumb):
            return self.tap_at(self.start_point(thumb), t0)
        model = self.profile.model_for(char, thumb)
        if model is None:
            raise SimulationError(f"profile has no endpoint model for {char!r}/{thumb.value}")
        mean = model.mean_array()
        if noise > 0.0:
            if rng is None:
                raise SimulationError("noisy synthesis needs an rng")
            chol = np.linalg.cholesky(model.cov_array())
            sample = mean + noise * (chol @ rng.standard_normal(2))
        else:
            sample = mean
        return self.stroke_to_endpoint((float(sample[0]), float(sample[1])), thumb, t0)

    def text_gestures(self, text: str, t0: float = 0.0, noise: float = 0.0,
                      rng: np.random.Generator | None = None,
                      gap_ms: float = GAP_MS) -> list[Gesture]:
        """Gesture sequence for a text of a-z and spaces, in reading order."""
        out = []
        t = t0
        for ch in text:
            g = self.gesture_for_char(ch, t, noise=noise, rng=rng)
            out.append(g)
            t = g.up_t + gap_ms
        return out


def phrase_log(phrases: list[str], synth: StrokeSynthesizer, noise: float = 0.0,
               seed: int = 0, commit: str = "space") -> list[LogEntry]:
    """A replayable session log: each phrase marker followed by its gestures.

    Every gesture carries its intended key and a stimulus time so the same
    log also feeds calibration and timing fits. commit selects what ends
    each phrase-final word: a Space tap or an Enter tap.
    """
    if commit not in ("space", "enter"):
        raise SimulationError(f"unknown commit mode {commit!r}")
    rng = np.random.default_rng(seed)
    entries: list[LogEntry] = []
    t = 1000.0
    for phrase in phrases:
        entries.append(PhraseMarker(presented=phrase))
        keys: list[str] = []
        for ch in phrase:
            if ch == " ":
                keys.append("space")
            else:
                keys.append(ch)
        keys.append("enter" if commit == "enter" else "space")
        for key in keys:
            if key in ("space", "enter"):
                g = synth.function_tap(key, t)
                thumb = Thumb.LEFT if key == "space" else None
            else:
                g = synth.gesture_for_char(key, t, noise=noise, rng=rng)
                thumb = synth.layout.thumb_for(key)
            entries.append(GestureLogRecord(
                gesture=g, target_key=key, thumb=thumb, stimulus_t=t - 300.0))
            t = g.up_t + GAP_MS
    return entries


def decode_accuracy(synth: StrokeSynthesizer, chars: str, noise: float, seed: int) -> float:
    """Fraction of characters decoded to themselves, one gesture per character."""
    rng = np.random.default_rng(seed)
    session = Session(profile=synth.profile, layout=synth.layout,
                      lexicon=None, predictions_enabled=False)
    hits = 0
    total = 0
    t = 0.0
    for ch in chars:
        g = synth.gesture_for_char(ch, t, noise=noise, rng=rng)
        t = g.up_t + GAP_MS
        events = session.feed(g)
        total += 1
        if ch == " ":
            if any(e.kind is EventKind.SPACE for e in events):
                hits += 1
        else:
            decoded = [e.payload["char"] for e in events if e.kind is EventKind.CHAR]
            if decoded == [ch]:
                hits += 1
    return hits / total if total else 0.0


def noise_sweep(synth: StrokeSynthesizer, lambdas: list[float], seeds: list[int],
                chars_per_run: int = 500) -> dict[float, float]:
    """Mean decode accuracy per noise factor, averaged over seeds.

    Characters are drawn uniformly from the letters the profile can
    synthesize; the same seeds draw the same characters for every lambda.
    """
    letters = sorted({k for (k, _t) in synth.profile.models} |
                     {synth.layout.start_left, synth.layout.start_right})
    out: dict[float, float] = {}
    for lam in lambdas:
        accs = []
        for seed in seeds:
            pick = np.random.default_rng(seed + 10_000)
            text = "".join(letters[i] for i in pick.integers(0, len(letters), chars_per_run))
            accs.append(decode_accuracy(synth, text, noise=lam, seed=seed))
        out[lam] = float(np.mean(accs))
    return out
