"""Deterministic log replay: gestures in, per-phrase performance out.

Replaying a session log through a fresh Session is the single source of
truth for offline analysis and for the live service's end-of-phrase
metrics; both call the same routines here, so their numbers agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .calibration import CalibrationProfile
from .decoder import EventKind, KeyEvent, Session
from .layout import Layout
from .lexicon import Lexicon
from .metrics import (
    GestureTiming,
    StreamCounts,
    TimingBreakdown,
    aggregate_wpm,
    classify_stream,
    error_rates,
    timing_breakdown,
    wpm,
)
from .sessionlog import GestureLogRecord, LogEntry, PhraseMarker


class ReplayError(ValueError):
    pass


def input_stream_from_events(events: list[KeyEvent]) -> str:
    """The character/backspace stream a key-event sequence is equivalent to.

    Autocorrections and accepted suggestions expand into the backspaces and
    characters that would have produced the same text by hand, so the
    stream always replays to the session's literal buffer content.
    """
    out: list[str] = []
    for e in events:
        kind = e.kind
        if kind is EventKind.CHAR:
            out.append(e.payload["char"])
        elif kind is EventKind.SPACE:
            out.append(" ")
        elif kind is EventKind.BACKSPACE:
            out.append("\b")
        elif kind is EventKind.AUTOCORRECT_APPLIED:
            out.extend("\b" * len(e.payload["original"]))
            out.extend(e.payload["replacement"])
        elif kind is EventKind.AUTOCORRECT_REVERTED:
            out.extend("\b" * (len(e.payload["replacement"]) + 1))
            out.extend(e.payload["original"] + " ")
        elif kind is EventKind.SUGGEST_ACCEPTED:
            out.extend("\b" * len(e.payload["replaced"]))
            out.extend(e.payload["word"] + " ")
        # ENTER commits what the chars already spell; CURSOR_FEEDBACK is not input
    return "".join(out)


@dataclass
class PhraseResult:
    presented: str
    transcribed: str
    seconds: float
    wpm: float
    counts: StreamCounts
    rates: dict[str, float]
    gesture_count: int


@dataclass
class ReplayStats:
    words_committed: int = 0
    autocorrects_applied: int = 0
    autocorrects_reverted: int = 0
    suggestions_accepted: int = 0

    def merge_events(self, events: list[KeyEvent]) -> None:
        for e in events:
            if e.kind in (EventKind.SPACE, EventKind.SUGGEST_ACCEPTED):
                self.words_committed += 1
            if e.kind is EventKind.AUTOCORRECT_APPLIED:
                self.autocorrects_applied += 1
            elif e.kind is EventKind.AUTOCORRECT_REVERTED:
                self.autocorrects_reverted += 1
            elif e.kind is EventKind.SUGGEST_ACCEPTED:
                self.suggestions_accepted += 1


@dataclass
class ReplayReport:
    phrases: list[PhraseResult] = field(default_factory=list)
    stats: ReplayStats = field(default_factory=ReplayStats)
    timing: TimingBreakdown = field(default_factory=TimingBreakdown)
    committed_text: str = ""

    @property
    def mean_wpm(self) -> float | None:
        if not self.phrases:
            return None
        return sum(p.wpm for p in self.phrases) / len(self.phrases)

    @property
    def aggregate_wpm(self) -> float | None:
        chars = sum(len(p.transcribed) for p in self.phrases)
        seconds = sum(p.seconds for p in self.phrases)
        if seconds <= 0:
            return None
        return aggregate_wpm(chars, seconds)

    def to_dict(self) -> dict:
        return {
            "phrases": [
                {
                    "presented": p.presented,
                    "transcribed": p.transcribed,
                    "seconds": p.seconds,
                    "wpm": p.wpm,
                    "counts": {
                        "correct": p.counts.correct,
                        "incorrect_not_fixed": p.counts.incorrect_not_fixed,
                        "incorrect_fixed": p.counts.incorrect_fixed,
                        "fixes": p.counts.fixes,
                    },
                    "rates": p.rates,
                    "gestures": p.gesture_count,
                }
                for p in self.phrases
            ],
            "mean_wpm": self.mean_wpm,
            "aggregate_wpm": self.aggregate_wpm,
            "words_committed": self.stats.words_committed,
            "autocorrects_applied": self.stats.autocorrects_applied,
            "autocorrects_reverted": self.stats.autocorrects_reverted,
            "suggestions_accepted": self.stats.suggestions_accepted,
            "mean_reaction_alternating_ms": self.timing.mean_reaction_alternating,
            "mean_reaction_same_hand_ms": self.timing.mean_reaction_same_hand,
            "mean_stroke_time_ms": self.timing.mean_stroke_time,
            "committed_text": self.committed_text,
        }


def phrase_metrics(presented: str, transcribed_raw: str, input_stream: str,
                   seconds: float, gesture_count: int) -> PhraseResult:
    """Score one phrase. A single trailing space (the commit of the final
    word) is not part of the transcription and is dropped from both the
    text and the stream before classification."""
    transcribed = transcribed_raw
    stream = input_stream
    if transcribed.endswith(" "):
        transcribed = transcribed[:-1]
        if not stream.endswith(" "):
            raise ReplayError("input stream out of sync: no trailing space to drop")
        stream = stream[:-1]
    counts = classify_stream(presented, transcribed, stream)
    seconds = max(seconds, 1e-6)
    return PhraseResult(
        presented=presented,
        transcribed=transcribed,
        seconds=seconds,
        wpm=wpm(transcribed, seconds) if transcribed else 0.0,
        counts=counts,
        rates=error_rates(counts) if counts.total else {},
        gesture_count=gesture_count,
    )


def replay_log(entries: list[LogEntry], profile: CalibrationProfile, layout: Layout,
               lexicon: Lexicon | None = None, predictions: bool | None = None
               ) -> ReplayReport:
    """Feed a session log through a fresh decoder session and score it.

    Phrase markers open a new phrase; the gestures up to the next marker
    (or end of log) transcribe it. Gestures before any marker decode but
    are not scored against a phrase.
    """
    session = Session(profile=profile, layout=layout, lexicon=lexicon,
                      predictions_enabled=predictions)
    report = ReplayReport()
    timings: list[GestureTiming] = []

    presented: str | None = None
    phrase_events: list[KeyEvent] = []
    phrase_committed_start = ""
    phrase_pending_prefix = ""
    phrase_first_down: float | None = None
    phrase_last_up: float | None = None
    phrase_gestures = 0

    def close_phrase() -> None:
        nonlocal presented, phrase_events, phrase_committed_start
        nonlocal phrase_first_down, phrase_last_up, phrase_gestures
        if presented is None:
            return
        delta = session.committed_text[len(phrase_committed_start):] + session.current_word
        seconds = 0.0
        if phrase_first_down is not None and phrase_last_up is not None:
            seconds = (phrase_last_up - phrase_first_down) / 1000.0
        # A word left pending when the phrase opened joins the stream as a
        # prefix; it ends up inside the phrase's text, so the stream must
        # carry it for the replay check to balance.
        stream = phrase_pending_prefix + input_stream_from_events(phrase_events)
        report.phrases.append(phrase_metrics(
            presented, delta, stream, seconds, phrase_gestures))
        presented = None
        phrase_events = []
        phrase_first_down = None
        phrase_last_up = None
        phrase_gestures = 0

    for entry in entries:
        if isinstance(entry, PhraseMarker):
            close_phrase()
            presented = entry.presented
            phrase_committed_start = session.committed_text
            phrase_pending_prefix = session.current_word
            continue
        assert isinstance(entry, GestureLogRecord)
        g = entry.gesture
        events = session.feed(g)
        report.stats.merge_events(events)
        timings.append(GestureTiming(
            down_t=g.down_t, up_t=g.up_t,
            thumb=entry.resolved_thumb(session.profile.pad)))
        if presented is not None:
            phrase_events.extend(events)
            phrase_gestures += 1
            if phrase_first_down is None:
                phrase_first_down = g.down_t
            phrase_last_up = g.up_t
    close_phrase()
    report.timing = timing_breakdown(timings)
    report.committed_text = session.committed_text + session.current_word
    return report
