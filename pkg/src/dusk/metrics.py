"""Text-entry performance metrics.

Words-per-minute uses the standard 5-characters-per-word convention. Error
rates follow the four-class input-stream taxonomy: Correct, Incorrect Not
Fixed, Incorrect Fixed, and Fixes, where INF is the edit distance between
presented and transcribed strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Thumb


class MetricsError(ValueError):
    pass


def wpm(transcribed: str, seconds: float) -> float:
    """Per-phrase words per minute: ((|T| - 1) / seconds) * 60 / 5.

    The first character is discounted because timing starts at the first
    keystroke, so that keystroke's own entry time is unobserved.
    """
    if seconds <= 0:
        raise MetricsError("phrase duration must be positive")
    return (len(transcribed) - 1) / seconds * 60.0 / 5.0


def aggregate_wpm(total_chars: float, total_seconds: float) -> float:
    """Corpus-level words per minute: (chars / 5) / minutes, no discount."""
    if total_seconds <= 0:
        raise MetricsError("total duration must be positive")
    return (total_chars / 5.0) / (total_seconds / 60.0)


def levenshtein(a: str, b: str) -> int:
    """Minimum edits (insert, delete, substitute) turning a into b."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[len(b)]


@dataclass
class StreamCounts:
    correct: int = 0  # C
    incorrect_not_fixed: int = 0  # INF
    incorrect_fixed: int = 0  # IF
    fixes: int = 0  # F

    @property
    def total(self) -> int:
        return self.correct + self.incorrect_not_fixed + self.incorrect_fixed


def classify_stream(presented: str, transcribed: str, input_stream: str) -> StreamCounts:
    """Classify an input stream against its outcome.

    input_stream holds every entered character in order with '\\b' for each
    Backspace. Characters erased by a Backspace count as Incorrect Fixed and
    each Backspace as a Fix; INF is the edit distance from presented to
    transcribed, and C fills in the rest. The stream replayed must
    reproduce the transcribed string.
    """
    buf: list[str] = []
    fixes = 0
    erased = 0
    for ch in input_stream:
        if ch == "\b":
            fixes += 1
            if buf:
                buf.pop()
                erased += 1
        else:
            buf.append(ch)
    if "".join(buf) != transcribed:
        raise MetricsError(
            f"input stream replays to {''.join(buf)!r}, not the transcribed {transcribed!r}")
    inf = levenshtein(presented, transcribed)
    correct = max(len(presented), len(transcribed)) - inf
    return StreamCounts(correct=correct, incorrect_not_fixed=inf,
                        incorrect_fixed=erased, fixes=fixes)


def error_rates(counts: StreamCounts) -> dict[str, float]:
    """Corrected, uncorrected and total error rates over C + INF + IF."""
    denom = counts.total
    if denom == 0:
        raise MetricsError("empty stream has no error rate")
    return {
        "corrected": counts.incorrect_fixed / denom,
        "uncorrected": counts.incorrect_not_fixed / denom,
        "total": (counts.incorrect_fixed + counts.incorrect_not_fixed) / denom,
    }


@dataclass(frozen=True)
class GestureTiming:
    """Timing summary of one decoded gesture."""

    down_t: float
    up_t: float
    thumb: Thumb


@dataclass
class TimingBreakdown:
    """Reaction and movement time, split by whether the hand alternated.

    Reaction time i is down_i - up_{i-1}; the first gesture has none.
    Means are None when a partition is empty.
    """

    reaction_alternating: list[float] = field(default_factory=list)
    reaction_same_hand: list[float] = field(default_factory=list)
    stroke_times: list[float] = field(default_factory=list)

    @property
    def mean_reaction_alternating(self) -> float | None:
        return _mean(self.reaction_alternating)

    @property
    def mean_reaction_same_hand(self) -> float | None:
        return _mean(self.reaction_same_hand)

    @property
    def mean_stroke_time(self) -> float | None:
        return _mean(self.stroke_times)


def _mean(xs: list[float]) -> float | None:
    return sum(xs) / len(xs) if xs else None


def timing_breakdown(gestures: list[GestureTiming]) -> TimingBreakdown:
    out = TimingBreakdown()
    for i, g in enumerate(gestures):
        out.stroke_times.append(g.up_t - g.down_t)
        if i == 0:
            continue
        prev = gestures[i - 1]
        reaction = g.down_t - prev.up_t
        if g.thumb is prev.thumb:
            out.reaction_same_hand.append(reaction)
        else:
            out.reaction_alternating.append(reaction)
    return out
