"""Closed-form two-thumb expert speed model.

Every word is preceded by a Space struck by the left thumb. Selecting a key
with the thumb that made the previous selection costs that key's full
movement time; alternating thumbs overlap preparation with the other
thumb's movement and cost half. Summing over a frequency-weighted corpus
yields a peak-performance WPM prediction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .calibration import TimingTable
from .core import KEY_SPACE, Thumb
from .metrics import aggregate_wpm


class ExpertModelError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusStats:
    total_words: int
    total_chars: int  # letters plus one trailing space per word token
    total_seconds: float
    predicted_wpm: float


def word_time(word: str, timing: TimingTable, thumb_map: dict[str, Thumb]) -> float:
    """Seconds to enter one word plus its trailing space at expert speed.

    The recurrence starts from the left thumb (the space before the word)
    and halves each selection made with the opposite thumb to the previous
    one.
    """
    if not word:
        raise ExpertModelError("empty word")
    total_ms = 0.0
    prev = Thumb.LEFT
    for c in word + "\0":
        key = KEY_SPACE if c == "\0" else c
        try:
            thumb = thumb_map[key]
        except KeyError:
            raise ExpertModelError(f"no thumb assignment for {key!r}") from None
        t_key = timing.get(key, thumb)  # raises when the table lacks the key
        total_ms += t_key if thumb is prev else t_key / 2.0
        prev = thumb
    return total_ms / 1000.0


def corpus_prediction(corpus: Iterable[tuple[str, int]], timing: TimingTable,
                      thumb_map: dict[str, Thumb]) -> CorpusStats:
    """Frequency-weighted corpus totals and the WPM they imply.

    Accumulation follows corpus order so repeated runs reduce in the same
    order and reproduce bit-identical floats.
    """
    total_words = 0
    total_chars = 0
    total_seconds = 0.0
    for word, count in corpus:
        if count < 0:
            raise ExpertModelError(f"negative count for {word!r}")
        t = word_time(word, timing, thumb_map)
        total_words += count
        total_chars += (len(word) + 1) * count
        total_seconds += t * count
    if total_words == 0:
        raise ExpertModelError("empty corpus")
    return CorpusStats(
        total_words=total_words,
        total_chars=total_chars,
        total_seconds=total_seconds,
        predicted_wpm=aggregate_wpm(total_chars, total_seconds),
    )
