"""Gesture-to-text decoding: nearest-key selection, autocorrect, completions.

A Session consumes finished gestures and emits key events. Strokes pick the
letter whose center is nearest the transfer-mapped endpoint; taps dispatch
on the 3x3 grid. With predictions enabled, committing a word on Space
re-ranks in-lexicon alternatives by stroke likelihood times word frequency
and replaces the literal decode when a better candidate exists. A Backspace
immediately after such a replacement reverts it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import product

from .calibration import CalibrationProfile
from .core import Gesture, NormalizedEndpoint, Thumb, normalized_endpoint
from .layout import CENTER_CELL, Layout
from .lexicon import Lexicon
from .recognizer import ContactClass, classify_contact, infer_thumb, tap_cell

LIKELIHOOD_FLOOR = 1e-300  # densities below this clamp so log-space sums stay finite

LETTERS_PER_STROKE = 3  # candidate letters kept per stroke

MAX_ENUMERATED_COMBOS = 3 ** 10  # above this, candidate search walks the trie instead

SUGGESTION_SLOTS = 2


class DecodeError(ValueError):
    pass


class EventKind(Enum):
    CHAR = "char"
    SPACE = "space"
    BACKSPACE = "backspace"
    ENTER = "enter"
    SUGGEST_ACCEPTED = "suggest_accepted"
    AUTOCORRECT_APPLIED = "autocorrect_applied"
    AUTOCORRECT_REVERTED = "autocorrect_reverted"
    CURSOR_FEEDBACK = "cursor"


@dataclass(frozen=True)
class KeyEvent:
    kind: EventKind
    t: float  # ms, when the event took effect
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "t": self.t, **self.payload}


@dataclass
class Session:
    """Decoder state for one typing session.

    feed() is the only mutator; identical gesture sequences always produce
    identical committed text and event streams.
    """

    profile: CalibrationProfile
    layout: Layout
    lexicon: Lexicon | None = None
    predictions_enabled: bool | None = None  # None: on iff a lexicon was given
    committed_text: str = ""
    current_word: str = ""
    current_strokes: list[tuple[NormalizedEndpoint, Thumb]] = field(default_factory=list)
    suggestions: list[str] = field(default_factory=list)
    last_autocorrect: tuple[str, str] | None = None
    _last_end_t: float = float("-inf")

    def __post_init__(self) -> None:
        if self.predictions_enabled is None:
            self.predictions_enabled = self.lexicon is not None
        if self.predictions_enabled and self.lexicon is None:
            raise DecodeError("predictions need a lexicon")

    @property
    def text(self) -> str:
        return self.committed_text + self.current_word

    # --- per-stroke letter scoring ---

    def select_key(self, g: Gesture) -> str:
        """Nearest letter to the transfer-mapped stroke endpoint. No language
        model is involved; ties break alphabetically."""
        thumb = infer_thumb(g, self.profile.pad)
        point = self.profile.transfer[thumb].apply(normalized_endpoint(g))
        return self.layout.nearest_letter(point)

    def stroke_likelihoods(self, e: NormalizedEndpoint, thumb: Thumb) -> dict[str, float]:
        """Gaussian density of the endpoint under every letter model for the
        thumb. Letters without a model for this thumb are absent; if the
        profile has none at all for it, the other thumb's models stand in."""
        models = [m for (k, t), m in self.profile.models.items() if t is thumb]
        if not models:
            models = [m for (k, t), m in self.profile.models.items() if t is thumb.other()]
        return {m.key: m.density(e) for m in sorted(models, key=lambda m: m.key)}

    def _letter_sets(self, strokes: list[tuple[NormalizedEndpoint, Thumb]]) -> list[list[str]]:
        """Top candidate letters per stroke, most likely first."""
        sets: list[list[str]] = []
        for e, thumb in strokes:
            lik = self.stroke_likelihoods(e, thumb)
            ranked = sorted(lik.items(), key=lambda kv: (-kv[1], kv[0]))
            sets.append([k for k, _ in ranked[:LETTERS_PER_STROKE]])
        return sets

    def _log_likelihood(self, word: str, strokes: list[tuple[NormalizedEndpoint, Thumb]]) -> float:
        """Sum of log densities of each stroke under the matching letter's model.

        Scores only the first len(strokes) letters, so completion candidates
        longer than the input are scored on their typed prefix.
        """
        total = 0.0
        for c, (e, thumb) in zip(word, strokes):
            lik = self.stroke_likelihoods(e, thumb)
            total += math.log(max(lik.get(c, 0.0), LIKELIHOOD_FLOOR))
        return total

    # --- candidate generation and ranking ---

    def candidate_combinations(self) -> list[str]:
        """Every combination of the per-stroke candidate letters, unfiltered."""
        sets = self._letter_sets(self.current_strokes)
        if not sets:
            return []
        n_combos = math.prod(len(s) for s in sets)
        if n_combos > MAX_ENUMERATED_COMBOS:
            raise DecodeError(f"{n_combos} combinations is too many to enumerate")
        return ["".join(c) for c in product(*sets)]

    def candidate_words(self) -> list[str]:
        """In-lexicon words among all candidate-letter combinations, alphabetical.

        Long inputs skip the explicit enumeration and walk the lexicon trie
        constrained to the same letter sets; the result is identical.
        """
        if self.lexicon is None:
            raise DecodeError("candidate search needs a lexicon")
        sets = self._letter_sets(self.current_strokes)
        if not sets:
            return []
        n_combos = math.prod(len(s) for s in sets)
        if n_combos > MAX_ENUMERATED_COMBOS:
            return self.lexicon.constrained_words([set(s) for s in sets])
        return sorted(w for w in ("".join(c) for c in product(*sets)) if w in self.lexicon)

    def word_posterior(self, candidates: list[str]) -> list[tuple[str, float]]:
        """Candidates ranked by stroke likelihood times frequency, with the
        scores normalized to probabilities over the candidate set."""
        if self.lexicon is None:
            raise DecodeError("ranking needs a lexicon")
        if not candidates:
            return []
        total_count = sum(self.lexicon.count(w) for w in candidates)
        scores = {
            w: self._log_likelihood(w, self.current_strokes)
            + math.log(self.lexicon.count(w) / total_count)
            for w in candidates
        }
        peak = max(scores.values())
        weights = {w: math.exp(s - peak) for w, s in scores.items()}
        z = sum(weights.values())
        ranked = sorted(((w, weights[w] / z) for w in candidates), key=lambda kv: (-kv[1], kv[0]))
        return ranked

    def autocorrect_on_space(self) -> str | None:
        """What Space would commit in place of the literal decode, or None
        when no in-lexicon candidate exists (the literal word then stands)."""
        if not self.predictions_enabled or not self.current_word:
            return None
        cands = self.candidate_words()
        if not cands:
            return None
        return self.word_posterior(cands)[0][0]

    def completions(self, k: int = SUGGESTION_SLOTS) -> list[str]:
        """Up to k words the input so far may be heading for, best first.

        Candidates are lexicon words prefixed by any candidate-letter
        combination; they rank by prefix stroke likelihood times frequency
        normalized over that candidate pool.
        """
        if self.lexicon is None:
            raise DecodeError("completions need a lexicon")
        sets = self._letter_sets(self.current_strokes)
        if not sets:
            return []
        pool = self.lexicon.constrained_completions([set(s) for s in sets])
        if not pool:
            return []
        total_count = sum(self.lexicon.count(w) for w in pool)
        scored = sorted(
            (
                (-(self._log_likelihood(w, self.current_strokes)
                   + math.log(self.lexicon.count(w) / total_count)), w)
                for w in pool
            ),
        )
        return [w for _, w in scored[:k]]

    # --- event production ---

    def feed(self, g: Gesture) -> list[KeyEvent]:
        """Decode one finished gesture and apply its effect."""
        if g.up_t < self._last_end_t:
            raise DecodeError("gesture ends before an already decoded gesture")
        events: list[KeyEvent] = []
        pending_revert = self.last_autocorrect
        self.last_autocorrect = None
        thumb = infer_thumb(g, self.profile.pad)
        if classify_contact(g, self.profile.tap_threshold_mm) is ContactClass.TAP:
            self._feed_tap(g, thumb, pending_revert, events)
        else:
            self._feed_stroke(g, thumb, events)
        self._last_end_t = g.up_t
        self._refresh_suggestions()
        return events

    def _feed_tap(self, g: Gesture, thumb: Thumb, pending_revert: tuple[str, str] | None,
                  events: list[KeyEvent]) -> None:
        first = g.samples[0]
        cell = tap_cell(first.x, first.y, self.profile.pad)
        t = g.up_t
        if cell == CENTER_CELL:
            self._append_char(self.layout.start_key(thumb), normalized_endpoint(g), thumb, t, events)
            return
        key = self.layout.tap_map.get(cell)
        if key is None:
            return  # unassigned cell: swallowed
        if key == "space":
            self._commit_word(t, events, autocorrect=True)
        elif key == "backspace":
            self._backspace(t, pending_revert, events)
        elif key == "enter":
            self.committed_text += self.current_word
            self.current_word = ""
            self.current_strokes = []
            events.append(KeyEvent(EventKind.ENTER, t))
        elif key in ("suggest1", "suggest2"):
            slot = 0 if key == "suggest1" else 1
            if slot < len(self.suggestions):
                word = self.suggestions[slot]
                replaced = self.current_word
                self.committed_text += word + " "
                self.current_word = ""
                self.current_strokes = []
                events.append(KeyEvent(EventKind.SUGGEST_ACCEPTED, t,
                                       {"word": word, "slot": slot, "replaced": replaced}))
            # empty slot: no effect, no event
        else:
            raise DecodeError(f"tap map points at non-function key {key!r}")

    def _feed_stroke(self, g: Gesture, thumb: Thumb, events: list[KeyEvent]) -> None:
        tf = self.profile.transfer[thumb]
        origin = g.samples[0]
        for s in g.samples:
            pos = tf.apply(NormalizedEndpoint(s.x - origin.x, s.y - origin.y))
            events.append(KeyEvent(EventKind.CURSOR_FEEDBACK, s.t,
                                   {"thumb": thumb.value, "x": pos[0], "y": pos[1]}))
        letter = self.select_key(g)
        self._append_char(letter, normalized_endpoint(g), thumb, g.up_t, events)

    def _append_char(self, letter: str, e: NormalizedEndpoint, thumb: Thumb, t: float,
                     events: list[KeyEvent]) -> None:
        self.current_word += letter
        self.current_strokes.append((e, thumb))
        events.append(KeyEvent(EventKind.CHAR, t, {"char": letter, "thumb": thumb.value}))

    def _commit_word(self, t: float, events: list[KeyEvent], autocorrect: bool) -> None:
        literal = self.current_word
        committed = literal
        if literal and autocorrect and self.predictions_enabled:
            cands = self.candidate_words()
            if cands:
                top = self.word_posterior(cands)[0][0]
                committed = top
                if top != literal:
                    self.last_autocorrect = (literal, top)
                    events.append(KeyEvent(EventKind.AUTOCORRECT_APPLIED, t,
                                           {"original": literal, "replacement": top}))
        self.committed_text += committed + " "
        self.current_word = ""
        self.current_strokes = []
        events.append(KeyEvent(EventKind.SPACE, t))

    def _backspace(self, t: float, pending_revert: tuple[str, str] | None,
                   events: list[KeyEvent]) -> None:
        if pending_revert is not None:
            original, replacement = pending_revert
            suffix = replacement + " "
            if not self.committed_text.endswith(suffix):
                raise DecodeError("revert state out of sync with committed text")
            self.committed_text = self.committed_text[: -len(suffix)] + original + " "
            events.append(KeyEvent(EventKind.AUTOCORRECT_REVERTED, t,
                                   {"original": original, "replacement": replacement}))
            return
        if self.current_word:
            deleted = self.current_word[-1]
            self.current_word = self.current_word[:-1]
            self.current_strokes.pop()
        elif self.committed_text:
            deleted = self.committed_text[-1]
            self.committed_text = self.committed_text[:-1]
        else:
            deleted = None  # empty buffer: the event records a no-op
        events.append(KeyEvent(EventKind.BACKSPACE, t, {"deleted": deleted}))

    def _refresh_suggestions(self) -> None:
        if self.predictions_enabled and self.current_word:
            self.suggestions = self.completions(SUGGESTION_SLOTS)
        else:
            self.suggestions = []
