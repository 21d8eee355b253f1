from __future__ import annotations

import pytest

from dusk.core import NormalizedEndpoint, Thumb, gesture
from dusk.decoder import DecodeError, EventKind, KeyEvent, Session

from conftest import make_lexicon


def events_of(kind, events):
    return [e for e in events if e.kind is kind]


def chars_of(events):
    return [e.payload["char"] for e in events if e.kind is EventKind.CHAR]


@pytest.fixture()
def session(profile, layout):
    return Session(profile=profile, layout=layout)


@pytest.fixture()
def predict_session(profile, layout, tiny_lexicon):
    return Session(profile=profile, layout=layout, lexicon=tiny_lexicon)


def feed_text(session, synth, text, t0=0.0):
    events = []
    t = t0
    for ch in text:
        g = synth.gesture_for_char(ch, t)
        events += session.feed(g)
        t = g.up_t + 150.0
    return events


class TestConstruction:
    def test_predictions_default_off_without_lexicon(self, session):
        assert session.predictions_enabled is False

    def test_predictions_default_on_with_lexicon(self, predict_session):
        assert predict_session.predictions_enabled is True

    def test_predictions_without_lexicon_rejected(self, profile, layout):
        with pytest.raises(DecodeError):
            Session(profile=profile, layout=layout, lexicon=None, predictions_enabled=True)


class TestSelectKey:
    def test_noiseless_strokes_decode_exactly(self, session, synth, layout):
        for ch in "qwertyuiopasdfghjklzxcvbnm":
            thumb = layout.thumb_for(ch)
            if ch == layout.start_key(thumb):
                continue  # start keys are taps, not strokes
            g = synth.gesture_for_char(ch, 0.0)
            assert session.select_key(g) == ch

    def test_tie_breaks_alphabetically(self, session):
        # Left-thumb endpoint of exactly (9, 0) mm maps midway between f and g.
        g = gesture([(60.0, 30.0), (64.5, 38.0), (69.0, 30.0)])
        assert session.select_key(g) == "f"


class TestStrokeLikelihoods:
    def test_restricted_to_thumb_side(self, session, layout):
        lik = session.stroke_likelihoods(NormalizedEndpoint(0, 0), Thumb.LEFT)
        assert set(lik) == set(layout.side_letters(Thumb.LEFT))

    def test_peak_at_target_key(self, session, profile):
        m = profile.model_for("w", Thumb.LEFT)
        lik = session.stroke_likelihoods(NormalizedEndpoint(*m.mean), Thumb.LEFT)
        assert max(lik, key=lik.get) == "w"

    def test_other_thumb_fallback(self, layout, profile):
        one_sided = type(profile)(
            pad=profile.pad,
            models={k: m for k, m in profile.models.items() if k[1] is Thumb.LEFT},
            transfer=profile.transfer,
        )
        s = Session(profile=one_sided, layout=layout)
        lik = s.stroke_likelihoods(NormalizedEndpoint(0, 0), Thumb.RIGHT)
        assert set(lik) == set(layout.side_letters(Thumb.LEFT))


class TestCandidates:
    def test_letter_sets_rank_by_density(self, predict_session):
        # Exact "t" endpoint for the left thumb: t first, then r, then f.
        predict_session.current_strokes = [(NormalizedEndpoint(9.0, -6.0), Thumb.LEFT)]
        sets = predict_session._letter_sets(predict_session.current_strokes)
        assert sets == [["t", "r", "f"]]

    def test_candidate_combinations(self, predict_session):
        predict_session.current_strokes = [
            (NormalizedEndpoint(9.0, -6.0), Thumb.LEFT),
            (NormalizedEndpoint(-12.0, 0.0), Thumb.RIGHT),
        ]
        combos = predict_session.candidate_combinations()
        assert len(combos) == 9
        assert "th" in combos

    def test_combination_cap(self, predict_session):
        predict_session.current_strokes = [(NormalizedEndpoint(9.0, -6.0), Thumb.LEFT)] * 11
        with pytest.raises(DecodeError, match="too many"):
            predict_session.candidate_combinations()

    def test_candidate_words_filters_to_lexicon(self, predict_session):
        predict_session.current_strokes = [
            (NormalizedEndpoint(9.0, -6.0), Thumb.LEFT),   # t
            (NormalizedEndpoint(-12.0, 0.0), Thumb.RIGHT),  # h
            (NormalizedEndpoint(-9.0, -6.0), Thumb.LEFT),   # w; candidates {w, e, q}
        ]
        assert predict_session.candidate_words() == ["the"]

    def test_trie_path_matches_enumeration(self, predict_session, monkeypatch):
        predict_session.current_strokes = [
            (NormalizedEndpoint(9.0, -6.0), Thumb.LEFT),
            (NormalizedEndpoint(-12.0, 0.0), Thumb.RIGHT),
            (NormalizedEndpoint(-9.0, -6.0), Thumb.LEFT),
        ]
        enumerated = predict_session.candidate_words()
        monkeypatch.setattr("dusk.decoder.MAX_ENUMERATED_COMBOS", 1)
        assert predict_session.candidate_words() == enumerated

    def test_needs_lexicon(self, session):
        session.current_strokes = [(NormalizedEndpoint(9.0, -6.0), Thumb.LEFT)]
        with pytest.raises(DecodeError):
            session.candidate_words()


class TestPosterior:
    def test_equal_likelihood_ranks_by_frequency(self, profile, layout):
        # Endpoint (0, -6) for the right thumb is equidistant from the i and o
        # means, so the posterior ratio equals the count ratio 300:100.
        lex = make_lexicon({"i": 300, "o": 100})
        s = Session(profile=profile, layout=layout, lexicon=lex)
        s.current_strokes = [(NormalizedEndpoint(0.0, -6.0), Thumb.RIGHT)]
        ranked = s.word_posterior(["i", "o"])
        assert [w for w, _ in ranked] == ["i", "o"]
        assert ranked[0][1] == pytest.approx(0.75)
        assert ranked[1][1] == pytest.approx(0.25)

    def test_probabilities_sum_to_one(self, predict_session):
        predict_session.current_strokes = [
            (NormalizedEndpoint(9.0, -6.0), Thumb.LEFT),
            (NormalizedEndpoint(-12.0, 0.0), Thumb.RIGHT),
            (NormalizedEndpoint(-3.0, -6.0), Thumb.LEFT),  # e
        ]
        ranked = predict_session.word_posterior(["the", "thy"])
        assert sum(p for _, p in ranked) == pytest.approx(1.0)
        # The exact "the" strokes overwhelm the rare, off-target "thy".
        assert ranked[0][0] == "the"
        assert ranked[0][1] > 0.99

    def test_empty_candidates(self, predict_session):
        assert predict_session.word_posterior([]) == []


class TestTypingFlow:
    def test_type_word_and_space(self, predict_session, synth):
        events = feed_text(predict_session, synth, "the ")
        assert chars_of(events) == ["t", "h", "e"]
        assert len(events_of(EventKind.SPACE, events)) == 1
        assert predict_session.committed_text == "the "
        assert predict_session.current_word == ""

    def test_autocorrect_fixes_near_miss(self, predict_session, synth):
        # Exact t and h, then a stroke landing dead on w. "thw" is not a
        # word; "the" is the only in-lexicon candidate and replaces it.
        for ch in "th":
            predict_session.feed(synth.gesture_for_char(ch, 0.0 if ch == "t" else 300.0))
        predict_session.feed(synth.stroke_to_endpoint((-9.0, -6.0), Thumb.LEFT, 600.0))
        assert predict_session.current_word == "thw"
        events = predict_session.feed(synth.function_tap("space", 900.0))
        applied = events_of(EventKind.AUTOCORRECT_APPLIED, events)
        assert len(applied) == 1
        assert applied[0].payload == {"original": "thw", "replacement": "the"}
        assert predict_session.committed_text == "the "

    def test_autocorrect_skips_exact_word(self, predict_session, synth):
        feed_text(predict_session, synth, "the")
        events = predict_session.feed(synth.function_tap("space", 2000.0))
        assert events_of(EventKind.AUTOCORRECT_APPLIED, events) == []
        assert predict_session.committed_text == "the "

    def test_oov_literal_stands(self, predict_session, synth):
        # No candidate-letter combination is in the lexicon: literal commit.
        feed_text(predict_session, synth, "xq")
        events = predict_session.feed(synth.function_tap("space", 2000.0))
        assert events_of(EventKind.AUTOCORRECT_APPLIED, events) == []
        assert predict_session.committed_text == "xq "

    def test_autocorrect_disabled_without_predictions(self, session, synth):
        for ch in "th":
            session.feed(synth.gesture_for_char(ch, 0.0 if ch == "t" else 300.0))
        session.feed(synth.stroke_to_endpoint((-9.0, -6.0), Thumb.LEFT, 600.0))
        session.feed(synth.function_tap("space", 900.0))
        assert session.committed_text == "thw "

    def test_deterministic_replay(self, profile, layout, tiny_lexicon, synth):
        gestures = [synth.gesture_for_char(ch, 300.0 * i) for i, ch in enumerate("the dog ")]
        a = Session(profile=profile, layout=layout, lexicon=tiny_lexicon)
        b = Session(profile=profile, layout=layout, lexicon=tiny_lexicon)
        ev_a = [e for g in gestures for e in a.feed(g)]
        ev_b = [e for g in gestures for e in b.feed(g)]
        assert a.committed_text == b.committed_text == "the dog "
        assert ev_a == ev_b


class TestRevert:
    def prime_autocorrect(self, s, synth):
        for i, ch in enumerate("th"):
            s.feed(synth.gesture_for_char(ch, 300.0 * i))
        s.feed(synth.stroke_to_endpoint((-9.0, -6.0), Thumb.LEFT, 600.0))
        s.feed(synth.function_tap("space", 900.0))
        assert s.committed_text == "the "

    def test_backspace_reverts_autocorrect(self, predict_session, synth):
        self.prime_autocorrect(predict_session, synth)
        events = predict_session.feed(synth.function_tap("backspace", 1200.0))
        reverted = events_of(EventKind.AUTOCORRECT_REVERTED, events)
        assert len(reverted) == 1
        assert reverted[0].payload == {"original": "thw", "replacement": "the"}
        assert predict_session.committed_text == "thw "
        assert events_of(EventKind.BACKSPACE, events) == []

    def test_revert_window_is_one_gesture(self, predict_session, synth):
        self.prime_autocorrect(predict_session, synth)
        predict_session.feed(synth.gesture_for_char("o", 1200.0))
        events = predict_session.feed(synth.function_tap("backspace", 1500.0))
        # The intervening stroke closed the revert window: plain backspace.
        assert events_of(EventKind.AUTOCORRECT_REVERTED, events) == []
        assert predict_session.committed_text == "the "
        assert predict_session.current_word == ""

    def test_second_backspace_is_plain(self, predict_session, synth):
        self.prime_autocorrect(predict_session, synth)
        predict_session.feed(synth.function_tap("backspace", 1200.0))
        events = predict_session.feed(synth.function_tap("backspace", 1500.0))
        assert events_of(EventKind.AUTOCORRECT_REVERTED, events) == []
        assert predict_session.committed_text == "thw"


class TestBackspace:
    def test_removes_current_char_and_stroke(self, session, synth):
        feed_text(session, synth, "ow")
        events = session.feed(synth.function_tap("backspace", 2000.0))
        assert events_of(EventKind.BACKSPACE, events)[0].payload == {"deleted": "w"}
        assert session.current_word == "o"
        assert len(session.current_strokes) == 1

    def test_eats_into_committed_text(self, session, synth):
        feed_text(session, synth, "o ")
        events = session.feed(synth.function_tap("backspace", 2000.0))
        assert events_of(EventKind.BACKSPACE, events)[0].payload == {"deleted": " "}
        assert session.committed_text == "o"

    def test_empty_buffer_noop(self, session, synth):
        events = session.feed(synth.function_tap("backspace", 0.0))
        assert events_of(EventKind.BACKSPACE, events)[0].payload == {"deleted": None}
        assert session.text == ""


class TestTaps:
    def test_center_tap_enters_start_key(self, session, synth):
        left = session.feed(synth.tap_at(synth.start_point(Thumb.LEFT), 0.0))
        right = session.feed(synth.tap_at(synth.start_point(Thumb.RIGHT), 300.0))
        assert chars_of(left) == ["d"]
        assert chars_of(right) == ["k"]
        assert session.current_word == "dk"

    def test_enter_commits_literal_without_space(self, predict_session, synth):
        feed_text(predict_session, synth, "th")
        predict_session.feed(synth.stroke_to_endpoint((-9.0, -6.0), Thumb.LEFT, 900.0))
        events = predict_session.feed(synth.function_tap("enter", 1200.0))
        assert len(events_of(EventKind.ENTER, events)) == 1
        assert events_of(EventKind.AUTOCORRECT_APPLIED, events) == []
        assert predict_session.committed_text == "thw"

    def test_unassigned_cells_swallowed(self, session, synth, pad):
        from dusk.simulate import cell_center

        for cell in ((0, 1), (1, 0), (2, 1)):
            events = session.feed(synth.tap_at(cell_center(cell, pad), 1000.0 * (cell[0] * 3 + cell[1] + 1)))
            assert events == []
        assert session.text == ""

    def test_empty_word_space_commits_bare_space(self, predict_session, synth):
        events = predict_session.feed(synth.function_tap("space", 0.0))
        assert len(events_of(EventKind.SPACE, events)) == 1
        assert predict_session.committed_text == " "


class TestSuggestions:
    def test_completions_after_prefix(self, predict_session, synth):
        feed_text(predict_session, synth, "th")
        assert predict_session.suggestions == ["the", "they"]

    def test_completion_ranking_uses_frequency(self, predict_session, synth):
        feed_text(predict_session, synth, "th")
        comps = predict_session.completions(k=3)
        assert comps == ["the", "they", "thy"]

    def test_accept_suggestion(self, predict_session, synth):
        feed_text(predict_session, synth, "th")
        events = predict_session.feed(synth.function_tap("suggest2", 2000.0))
        accepted = events_of(EventKind.SUGGEST_ACCEPTED, events)
        assert len(accepted) == 1
        assert accepted[0].payload == {"word": "they", "slot": 1, "replaced": "th"}
        assert predict_session.committed_text == "they "
        assert predict_session.current_word == ""

    def test_empty_slot_noop(self, predict_session, synth):
        events = predict_session.feed(synth.function_tap("suggest1", 0.0))
        assert events == []

    def test_suggestions_cleared_after_commit(self, predict_session, synth):
        feed_text(predict_session, synth, "th")
        assert predict_session.suggestions
        predict_session.feed(synth.function_tap("space", 3000.0))
        assert predict_session.suggestions == []

    def test_no_suggestions_without_predictions(self, session, synth):
        feed_text(session, synth, "th")
        assert session.suggestions == []


class TestFeedOrdering:
    def test_rejects_out_of_order_gesture(self, session, synth):
        session.feed(synth.gesture_for_char("o", 1000.0))
        with pytest.raises(DecodeError, match="ends before"):
            session.feed(synth.gesture_for_char("w", 0.0))

    def test_equal_end_times_allowed(self, session, synth):
        g1 = synth.gesture_for_char("o", 0.0)
        session.feed(g1)
        g2 = synth.tap_at(synth.start_point(Thumb.LEFT), g1.up_t - 80.0)
        assert g2.up_t == g1.up_t
        session.feed(g2)
        assert session.current_word == "od"


class TestCursorFeedback:
    def test_stroke_emits_cursor_trail(self, session, synth, layout):
        g = synth.gesture_for_char("w", 0.0)
        events = session.feed(g)
        cursor = events_of(EventKind.CURSOR_FEEDBACK, events)
        assert len(cursor) == len(g.samples)
        # Trail starts at the start key and ends on the decoded letter.
        assert (cursor[0].payload["x"], cursor[0].payload["y"]) == pytest.approx(
            layout.key_position("d"))
        assert (cursor[-1].payload["x"], cursor[-1].payload["y"]) == pytest.approx(
            layout.key_position("w"))
        assert all(e.payload["thumb"] == "left" for e in cursor)

    def test_taps_emit_no_cursor(self, session, synth):
        events = session.feed(synth.function_tap("space", 0.0))
        assert events_of(EventKind.CURSOR_FEEDBACK, events) == []


class TestEventSerialization:
    def test_to_dict_flattens_payload(self):
        e = KeyEvent(EventKind.CHAR, 12.0, {"char": "a", "thumb": "left"})
        assert e.to_dict() == {"kind": "char", "t": 12.0, "char": "a", "thumb": "left"}
