from __future__ import annotations

import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dusk.core import PadSpec, Thumb, gesture
from dusk.recognizer import (
    LSHAPE,
    RESAMPLE_POINTS,
    SINGLE8,
    TAP_THRESHOLD_MM,
    VSHAPE,
    ContactClass,
    NotAStrokeError,
    NotATapError,
    StrokeTemplate,
    angle_sequence,
    angular_distance,
    batch_deviations,
    build_templates,
    classify_contact,
    default_templates,
    dtw_deviation,
    infer_thumb,
    load_templates,
    recognize_stroke,
    recognize_tap,
    resample_polyline,
    save_templates,
    tap_cell,
    templates_from_dict,
    templates_to_dict,
)

angles = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False)
angle_seqs = st.lists(angles, min_size=1, max_size=12)


class TestClassification:
    def test_still_contact_is_tap(self, pad):
        assert classify_contact(gesture([(10, 10), (10, 10)])) is ContactClass.TAP

    def test_just_under_threshold_is_tap(self):
        g = gesture([(0, 0), (9.999, 0)])
        assert classify_contact(g) is ContactClass.TAP

    def test_exactly_threshold_is_stroke(self):
        # The boundary itself counts as movement.
        g = gesture([(0, 0), (TAP_THRESHOLD_MM, 0)])
        assert classify_contact(g) is ContactClass.STROKE

    def test_wiggly_tap_becomes_stroke(self):
        # Endpoint barely moves but the path is long.
        g = gesture([(0, 0), (4, 0), (0, 0), (4, 0)])
        assert classify_contact(g) is ContactClass.STROKE

    def test_recognize_tap_rejects_stroke(self, pad):
        with pytest.raises(NotATapError):
            recognize_tap(gesture([(0, 0), (30, 0)]), pad)

    def test_recognize_stroke_rejects_tap(self):
        with pytest.raises(NotAStrokeError):
            recognize_stroke(gesture([(0, 0), (1, 0)]))


class TestThumbInference:
    def test_left_half(self, pad):
        assert infer_thumb(gesture([(10, 30)]), pad) is Thumb.LEFT

    def test_right_half(self, pad):
        assert infer_thumb(gesture([(100, 30)]), pad) is Thumb.RIGHT

    def test_midline_is_right(self, pad):
        assert infer_thumb(gesture([(pad.width / 2, 30)]), pad) is Thumb.RIGHT

    def test_uses_touch_down_not_touch_up(self, pad):
        g = gesture([(10, 30), (120, 30)])
        assert infer_thumb(g, pad) is Thumb.LEFT


class TestTapGrid:
    def test_grid_corners(self, pad):
        assert tap_cell(0, 0, pad) == (0, 0)
        assert tap_cell(pad.width - 0.01, 0, pad) == (0, 2)
        assert tap_cell(0, pad.height - 0.01, pad) == (2, 0)

    def test_far_edges_fold_in(self, pad):
        assert tap_cell(pad.width, pad.height, pad) == (2, 2)

    def test_center_cell(self, pad):
        assert tap_cell(pad.width / 2, pad.height / 2, pad) == (1, 1)

    def test_known_cell(self, pad):
        # x at half width falls in the middle column, y near the bottom in row 2.
        assert tap_cell(0.5 * pad.width, 0.95 * pad.height, pad) == (2, 1)

    def test_tap_located_at_touch_down(self, pad):
        g = gesture([(5.0, 5.0), (9.0, 5.0)])
        assert recognize_tap(g, pad) == (0, 0)


class TestResampling:
    def test_keeps_endpoints(self):
        pts = resample_polyline([(0, 0), (10, 0)], 5)
        assert pts[0] == (0, 0) and pts[-1] == (10, 0)
        assert len(pts) == 5

    def test_even_spacing_on_a_line(self):
        pts = resample_polyline([(0, 0), (9, 0)], 10)
        for k, (x, y) in enumerate(pts):
            assert x == pytest.approx(float(k))
            assert y == 0

    def test_spacing_even_across_segments(self):
        # Two segments of very different sample density.
        pts = resample_polyline([(0, 0), (1, 0), (10, 0)], 11)
        for k, (x, _) in enumerate(pts):
            assert x == pytest.approx(k * 1.0)

    def test_duplicate_points_ignored(self):
        pts = resample_polyline([(0, 0), (0, 0), (10, 0), (10, 0)], 3)
        assert pts[1] == (5.0, 0.0)

    def test_zero_length_rejected(self):
        with pytest.raises(NotAStrokeError):
            resample_polyline([(3, 3), (3, 3)])

    @given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)), min_size=2, max_size=15))
    def test_arc_length_preserved(self, pts):
        total = sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(pts, pts[1:]))
        if total < 1e-6:
            return
        out = resample_polyline(pts, 10)
        out_total = sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(out, out[1:]))
        assert out_total <= total + 1e-6


class TestAngleSequences:
    def test_straight_east_stroke_all_zero(self):
        seq = angle_sequence(gesture([(0, 0), (30, 0)]))
        assert len(seq) == RESAMPLE_POINTS - 1
        assert all(a == pytest.approx(0.0) for a in seq)

    def test_north_stroke_is_minus_half_pi(self):
        # y grows downward, so "up" is a negative angle.
        seq = angle_sequence(gesture([(0, 30), (0, 0)]))
        assert all(a == pytest.approx(-math.pi / 2) for a in seq)

    def test_l_path_angles(self):
        # East 20mm then south 20mm: first half ~0, second half ~pi/2.
        seq = angle_sequence(gesture([(0, 0), (20, 0), (20, 20)]))
        assert seq[0] == pytest.approx(0.0)
        assert seq[-1] == pytest.approx(math.pi / 2)
        assert sum(1 for a in seq if abs(a) < 1e-6) >= 4
        assert sum(1 for a in seq if abs(a - math.pi / 2) < 1e-6) >= 4


class TestAngularDistance:
    def test_identity(self):
        assert angular_distance(1.0, 1.0) == 0.0

    def test_wraps_at_pi(self):
        assert angular_distance(-math.pi + 0.1, math.pi - 0.1) == pytest.approx(0.2)

    def test_max_is_pi(self):
        assert angular_distance(0.0, math.pi) == pytest.approx(math.pi)

    @given(angles, angles)
    def test_symmetric_and_bounded(self, a, b):
        d = angular_distance(a, b)
        assert 0 <= d <= math.pi + 1e-9
        assert d == pytest.approx(angular_distance(b, a))


class TestDtw:
    def test_identical_sequences_zero(self):
        assert dtw_deviation([0.1, 0.2, 0.3], [0.1, 0.2, 0.3]) == 0.0

    def test_hand_value_opposite_angles(self):
        # Three cells on the diagonal, each costing pi.
        assert dtw_deviation([0.0, 0.0, 0.0], [math.pi, math.pi, math.pi]) == pytest.approx(3 * math.pi)

    def test_warping_absorbs_speed_changes(self):
        # Same shape, one leg traced with more samples: cost stays zero.
        a = [0.0, 0.0, math.pi / 2]
        b = [0.0, math.pi / 2, math.pi / 2]
        assert dtw_deviation(a, a + [math.pi / 2]) == 0.0
        assert dtw_deviation(b, [0.0] + b) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            dtw_deviation([], [0.0])

    @given(angle_seqs, angle_seqs)
    def test_symmetric_nonnegative(self, a, b):
        d = dtw_deviation(a, b)
        assert d >= 0
        assert d == pytest.approx(dtw_deviation(b, a))

    @given(angle_seqs)
    def test_self_distance_zero(self, a):
        assert dtw_deviation(a, a) == 0.0


class TestTemplateAlphabet:
    def test_counts(self):
        templates = build_templates()
        assert len(templates) == 56
        fams = Counter(t.family for t in templates)
        assert fams == {SINGLE8: 8, LSHAPE: 24, VSHAPE: 24}

    def test_ids_unique(self):
        templates = build_templates()
        assert len({t.id for t in templates}) == 56

    def test_angle_sequences_distinct(self):
        templates = build_templates()
        seen = {tuple(round(a, 9) for a in t.angles) for t in templates}
        assert len(seen) == 56

    def test_every_template_self_deviation_zero(self):
        for t in default_templates():
            assert dtw_deviation(t.angles, t.angles) == 0.0

    def test_family_rule_examples(self):
        by_id = {t.id: t for t in build_templates()}
        assert by_id["e"].family == SINGLE8
        assert by_id["e-s"].family == LSHAPE  # 90 degree bend
        assert by_id["e-nw"].family == VSHAPE  # 135 degree bend
        assert by_id["e-se"].family == LSHAPE  # 45 bend, cardinal start
        assert by_id["ne-e"].family == VSHAPE  # 45 bend, diagonal start

    def test_straight_bends_excluded(self):
        ids = {t.id for t in build_templates()}
        assert "e-e" not in ids  # 0 degree bend
        assert "e-w" not in ids  # 180 degree bend

    def test_recognize_clean_singles(self):
        # Trace each compass single exactly; recognition must return it.
        for t in default_templates():
            if t.family != SINGLE8:
                continue
            ang = t.angles[0]
            g = gesture([(0, 0), (30 * math.cos(ang), 30 * math.sin(ang))])
            assert recognize_stroke(g).id == t.id

    def test_recognize_clean_compound(self):
        g = gesture([(0, 0), (20, 0), (20, 20)])  # east then south
        assert recognize_stroke(g).id == "e-s"

    def test_recognition_is_scale_invariant(self):
        small = gesture([(0, 0), (12, 0), (12, 12)])
        large = gesture([(0, 0), (40, 0), (40, 40)])
        assert recognize_stroke(small).id == recognize_stroke(large).id == "e-s"

    def test_recognition_is_position_invariant(self):
        a = gesture([(0, 0), (25, 0)])
        b = gesture([(100, 50), (125, 50)])
        assert recognize_stroke(a).id == recognize_stroke(b).id == "e"


class TestBatchDeviations:
    def test_matches_scalar_dtw(self):
        rng = np.random.default_rng(7)
        templates = default_templates()
        seqs = rng.uniform(-math.pi, math.pi, size=(5, 9))
        got = batch_deviations(seqs, templates)
        assert got.shape == (5, 56)
        for i in range(5):
            for j, t in enumerate(templates):
                want = dtw_deviation(list(seqs[i]), t.angles)
                assert got[i, j] == pytest.approx(want, abs=1e-9)

    def test_template_self_rows(self):
        templates = default_templates()
        seqs = np.array([t.angles for t in templates])
        dev = batch_deviations(seqs, templates)
        assert np.allclose(np.diag(dev), 0.0)
        # Every template is its own unique best match.
        assert (dev.argmin(axis=1) == np.arange(56)).all()


class TestTemplateSerialization:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "templates.json"
        save_templates(p)
        loaded = load_templates(p)
        assert [t.id for t in loaded] == [t.id for t in default_templates()]
        for got, want in zip(loaded, default_templates()):
            assert got.family == want.family
            assert got.angles == pytest.approx(want.angles, abs=1e-11)

    def test_dict_round_trip(self):
        templates = (StrokeTemplate(id="x", family=SINGLE8, angles=(0.25, -1.5)),)
        assert templates_from_dict(templates_to_dict(templates))[0].id == "x"

    def test_bundled_file_matches_builder(self):
        from importlib import resources

        import json

        text = resources.files("dusk").joinpath("data/templates.json").read_text()
        loaded = templates_from_dict(json.loads(text))
        assert [t.id for t in loaded] == [t.id for t in default_templates()]
