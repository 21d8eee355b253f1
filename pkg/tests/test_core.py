from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dusk.core import (
    Gesture,
    PadSpec,
    TouchSample,
    gesture,
    is_key,
    is_letter,
    normalized_endpoint,
    path_length,
)

coords = st.floats(min_value=-200, max_value=200, allow_nan=False)


def points_strategy(min_size: int = 1):
    return st.lists(st.tuples(coords, coords), min_size=min_size, max_size=20)


class TestGesture:
    def test_needs_samples(self):
        with pytest.raises(ValueError):
            Gesture(())

    def test_rejects_decreasing_times(self):
        with pytest.raises(ValueError):
            Gesture((TouchSample(0, 0, 10), TouchSample(1, 1, 5)))

    def test_equal_times_allowed(self):
        g = Gesture((TouchSample(0, 0, 10), TouchSample(1, 1, 10)))
        assert g.duration == 0

    def test_down_up_times(self):
        g = gesture([(0, 0, 100), (5, 5, 180)])
        assert g.down_t == 100 and g.up_t == 180 and g.duration == 80


class TestPadSpec:
    def test_default_is_landscape(self):
        pad = PadSpec()
        assert pad.width == 134.0 and pad.height == 63.0

    def test_rejects_portrait(self):
        with pytest.raises(ValueError):
            PadSpec(width=63, height=134)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            PadSpec(width=10, height=0)


class TestEndpointAndPath:
    def test_endpoint_is_last_minus_first(self):
        g = gesture([(10, 20), (17, 3), (25, 5)])
        e = normalized_endpoint(g)
        assert (e.dx, e.dy) == (15, -15)

    def test_single_sample_zero(self):
        g = gesture([(4, 4)])
        e = normalized_endpoint(g)
        assert (e.dx, e.dy) == (0, 0)
        assert path_length(g) == 0

    def test_straight_path_equals_endpoint_norm(self):
        g = gesture([(0, 0), (3, 4)])
        assert path_length(g) == 5.0
        assert normalized_endpoint(g).norm() == 5.0

    def test_detour_longer_than_endpoint(self):
        g = gesture([(0, 0), (0, 10), (10, 10), (10, 0)])
        assert path_length(g) == 30.0
        assert normalized_endpoint(g).norm() == 10.0

    @given(points_strategy(min_size=2))
    def test_path_at_least_endpoint(self, pts):
        g = gesture(pts)
        assert path_length(g) >= normalized_endpoint(g).norm() - 1e-9

    @given(points_strategy(min_size=1), coords, coords)
    def test_translation_invariance(self, pts, ox, oy):
        g1 = gesture(pts)
        g2 = gesture([(x + ox, y + oy) for x, y in pts])
        assert path_length(g1) == pytest.approx(path_length(g2), abs=1e-6)
        e1, e2 = normalized_endpoint(g1), normalized_endpoint(g2)
        assert e1.dx == pytest.approx(e2.dx, abs=1e-6)
        assert e1.dy == pytest.approx(e2.dy, abs=1e-6)


class TestKeyIds:
    def test_letters(self):
        assert is_letter("a") and is_letter("z")
        assert not is_letter("A") and not is_letter("space")

    def test_function_keys(self):
        for k in ("space", "backspace", "enter", "suggest1", "suggest2"):
            assert is_key(k) and not is_letter(k)
        assert not is_key("shift")
