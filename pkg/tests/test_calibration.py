from __future__ import annotations

import math

import numpy as np
import pytest

from dusk.calibration import (
    COV_REGULARIZATION,
    DEFAULT_SCALE_MM_PER_KEY,
    DEFAULT_SPREAD_MM,
    CalibrationError,
    GestureLogRecord,
    KeyEndpointModel,
    TimingTable,
    TransferFn,
    apply_transfer,
    derive_timing_table,
    endpoint_stats,
    filter_endpoints,
    fit_profile,
    fit_transfer,
    load_profile,
    profile_from_json,
    profile_to_json,
    save_profile,
    synth_profile,
)
from dusk.core import NormalizedEndpoint, PadSpec, Thumb, gesture


def stroke_record(dx, dy, key, thumb=Thumb.LEFT, origin=(30.0, 30.0)):
    ox, oy = origin if thumb is Thumb.LEFT else (100.0, 30.0)
    g = gesture([(ox, oy), (ox + dx, oy + dy)])
    return GestureLogRecord(gesture=g, target_key=key, thumb=thumb)


def cluster(key, center, n, jitter, thumb=Thumb.LEFT, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        dx = center[0] + jitter * rng.standard_normal()
        dy = center[1] + jitter * rng.standard_normal()
        out.append(stroke_record(dx, dy, key, thumb))
    return out


class TestOutlierFilter:
    def test_far_point_dropped(self, pad):
        # Ten endpoints at the target plus one 20 mm away. Scalar SD of the
        # eleven points is ~4.26 mm, so the far point sits at ~18.2 mm > 2 SD
        # while the tight cluster stays within bounds.
        records = [stroke_record(12.0, 0.0, "w") for _ in range(10)]
        records.append(stroke_record(32.0, 0.0, "w"))
        survivors, report = filter_endpoints(records, pad)
        assert len(survivors) == 10
        assert report.total_records == 11
        assert report.retained_records == 10
        assert report.retention_rate == pytest.approx(10 / 11)

    def test_symmetric_cluster_fully_kept(self, pad):
        # Points evenly spaced on a circle all sit at ~1.37 SD from the mean,
        # inside the 2 SD bound, so nothing is dropped.
        records = [stroke_record(12.0 + 2.0 * math.cos(k * math.pi / 4),
                                 2.0 * math.sin(k * math.pi / 4), "w")
                   for k in range(8)]
        survivors, report = filter_endpoints(records, pad)
        assert len(survivors) == 8
        assert report.omitted_groups == []

    def test_filter_is_one_pass_not_iterated(self, pad):
        # Ten points at the center, one extreme (20 mm) and one moderate
        # (8 mm) outlier. The bound from all twelve points (2 SD = 8.51 mm)
        # keeps the moderate point; an iterated filter would re-estimate after
        # dropping the extreme one and reject it too.
        records = [stroke_record(12.0, 0.0, "w") for _ in range(10)]
        moderate = stroke_record(20.0, 0.0, "w")
        records += [stroke_record(32.0, 0.0, "w"), moderate]
        survivors, report = filter_endpoints(records, pad)
        assert len(survivors) == 11
        assert moderate in survivors
        assert report.retained_records == 11

    def test_small_group_omitted(self, pad):
        records = [stroke_record(12.0, 0.0, "w"), stroke_record(12.0, 1.0, "w")]
        survivors, report = filter_endpoints(records, pad)
        assert survivors == []
        assert report.omitted_groups == [("w", "left", "only 2 records")]

    def test_gaussian_retention_near_two_sigma_mass(self, pad):
        # For isotropic Gaussian noise the 2-SD radial cut keeps about
        # 1 - exp(-2) = 86.5% of samples.
        records = cluster("w", (12.0, 0.0), 400, jitter=3.0, seed=11)
        _, report = filter_endpoints(records, pad)
        assert 0.80 <= report.retention_rate <= 0.95

    def test_untargeted_records_ignored(self, pad):
        records = [GestureLogRecord(gesture=gesture([(30, 30), (42, 30)]))]
        survivors, report = filter_endpoints(records, pad)
        assert survivors == [] and report.total_records == 0


class TestEndpointModels:
    def test_mean_and_regularization(self, pad):
        records = [stroke_record(12.0, 0.0, "w") for _ in range(5)]
        models, _ = endpoint_stats(records, pad)
        m = models[("w", Thumb.LEFT)]
        assert m.mean == pytest.approx((12.0, 0.0))
        # Identical endpoints: covariance is exactly the regularizer.
        assert m.cov[0][0] == pytest.approx(COV_REGULARIZATION)
        assert m.cov[1][1] == pytest.approx(COV_REGULARIZATION)
        assert m.sample_count == 5

    def test_groups_split_by_thumb(self, pad):
        records = cluster("t", (10.0, -5.0), 5, 0.2, thumb=Thumb.LEFT)
        records += cluster("t", (-8.0, -5.0), 5, 0.2, thumb=Thumb.RIGHT, seed=1)
        models, _ = endpoint_stats(records, pad)
        assert ("t", Thumb.LEFT) in models and ("t", Thumb.RIGHT) in models
        assert models[("t", Thumb.LEFT)].mean[0] > 0 > models[("t", Thumb.RIGHT)].mean[0]

    def test_density_peak_at_mean(self):
        m = KeyEndpointModel(key="w", thumb=Thumb.LEFT, mean=(3.0, -6.0),
                             cov=((9.0, 0.0), (0.0, 9.0)), sample_count=1)
        peak = m.density(NormalizedEndpoint(3.0, -6.0))
        assert peak == pytest.approx(1.0 / (2 * math.pi * 9.0))
        off = m.density(NormalizedEndpoint(6.0, -6.0))
        assert off == pytest.approx(peak * math.exp(-0.5))
        assert off < peak

    def test_density_degenerate_cov_raises(self):
        m = KeyEndpointModel(key="w", thumb=Thumb.LEFT, mean=(0, 0),
                             cov=((1.0, 1.0), (1.0, 1.0)), sample_count=1)
        with pytest.raises(CalibrationError):
            m.density(NormalizedEndpoint(0, 0))


class TestTransferFit:
    def make_grid_records(self, layout, scale=6.0, n_per_key=2):
        records = []
        for thumb in (Thumb.LEFT, Thumb.RIGHT):
            sx, sy = layout.key_position(layout.start_key(thumb))
            for key in layout.side_letters(thumb):
                kx, ky = layout.key_position(key)
                for _ in range(n_per_key):
                    records.append(stroke_record(scale * (kx - sx), scale * (ky - sy), key, thumb))
        return records

    def test_recovers_exact_affine_map(self, layout, pad):
        records = self.make_grid_records(layout, scale=6.0)
        transfer = fit_transfer(records, layout, pad)
        tf = transfer[Thumb.LEFT]
        assert tf.a_x == pytest.approx(1 / 6.0, abs=1e-9)
        assert tf.b_x == pytest.approx(0.0, abs=1e-9)
        assert tf.c_x == pytest.approx(2.5, abs=1e-9)
        assert tf.a_y == pytest.approx(0.0, abs=1e-9)
        assert tf.b_y == pytest.approx(1 / 6.0, abs=1e-9)
        assert tf.c_y == pytest.approx(1.0, abs=1e-9)

    def test_transfer_maps_endpoints_to_keys(self, layout, pad):
        records = self.make_grid_records(layout)
        transfer = fit_transfer(records, layout, pad)
        e = NormalizedEndpoint(6.0 * (0.0 - 2.5), 6.0 * (0.0 - 1.0))  # toward q
        x, y = apply_transfer(transfer[Thumb.LEFT], e)
        assert (x, y) == pytest.approx((0.0, 0.0), abs=1e-9)

    def test_too_few_records_raises(self, layout, pad):
        records = [stroke_record(1.0 * i, 2.0, "q") for i in range(5)]
        with pytest.raises(CalibrationError, match="at least 6"):
            fit_transfer(records, layout, pad)

    def test_collinear_endpoints_raise(self, layout, pad):
        left = [stroke_record(float(i), 0.0, "q") for i in range(1, 8)]
        right = [stroke_record(float(i), float(i), "m", thumb=Thumb.RIGHT) for i in range(1, 8)]
        with pytest.raises(CalibrationError, match="collinear"):
            fit_transfer(left + right, layout, pad)

    def test_function_key_targets_skipped(self, layout, pad):
        records = self.make_grid_records(layout)
        with_space = records + [stroke_record(0.0, 12.0, "space")]
        a = fit_transfer(records, layout, pad)
        b = fit_transfer(with_space, layout, pad)
        assert a == b


class TestFitProfile:
    def test_full_fit(self, layout, pad):
        records = []
        rng = np.random.default_rng(5)
        for thumb in (Thumb.LEFT, Thumb.RIGHT):
            sx, sy = layout.key_position(layout.start_key(thumb))
            for key in layout.side_letters(thumb):
                kx, ky = layout.key_position(key)
                for _ in range(8):
                    dx = 6.0 * (kx - sx) + 0.4 * rng.standard_normal()
                    dy = 6.0 * (ky - sy) + 0.4 * rng.standard_normal()
                    records.append(stroke_record(dx, dy, key, thumb))
        profile, report = fit_profile(records, layout, pad)
        assert report.retention_rate > 0.8
        assert set(profile.keys_for(Thumb.LEFT)) == set(layout.side_letters(Thumb.LEFT))
        m = profile.model_for("w", Thumb.LEFT)
        assert m is not None
        wx, wy = layout.key_position("w")
        assert m.mean[0] == pytest.approx(6.0 * (wx - 2.5), abs=1.0)
        assert m.mean[1] == pytest.approx(6.0 * (wy - 1.0), abs=1.0)


class TestSynthProfile:
    def test_means_scale_start_relative_positions(self, layout, pad, profile):
        m = profile.model_for("w", Thumb.LEFT)
        # w is at (1,0); d at (2.5,1): displacement (-1.5,-1) keys -> (-9,-6) mm.
        assert m.mean == pytest.approx((-9.0, -6.0))
        assert m.cov == ((DEFAULT_SPREAD_MM ** 2, 0.0), (0.0, DEFAULT_SPREAD_MM ** 2))

    def test_covers_exactly_side_letters(self, layout, profile):
        assert profile.keys_for(Thumb.LEFT) == sorted(layout.side_letters(Thumb.LEFT))
        assert profile.keys_for(Thumb.RIGHT) == sorted(layout.side_letters(Thumb.RIGHT))
        assert profile.model_for("m", Thumb.LEFT) is None

    def test_transfer_inverts_construction(self, layout, profile):
        for thumb in (Thumb.LEFT, Thumb.RIGHT):
            tf = profile.transfer[thumb]
            for key in layout.side_letters(thumb):
                m = profile.model_for(key, thumb)
                x, y = tf.apply(NormalizedEndpoint(*m.mean))
                assert (x, y) == pytest.approx(layout.key_position(key), abs=1e-9)

    def test_start_key_is_zero_displacement(self, layout, profile):
        assert profile.model_for("d", Thumb.LEFT).mean == (0.0, 0.0)
        assert profile.model_for("k", Thumb.RIGHT).mean == (0.0, 0.0)

    def test_density_at_mean(self, profile):
        m = profile.model_for("w", Thumb.LEFT)
        want = 1.0 / (2 * math.pi * DEFAULT_SPREAD_MM ** 2)
        assert m.density(NormalizedEndpoint(*m.mean)) == pytest.approx(want)


class TestProfileSerialization:
    def test_round_trip(self, profile, tmp_path):
        p = tmp_path / "profile.json"
        save_profile(p, profile)
        loaded = load_profile(p)
        assert loaded.pad == profile.pad
        assert loaded.transfer == profile.transfer
        assert set(loaded.models) == set(profile.models)
        for k in profile.models:
            assert loaded.models[k].mean == pytest.approx(profile.models[k].mean)

    def test_json_stable(self, profile):
        text = profile_to_json(profile)
        assert profile_to_json(profile_from_json(text)) == text

    def test_version_check(self, profile):
        import json

        d = json.loads(profile_to_json(profile))
        d["schema_version"] = 99
        with pytest.raises(CalibrationError, match="schema version"):
            profile_from_json(json.dumps(d))


class TestTimingTable:
    def tap_record(self, key, up_t, stimulus_t, x=100.0):
        g = gesture([(x, 55.0, up_t - 40.0), (x, 55.0, up_t)])
        return GestureLogRecord(gesture=g, target_key=key, stimulus_t=stimulus_t)

    def stroke_timed(self, key, duration, thumb=Thumb.LEFT):
        g = gesture([(30.0, 30.0, 0.0), (45.0, 30.0, duration)])
        return GestureLogRecord(gesture=g, target_key=key, thumb=thumb)

    def test_stroke_median_plus_tap_in_place(self, pad):
        records = [self.stroke_timed("w", d) for d in (200.0, 240.0, 300.0)]
        table = derive_timing_table(records, pad)
        assert table.get("w", Thumb.LEFT) == pytest.approx(240.0 + 127.0)

    def test_tap_median_minus_reaction(self, pad):
        records = [self.tap_record("space", up_t=500.0 + d, stimulus_t=0.0, x=10.0)
                   for d in (0.0, 30.0, -30.0)]
        table = derive_timing_table(records, pad)
        assert table.get("space", Thumb.LEFT) == pytest.approx(500.0 - 230.0)

    def test_tap_clamped_to_one_ms(self, pad, caplog):
        records = [self.tap_record("space", up_t=100.0, stimulus_t=0.0, x=10.0)] * 3
        with caplog.at_level("WARNING"):
            table = derive_timing_table(records, pad)
        assert table.get("space", Thumb.LEFT) == 1.0
        assert "clamped" in caplog.text

    def test_tap_without_stimulus_raises(self, pad):
        g = gesture([(10.0, 55.0, 0.0), (10.0, 55.0, 40.0)])
        records = [GestureLogRecord(gesture=g, target_key="space")]
        with pytest.raises(CalibrationError, match="stimulus_t"):
            derive_timing_table(records, pad)

    def test_mixed_kinds_rejected(self, pad):
        records = [self.stroke_timed("w", 200.0),
                   self.tap_record("w", up_t=300.0, stimulus_t=0.0, x=30.0)]
        with pytest.raises(CalibrationError, match="mixed"):
            derive_timing_table(records, pad)

    def test_csv_round_trip(self):
        t = TimingTable(entries={("w", Thumb.LEFT): 350.5, ("space", Thumb.LEFT): 180.0})
        loaded = TimingTable.from_csv(t.to_csv())
        assert loaded.entries == t.entries

    def test_csv_bad_header(self):
        with pytest.raises(CalibrationError, match="header"):
            TimingTable.from_csv("a,b,c\nw,left,1\n")

    def test_missing_listing(self):
        t = TimingTable(entries={("w", Thumb.LEFT): 350.5})
        req = [("w", Thumb.LEFT), ("q", Thumb.LEFT)]
        assert t.missing(req) == [("q", Thumb.LEFT)]

    def test_get_raises_when_absent(self):
        with pytest.raises(CalibrationError):
            TimingTable().get("w", Thumb.LEFT)

    def test_bundled_table_loads(self):
        from importlib import resources

        text = resources.files("dusk").joinpath("data/timing_default.csv").read_text()
        table = TimingTable.from_csv(text)
        assert table.get("space", Thumb.LEFT) == 180.0
        assert table.get("d", Thumb.LEFT) == 220.0
        assert table.get("k", Thumb.RIGHT) == 220.0
        # All 26 letters present under their layout thumb.
        assert len(table.entries) == 27
