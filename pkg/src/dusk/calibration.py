"""Per-user calibration: endpoint statistics, transfer functions, timing.

A calibration session logs gestures toward prompted keys. From those logs
this module fits, per thumb:

  - a Gaussian endpoint model per key (mean + covariance of normalized
    stroke endpoints, in mm),
  - an affine transfer function mapping endpoint displacement to keyboard
    coordinates (key units),
  - a per-key movement-time table for the closed-form speed model.

A synthetic default profile stands in before any user data exists.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Gesture, NormalizedEndpoint, PadSpec, Thumb, normalized_endpoint
from .layout import Layout
from .recognizer import TAP_THRESHOLD_MM, ContactClass, classify_contact, infer_thumb

log = logging.getLogger(__name__)

PROFILE_SCHEMA_VERSION = 1

OUTLIER_SD = 2.0  # drop endpoints farther than this many scalar SDs from the group mean
COV_REGULARIZATION = 0.01  # mm^2 added to both covariance diagonals
MIN_GROUP_RECORDS = 3
MIN_TRANSFER_RECORDS = 6  # per thumb

DEFAULT_SCALE_MM_PER_KEY = 6.0
DEFAULT_SPREAD_MM = 3.0

TAP_IN_PLACE_MS = 127.0  # soft-keyboard time to tap without moving
VISUAL_REACTION_MS = 230.0  # subtracted from stimulus-to-tap times


class CalibrationError(ValueError):
    pass


@dataclass
class GestureLogRecord:
    """One logged gesture with its calibration context.

    target_key / thumb / stimulus_t are optional because free-typing logs
    carry none of them. extras preserves any unknown fields a newer logger
    wrote, so logs round-trip without loss.
    """

    gesture: Gesture
    target_key: str | None = None
    thumb: Thumb | None = None
    stimulus_t: float | None = None
    extras: dict = field(default_factory=dict)

    def resolved_thumb(self, pad: PadSpec) -> Thumb:
        return self.thumb if self.thumb is not None else infer_thumb(self.gesture, pad)


@dataclass(frozen=True)
class KeyEndpointModel:
    key: str
    thumb: Thumb
    mean: tuple[float, float]  # mm
    cov: tuple[tuple[float, float], tuple[float, float]]  # mm^2
    sample_count: int

    def mean_array(self) -> np.ndarray:
        return np.array(self.mean)

    def cov_array(self) -> np.ndarray:
        return np.array(self.cov)

    def density(self, e: NormalizedEndpoint) -> float:
        """Bivariate Gaussian density of an endpoint under this model, per mm^2."""
        d = np.array([e.dx, e.dy]) - self.mean_array()
        cov = self.cov_array()
        det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
        if det <= 0:
            raise CalibrationError(f"degenerate covariance for {self.key}/{self.thumb.value}")
        inv = np.array([[cov[1, 1], -cov[0, 1]], [-cov[1, 0], cov[0, 0]]]) / det
        maha = float(d @ inv @ d)
        return math.exp(-0.5 * maha) / (2 * math.pi * math.sqrt(det))


@dataclass(frozen=True)
class TransferFn:
    """Affine map from endpoint displacement (mm) to keyboard coords (key units)."""

    thumb: Thumb
    a_x: float
    b_x: float
    c_x: float
    a_y: float
    b_y: float
    c_y: float

    def apply(self, e: NormalizedEndpoint) -> tuple[float, float]:
        return (
            e.dx * self.a_x + e.dy * self.b_x + self.c_x,
            e.dx * self.a_y + e.dy * self.b_y + self.c_y,
        )


@dataclass
class FitReport:
    total_records: int = 0
    retained_records: int = 0
    omitted_groups: list[tuple[str, str, str]] = field(default_factory=list)  # key, thumb, reason

    @property
    def retention_rate(self) -> float:
        return self.retained_records / self.total_records if self.total_records else 0.0


@dataclass
class CalibrationProfile:
    pad: PadSpec
    models: dict[tuple[str, Thumb], KeyEndpointModel]
    transfer: dict[Thumb, TransferFn]
    tap_threshold_mm: float = TAP_THRESHOLD_MM
    schema_version: int = PROFILE_SCHEMA_VERSION

    def model_for(self, key: str, thumb: Thumb) -> KeyEndpointModel | None:
        return self.models.get((key, thumb))

    def keys_for(self, thumb: Thumb) -> list[str]:
        return sorted(k for (k, t) in self.models if t is thumb)


def _group_endpoints(records: list[GestureLogRecord], pad: PadSpec
                     ) -> dict[tuple[str, Thumb], list[tuple[GestureLogRecord, NormalizedEndpoint]]]:
    groups: dict[tuple[str, Thumb], list] = {}
    for r in records:
        if r.target_key is None:
            continue
        key = (r.target_key, r.resolved_thumb(pad))
        groups.setdefault(key, []).append((r, normalized_endpoint(r.gesture)))
    return groups


def _scalar_sd(points: np.ndarray) -> float:
    """Radial spread of a 2D sample: sqrt(trace(cov) / 2)."""
    if len(points) < 2:
        return 0.0
    cov = np.cov(points.T, ddof=1)
    return math.sqrt(max(float(np.trace(cov)) / 2.0, 0.0))


def filter_endpoints(records: list[GestureLogRecord], pad: PadSpec
                     ) -> tuple[list[GestureLogRecord], FitReport]:
    """One-pass outlier removal: per (key, thumb) group, drop records whose
    endpoint lies farther than 2 scalar SDs from the group mean. The pass is
    not iterated, so a second application keeps every survivor that stays
    within the re-estimated bound."""
    groups = _group_endpoints(records, pad)
    report = FitReport()
    survivors: list[GestureLogRecord] = []
    kept_set = set()
    for (key, thumb), members in groups.items():
        pts = np.array([[e.dx, e.dy] for _, e in members])
        report.total_records += len(members)
        if len(members) < MIN_GROUP_RECORDS:
            report.omitted_groups.append((key, thumb.value, f"only {len(members)} records"))
            continue
        mean = pts.mean(axis=0)
        sd = _scalar_sd(pts)
        dist = np.linalg.norm(pts - mean, axis=1)
        keep = dist <= OUTLIER_SD * sd
        kept = [members[i][0] for i in range(len(members)) if keep[i]]
        if len(kept) < MIN_GROUP_RECORDS:
            report.omitted_groups.append((key, thumb.value, f"only {len(kept)} records after filtering"))
            continue
        report.retained_records += len(kept)
        kept_set.update(id(r) for r in kept)
    for r in records:
        if id(r) in kept_set:
            survivors.append(r)
    return survivors, report


def _models_from(survivors: list[GestureLogRecord], pad: PadSpec
                 ) -> dict[tuple[str, Thumb], KeyEndpointModel]:
    groups = _group_endpoints(survivors, pad)
    models: dict[tuple[str, Thumb], KeyEndpointModel] = {}
    for (key, thumb), members in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        pts = np.array([[e.dx, e.dy] for _, e in members])
        mean = pts.mean(axis=0)
        cov = np.cov(pts.T, ddof=1) + COV_REGULARIZATION * np.eye(2)
        models[(key, thumb)] = KeyEndpointModel(
            key=key,
            thumb=thumb,
            mean=(float(mean[0]), float(mean[1])),
            cov=((float(cov[0, 0]), float(cov[0, 1])), (float(cov[1, 0]), float(cov[1, 1]))),
            sample_count=len(members),
        )
    return models


def endpoint_stats(records: list[GestureLogRecord], pad: PadSpec
                   ) -> tuple[dict[tuple[str, Thumb], KeyEndpointModel], FitReport]:
    """Per-(key, thumb) Gaussian endpoint models from outlier-filtered records.

    Covariances get +0.01 mm^2 on the diagonal so repeated identical
    endpoints still yield an invertible model.
    """
    survivors, report = filter_endpoints(records, pad)
    return _models_from(survivors, pad), report


def fit_transfer(records: list[GestureLogRecord], layout: Layout, pad: PadSpec
                 ) -> dict[Thumb, TransferFn]:
    """Least-squares affine fit, per thumb, from stroke endpoints to the
    prompted keys' positions. Callers normally pass outlier-filtered records;
    fit_profile does."""
    by_thumb: dict[Thumb, list[tuple[NormalizedEndpoint, tuple[float, float]]]] = {}
    for r in records:
        if r.target_key is None or not r.target_key.islower() or len(r.target_key) != 1:
            continue
        pos = layout.key_position(r.target_key)
        by_thumb.setdefault(r.resolved_thumb(pad), []).append((normalized_endpoint(r.gesture), pos))
    out: dict[Thumb, TransferFn] = {}
    for thumb in (Thumb.LEFT, Thumb.RIGHT):
        pairs = by_thumb.get(thumb, [])
        if len(pairs) < MIN_TRANSFER_RECORDS:
            raise CalibrationError(
                f"need at least {MIN_TRANSFER_RECORDS} records for {thumb.value} thumb, got {len(pairs)}")
        A = np.array([[e.dx, e.dy, 1.0] for e, _ in pairs])
        if np.linalg.matrix_rank(A) < 3:
            raise CalibrationError(f"endpoints for {thumb.value} thumb are collinear; transfer fit is degenerate")
        tx = np.array([p[0] for _, p in pairs])
        ty = np.array([p[1] for _, p in pairs])
        cx, *_ = np.linalg.lstsq(A, tx, rcond=None)
        cy, *_ = np.linalg.lstsq(A, ty, rcond=None)
        out[thumb] = TransferFn(
            thumb=thumb,
            a_x=float(cx[0]), b_x=float(cx[1]), c_x=float(cx[2]),
            a_y=float(cy[0]), b_y=float(cy[1]), c_y=float(cy[2]),
        )
    return out


def apply_transfer(tf: TransferFn, e: NormalizedEndpoint) -> tuple[float, float]:
    return tf.apply(e)


def fit_profile(records: list[GestureLogRecord], layout: Layout, pad: PadSpec
                ) -> tuple[CalibrationProfile, FitReport]:
    """Full calibration: outlier filter once, then endpoint models and
    transfer functions from the same survivors."""
    survivors, report = filter_endpoints(records, pad)
    models = _models_from(survivors, pad)
    transfer = fit_transfer(survivors, layout, pad)
    return CalibrationProfile(pad=pad, models=models, transfer=transfer), report


def synth_profile(layout: Layout | None = None, pad: PadSpec | None = None,
                  spread_mm: float = DEFAULT_SPREAD_MM,
                  scale_mm_per_key: float = DEFAULT_SCALE_MM_PER_KEY) -> CalibrationProfile:
    """Default profile for users without calibration data.

    Endpoint means scale the start-key-to-target displacement by
    scale_mm_per_key; covariances are isotropic with the given spread. The
    transfer functions are the exact analytic inverse of that construction,
    so noiseless synthetic strokes land dead center on their keys.
    """
    layout = layout or Layout()
    pad = pad or PadSpec()
    models: dict[tuple[str, Thumb], KeyEndpointModel] = {}
    transfer: dict[Thumb, TransferFn] = {}
    cov = ((spread_mm ** 2, 0.0), (0.0, spread_mm ** 2))
    for thumb in (Thumb.LEFT, Thumb.RIGHT):
        sx, sy = layout.key_position(layout.start_key(thumb))
        for key in layout.side_letters(thumb):
            kx, ky = layout.key_position(key)
            mean = (scale_mm_per_key * (kx - sx), scale_mm_per_key * (ky - sy))
            models[(key, thumb)] = KeyEndpointModel(
                key=key, thumb=thumb, mean=mean, cov=cov, sample_count=0)
        transfer[thumb] = TransferFn(
            thumb=thumb,
            a_x=1.0 / scale_mm_per_key, b_x=0.0, c_x=sx,
            a_y=0.0, b_y=1.0 / scale_mm_per_key, c_y=sy,
        )
    return CalibrationProfile(pad=pad, models=models, transfer=transfer)


# --- timing table ---


@dataclass
class TimingTable:
    """Per-(key, thumb) movement time in ms, for the closed-form speed model."""

    entries: dict[tuple[str, Thumb], float] = field(default_factory=dict)

    def get(self, key: str, thumb: Thumb) -> float:
        try:
            return self.entries[(key, thumb)]
        except KeyError:
            raise CalibrationError(f"no timing entry for {key!r}/{thumb.value}") from None

    def missing(self, required: list[tuple[str, Thumb]]) -> list[tuple[str, Thumb]]:
        return [kt for kt in required if kt not in self.entries]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["key", "thumb", "t_ms"])
        for (key, thumb), t in sorted(self.entries.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
            w.writerow([key, thumb.value, f"{t:.3f}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TimingTable":
        entries: dict[tuple[str, Thumb], float] = {}
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["key", "thumb", "t_ms"]:
            raise CalibrationError(f"bad timing table header: {header}")
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise CalibrationError(f"bad timing row: {row}")
            key, thumb_s, t_s = row[0].strip(), row[1].strip(), row[2].strip()
            try:
                thumb = Thumb(thumb_s)
                t = float(t_s)
            except ValueError:
                raise CalibrationError(f"bad timing row: {row}") from None
            entries[(key, thumb)] = t
        return cls(entries=entries)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def load(cls, path: str | Path) -> "TimingTable":
        return cls.from_csv(Path(path).read_text())


def derive_timing_table(records: list[GestureLogRecord], pad: PadSpec) -> TimingTable:
    """Per-key movement times from a calibration log.

    Stroke keys take the median touch-down-to-up duration plus the time to
    tap in place (a stroke entry ends with the same lift a tap needs). Tap
    keys take the median stimulus-to-up time minus visual reaction time;
    tap rows therefore require stimulus_t.
    """
    durations: dict[tuple[str, Thumb], list[float]] = {}
    kinds: dict[tuple[str, Thumb], ContactClass] = {}
    for r in records:
        if r.target_key is None:
            continue
        group = (r.target_key, r.resolved_thumb(pad))
        kind = classify_contact(r.gesture)
        prev = kinds.setdefault(group, kind)
        if prev is not kind:
            raise CalibrationError(f"mixed tap and stroke records for {group[0]!r}/{group[1].value}")
        if kind is ContactClass.STROKE:
            durations.setdefault(group, []).append(r.gesture.duration)
        else:
            if r.stimulus_t is None:
                raise CalibrationError(f"tap record for {group[0]!r} lacks stimulus_t")
            durations.setdefault(group, []).append(r.gesture.up_t - r.stimulus_t)
    entries: dict[tuple[str, Thumb], float] = {}
    for group, ds in durations.items():
        med = statistics.median(ds)
        if kinds[group] is ContactClass.STROKE:
            entries[group] = med + TAP_IN_PLACE_MS
        else:
            t = med - VISUAL_REACTION_MS
            if t < 1.0:
                log.warning("timing for %s/%s clamped to 1 ms (median %.1f ms below reaction time)",
                            group[0], group[1].value, med)
                t = 1.0
            entries[group] = t
    return TimingTable(entries=entries)


# --- profile serialization ---


def profile_to_dict(p: CalibrationProfile) -> dict:
    models: dict[str, dict] = {Thumb.LEFT.value: {}, Thumb.RIGHT.value: {}}
    for (key, thumb), m in p.models.items():
        models[thumb.value][key] = {
            "mean": list(m.mean),
            "cov": [list(m.cov[0]), list(m.cov[1])],
            "samples": m.sample_count,
        }
    transfer = {}
    for thumb, tf in p.transfer.items():
        transfer[thumb.value] = {
            "a_x": tf.a_x, "b_x": tf.b_x, "c_x": tf.c_x,
            "a_y": tf.a_y, "b_y": tf.b_y, "c_y": tf.c_y,
        }
    return {
        "schema_version": p.schema_version,
        "pad": {"width": p.pad.width, "height": p.pad.height},
        "tap_threshold_mm": p.tap_threshold_mm,
        "models": models,
        "transfer": transfer,
    }


def profile_from_dict(d: dict) -> CalibrationProfile:
    version = d.get("schema_version")
    if version != PROFILE_SCHEMA_VERSION:
        raise CalibrationError(f"unsupported profile schema version: {version!r}")
    pad = PadSpec(width=d["pad"]["width"], height=d["pad"]["height"])
    models: dict[tuple[str, Thumb], KeyEndpointModel] = {}
    for thumb_s, keys in d["models"].items():
        thumb = Thumb(thumb_s)
        for key, m in keys.items():
            models[(key, thumb)] = KeyEndpointModel(
                key=key, thumb=thumb,
                mean=(m["mean"][0], m["mean"][1]),
                cov=((m["cov"][0][0], m["cov"][0][1]), (m["cov"][1][0], m["cov"][1][1])),
                sample_count=m["samples"],
            )
    transfer: dict[Thumb, TransferFn] = {}
    for thumb_s, tf in d["transfer"].items():
        thumb = Thumb(thumb_s)
        transfer[thumb] = TransferFn(thumb=thumb, **{k: float(v) for k, v in tf.items()})
    return CalibrationProfile(
        pad=pad, models=models, transfer=transfer,
        tap_threshold_mm=d["tap_threshold_mm"],
    )


def profile_to_json(p: CalibrationProfile) -> str:
    """Stable serialization: keys sorted, so equal profiles give equal bytes."""
    return json.dumps(profile_to_dict(p), sort_keys=True, indent=2) + "\n"


def profile_from_json(text: str) -> CalibrationProfile:
    return profile_from_dict(json.loads(text))


def save_profile(path: str | Path, p: CalibrationProfile) -> None:
    Path(path).write_text(profile_to_json(p))


def load_profile(path: str | Path) -> CalibrationProfile:
    return profile_from_json(Path(path).read_text())
