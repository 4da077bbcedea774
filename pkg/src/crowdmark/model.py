"""Core domain types: regions, labels, annotations, configs, validation.

Every other module consumes these types. Annotations travel externally as
flat "canonical records" (confidence in 0-100 percent, millisecond
timestamps); internally confidence is a fraction in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import (
    ConfidenceOutOfRange,
    CoordinateOutOfRange,
    EmptyCustomLabel,
    InvalidRecord,
    RegionDegenerate,
    UnknownVideo,
)

# Artifact label taxonomy, in presentation order.
PREDEFINED_LABELS: tuple[str, ...] = (
    "blurry",
    "unnatural skin",
    "distorted",
    "strange texture",
    "strange shape",
    "strange skin folds",
    "irregular shape",
    "non-existent/unneeded object",
    "artificial",
    "mismatch",
    "melting",
    "molten metal",
    "artificial material",
)

MAX_CUSTOM_LABEL_LEN = 64
MAX_REASON_LEN = 2000
# Temporal overshoot beyond the video that is clipped instead of rejected.
TEMPORAL_CLIP_TOLERANCE = 0.05  # seconds

RECORD_FIELDS: tuple[str, ...] = (
    "id", "video_id", "user_id",
    "x1", "y1", "x2", "y2", "t_start", "t_end",
    "label_kind", "label_value", "confidence", "reason", "submitted_at",
)


@dataclass(frozen=True, slots=True)
class Label:
    """An artifact label: one of the predefined taxonomy entries or a
    caller-supplied custom string (case-preserved, whitespace-trimmed)."""

    kind: str  # "predefined" | "custom"
    value: str

    def to_dict(self) -> dict[str, str]:
        return {"kind": self.kind, "value": self.value}


def taxonomy() -> list[Label]:
    """The ordered list of predefined artifact labels."""
    return [Label("predefined", v) for v in PREDEFINED_LABELS]


def make_label(kind: str, value: str) -> Label:
    """Validate and normalize a (kind, value) pair into a Label.

    Custom labels are trimmed only; a custom value that exactly matches a
    predefined entry is folded onto the predefined label so one value never
    names two distinct labels.
    """
    if kind == "predefined":
        if value not in PREDEFINED_LABELS:
            raise InvalidRecord(f"unknown predefined label: {value!r}")
        return Label("predefined", value)
    if kind == "custom":
        trimmed = value.strip()
        if not trimmed:
            raise EmptyCustomLabel("custom label is empty")
        if len(trimmed) > MAX_CUSTOM_LABEL_LEN:
            raise InvalidRecord(
                f"custom label longer than {MAX_CUSTOM_LABEL_LEN} characters")
        if trimmed in PREDEFINED_LABELS:
            return Label("predefined", trimmed)
        return Label("custom", trimmed)
    raise InvalidRecord(f"unknown label kind: {kind!r}")


@dataclass(frozen=True, slots=True)
class SpatioTemporalRegion:
    """Axis-aligned rectangle in frame-relative coordinates plus a time
    interval in seconds. Spatial coordinates live in [0, 1]."""

    x1: float
    y1: float
    x2: float
    y2: float
    t_start: float
    t_end: float

    @property
    def volume(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1) * (self.t_end - self.t_start)

    @property
    def area(self) -> float:
        """Spatial area as a fraction of the frame."""
        return (self.x2 - self.x1) * (self.y2 - self.y1)

    def validate(self) -> None:
        for name in ("x1", "y1", "x2", "y2"):
            v = getattr(self, name)
            if not math.isfinite(v) or not 0.0 <= v <= 1.0:
                raise CoordinateOutOfRange(f"{name}={v!r} outside [0, 1]")
        if not math.isfinite(self.t_start) or not math.isfinite(self.t_end):
            raise CoordinateOutOfRange("non-finite time bound")
        if self.t_start < 0:
            raise CoordinateOutOfRange(f"t_start={self.t_start!r} before 0")
        if self.x1 >= self.x2 or self.y1 >= self.y2 or self.t_start >= self.t_end:
            raise RegionDegenerate(
                f"region has no volume: x[{self.x1},{self.x2}] "
                f"y[{self.y1},{self.y2}] t[{self.t_start},{self.t_end}]")

    def to_dict(self) -> dict[str, float]:
        return {
            "x1": self.x1, "y1": self.y1, "x2": self.x2, "y2": self.y2,
            "t_start": self.t_start, "t_end": self.t_end,
        }


@dataclass(frozen=True, slots=True)
class Annotation:
    """One user's spatio-temporal claim about a video artifact."""

    id: str
    video_id: str
    user_id: str
    region: SpatioTemporalRegion
    label: Label
    confidence: float  # fraction in [0, 1]
    reason: str | None
    submitted_at: int  # milliseconds since epoch

    def to_record(self) -> dict[str, Any]:
        """Canonical flat wire/log form. Confidence becomes 0-100 percent."""
        r = self.region
        return {
            "id": self.id,
            "video_id": self.video_id,
            "user_id": self.user_id,
            "x1": r.x1, "y1": r.y1, "x2": r.x2, "y2": r.y2,
            "t_start": r.t_start, "t_end": r.t_end,
            "label_kind": self.label.kind,
            "label_value": self.label.value,
            "confidence": round(self.confidence * 100.0, 9),
            "reason": self.reason,
            "submitted_at": self.submitted_at,
        }


@dataclass(frozen=True, slots=True)
class Artifact:
    """A ground-truth artifact planted in a fake video."""

    region: SpatioTemporalRegion
    label: Label

    def to_dict(self) -> dict[str, Any]:
        return {"region": self.region.to_dict(), "label": self.label.to_dict()}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Artifact":
        r = d["region"]
        return cls(
            region=SpatioTemporalRegion(
                float(r["x1"]), float(r["y1"]), float(r["x2"]), float(r["y2"]),
                float(r["t_start"]), float(r["t_end"])),
            label=Label(d["label"]["kind"], d["label"]["value"]),
        )


@dataclass(frozen=True, slots=True)
class GroundTruth:
    is_fake: bool
    artifacts: tuple[Artifact, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "is_fake": self.is_fake,
            "artifacts": [a.to_dict() for a in self.artifacts],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "GroundTruth":
        return cls(
            is_fake=bool(d["is_fake"]),
            artifacts=tuple(Artifact.from_dict(a) for a in d.get("artifacts", [])),
        )


@dataclass(frozen=True, slots=True)
class VideoMeta:
    video_id: str
    duration: float
    ground_truth: GroundTruth | None = None

    def to_dict(self) -> dict[str, Any]:
        gt = self.ground_truth
        return {
            "video_id": self.video_id,
            "duration": self.duration,
            "ground_truth": gt.to_dict() if gt is not None else None,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "VideoMeta":
        gt = d.get("ground_truth")
        meta = cls(
            video_id=d["video_id"],
            duration=float(d["duration"]),
            ground_truth=GroundTruth.from_dict(gt) if gt is not None else None,
        )
        meta.validate()
        return meta

    def validate(self) -> None:
        if not self.video_id:
            raise InvalidRecord("video_id is empty")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise InvalidRecord(f"duration={self.duration!r} must be > 0")
        if self.ground_truth is not None:
            for art in self.ground_truth.artifacts:
                art.region.validate()
                if art.region.t_end > self.duration:
                    raise InvalidRecord(
                        f"ground-truth region ends at {art.region.t_end} "
                        f"beyond duration {self.duration}")


@dataclass(slots=True)
class UserHistory:
    """A user's past confidence record, ordered by submission time."""

    user_id: str
    past_confidences: list[float] = field(default_factory=list)

    def append(self, confidence: float) -> None:
        if not 0.0 <= confidence <= 1.0:
            raise ConfidenceOutOfRange(f"history entry {confidence!r}")
        self.past_confidences.append(confidence)


@dataclass(frozen=True, slots=True)
class AggregationConfig:
    iou_thresh: float = 0.40
    top_t: int = 5
    new_user_reliability: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.iou_thresh < 1.0:
            raise ValueError("iou_thresh must be in (0, 1)")
        if self.top_t < 1:
            raise ValueError("top_t must be >= 1")
        if not 0.0 <= self.new_user_reliability <= 1.0:
            raise ValueError("new_user_reliability must be in [0, 1]")


@dataclass(frozen=True, slots=True)
class DemonstrationConfig:
    green_conf: float = 0.75
    green_agree: float = 0.80
    red_conf: float = 0.40
    red_agree: float = 0.50
    overlay_opacity: float = 0.40
    max_displayed_labels: int = 5

    def __post_init__(self) -> None:
        if not self.red_conf < self.green_conf:
            raise ValueError("red_conf must be below green_conf")
        if not self.red_agree < self.green_agree:
            raise ValueError("red_agree must be below green_agree")
        if not 0.0 < self.overlay_opacity <= 1.0:
            raise ValueError("overlay_opacity must be in (0, 1]")
        if self.max_displayed_labels < 1:
            raise ValueError("max_displayed_labels must be >= 1")


@dataclass(frozen=True, slots=True)
class ClusterConfig:
    k: int = 5
    embedding_dim: int = 384
    max_iterations: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.embedding_dim < 1:
            raise ValueError("embedding_dim must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


def _require(record: Mapping[str, Any], key: str) -> Any:
    if key not in record or record[key] is None:
        raise InvalidRecord(f"missing field: {key}")
    return record[key]


def _as_float(record: Mapping[str, Any], key: str) -> float:
    v = _require(record, key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InvalidRecord(f"field {key} must be a number, got {v!r}")
    return float(v)


def validate_annotation(
    draft: Mapping[str, Any] | Annotation,
    video: VideoMeta | None,
) -> Annotation:
    """Normalize an untrusted annotation draft into a validated Annotation.

    ``draft`` is a canonical record mapping (an already-built Annotation is
    re-serialized first, which makes normalization idempotent). Confidence is
    mapped from the external 0-100 scale to [0, 1]. Out-of-range coordinates
    are rejected, never clamped; the one exception is a temporal overshoot of
    at most ``TEMPORAL_CLIP_TOLERANCE`` seconds past the video bounds, which
    is clipped.
    """
    if isinstance(draft, Annotation):
        draft = draft.to_record()

    if video is None:
        raise UnknownVideo("annotation references an unknown video")
    video_id = _require(draft, "video_id")
    if video_id != video.video_id:
        raise UnknownVideo(
            f"record video_id {video_id!r} does not match {video.video_id!r}")

    ann_id = str(_require(draft, "id"))
    user_id = str(_require(draft, "user_id"))
    if not ann_id or not user_id:
        raise InvalidRecord("id and user_id must be non-empty")

    confidence_pct = _as_float(draft, "confidence")
    if not 0.0 <= confidence_pct <= 100.0:
        raise ConfidenceOutOfRange(
            f"confidence {confidence_pct!r} outside 0-100")

    label = make_label(str(_require(draft, "label_kind")),
                       str(_require(draft, "label_value")))

    reason = draft.get("reason")
    if reason is not None:
        if not isinstance(reason, str):
            raise InvalidRecord("reason must be a string or null")
        reason = reason.strip() or None
        if reason is not None and len(reason) > MAX_REASON_LEN:
            raise InvalidRecord(
                f"reason longer than {MAX_REASON_LEN} characters")

    submitted_at = _require(draft, "submitted_at")
    if isinstance(submitted_at, bool) or not isinstance(submitted_at, int):
        raise InvalidRecord("submitted_at must be integer milliseconds")
    if submitted_at < 0:
        raise InvalidRecord("submitted_at must be >= 0")

    t_start = _as_float(draft, "t_start")
    t_end = _as_float(draft, "t_end")
    # Clip small temporal overshoot; anything larger is a caller error.
    if t_start < 0.0:
        if t_start < -TEMPORAL_CLIP_TOLERANCE:
            raise CoordinateOutOfRange(f"t_start={t_start!r} before video start")
        t_start = 0.0
    if t_end > video.duration:
        if t_end > video.duration + TEMPORAL_CLIP_TOLERANCE:
            raise CoordinateOutOfRange(
                f"t_end={t_end!r} beyond video duration {video.duration}")
        t_end = video.duration

    region = SpatioTemporalRegion(
        x1=_as_float(draft, "x1"), y1=_as_float(draft, "y1"),
        x2=_as_float(draft, "x2"), y2=_as_float(draft, "y2"),
        t_start=t_start, t_end=t_end,
    )
    region.validate()
    if region.t_end > video.duration:
        raise CoordinateOutOfRange(
            f"region ends at {region.t_end} beyond duration {video.duration}")

    return Annotation(
        id=ann_id,
        video_id=video_id,
        user_id=user_id,
        region=region,
        label=label,
        confidence=confidence_pct / 100.0,
        reason=reason,
        submitted_at=submitted_at,
    )
