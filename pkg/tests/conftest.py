"""Shared fixtures and record factories for the test suite."""
from __future__ import annotations

from typing import Any

import pytest

from crowdmark import (
    Annotation,
    Label,
    SpatioTemporalRegion,
    VideoMeta,
    validate_annotation,
)


def make_record(**overrides: Any) -> dict[str, Any]:
    """A fully valid canonical annotation record, with overrides."""
    rec: dict[str, Any] = {
        "id": "a-1",
        "video_id": "v-1",
        "user_id": "u-1",
        "x1": 0.1, "y1": 0.2, "x2": 0.6, "y2": 0.7,
        "t_start": 1.0, "t_end": 4.0,
        "label_kind": "predefined",
        "label_value": "blurry",
        "confidence": 80.0,
        "reason": "edges shimmer around the jawline",
        "submitted_at": 1_700_000_000_000,
    }
    rec.update(overrides)
    return rec


def make_annotation(**overrides: Any) -> Annotation:
    """A validated Annotation built from make_record overrides."""
    rec = make_record(**overrides)
    video = VideoMeta(video_id=rec["video_id"], duration=30.0)
    return validate_annotation(rec, video)


def region(x1: float, y1: float, x2: float, y2: float,
           t0: float, t1: float) -> SpatioTemporalRegion:
    return SpatioTemporalRegion(x1, y1, x2, y2, t0, t1)


def ann(aid: str, box: tuple[float, float, float, float, float, float],
        label: Label, conf: float, *, user: str | None = None,
        video: str = "v", when: int = 0,
        reason: str | None = None) -> Annotation:
    """Directly construct a validated-shape Annotation for engine tests."""
    return Annotation(
        id=aid, video_id=video, user_id=user or f"user-{aid}",
        region=SpatioTemporalRegion(*box),
        label=label, confidence=conf, reason=reason, submitted_at=when,
    )


@pytest.fixture
def video() -> VideoMeta:
    return VideoMeta(video_id="v-1", duration=30.0)
