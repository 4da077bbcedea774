"""Validation and normalization of the core record types."""
from __future__ import annotations

import pytest

from crowdmark import (
    Annotation,
    ConfidenceOutOfRange,
    CoordinateOutOfRange,
    EmptyCustomLabel,
    GroundTruth,
    InvalidRecord,
    Label,
    PREDEFINED_LABELS,
    RECORD_FIELDS,
    RegionDegenerate,
    SpatioTemporalRegion,
    UnknownVideo,
    VideoMeta,
    make_label,
    taxonomy,
    validate_annotation,
)

from conftest import make_record


class TestTaxonomy:
    def test_thirteen_predefined_labels_in_order(self):
        assert PREDEFINED_LABELS == (
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
        assert [lb.value for lb in taxonomy()] == list(PREDEFINED_LABELS)
        assert all(lb.kind == "predefined" for lb in taxonomy())

    def test_make_label_predefined(self):
        lb = make_label("predefined", "mismatch")
        assert lb == Label("predefined", "mismatch")

    def test_make_label_rejects_unknown_predefined(self):
        with pytest.raises(InvalidRecord):
            make_label("predefined", "wobbly")

    def test_custom_label_trimmed(self):
        assert make_label("custom", "  eye flicker  ").value == "eye flicker"

    def test_custom_label_empty_after_trim(self):
        with pytest.raises(EmptyCustomLabel):
            make_label("custom", "   ")

    def test_custom_label_length_cap(self):
        make_label("custom", "x" * 64)
        with pytest.raises(InvalidRecord):
            make_label("custom", "x" * 65)

    def test_custom_matching_predefined_folds(self):
        # One value must never name two distinct labels.
        lb = make_label("custom", " blurry ")
        assert lb == Label("predefined", "blurry")

    def test_unknown_kind(self):
        with pytest.raises(InvalidRecord):
            make_label("freeform", "anything")


class TestRegion:
    def test_volume_and_area(self):
        r = SpatioTemporalRegion(0.0, 0.0, 0.5, 0.5, 0.0, 4.0)
        assert r.volume == pytest.approx(0.25 * 4.0)
        assert r.area == pytest.approx(0.25)

    def test_degenerate_rejected(self):
        for bad in [
            SpatioTemporalRegion(0.5, 0.0, 0.5, 1.0, 0.0, 1.0),  # zero width
            SpatioTemporalRegion(0.0, 0.3, 1.0, 0.3, 0.0, 1.0),  # zero height
            SpatioTemporalRegion(0.0, 0.0, 1.0, 1.0, 2.0, 2.0),  # zero span
            SpatioTemporalRegion(0.6, 0.0, 0.4, 1.0, 0.0, 1.0),  # inverted
        ]:
            with pytest.raises(RegionDegenerate):
                bad.validate()

    def test_out_of_range_rejected(self):
        with pytest.raises(CoordinateOutOfRange):
            SpatioTemporalRegion(-0.01, 0.0, 0.5, 0.5, 0.0, 1.0).validate()
        with pytest.raises(CoordinateOutOfRange):
            SpatioTemporalRegion(0.0, 0.0, 1.01, 0.5, 0.0, 1.0).validate()
        with pytest.raises(CoordinateOutOfRange):
            SpatioTemporalRegion(0.0, 0.0, 0.5, 0.5, -1.0, 1.0).validate()
        with pytest.raises(CoordinateOutOfRange):
            SpatioTemporalRegion(0.0, float("nan"), 0.5, 0.5, 0.0, 1.0).validate()

    def test_to_dict_round_trip(self):
        r = SpatioTemporalRegion(0.1, 0.2, 0.3, 0.4, 5.0, 6.0)
        assert SpatioTemporalRegion(**r.to_dict()) == r


class TestValidateAnnotation:
    def test_happy_path_scales_confidence(self, video):
        a = validate_annotation(make_record(confidence=85.0), video)
        assert a.confidence == pytest.approx(0.85)
        assert a.label == Label("predefined", "blurry")
        assert a.region.t_start == 1.0

    def test_record_fields_round_trip(self, video):
        rec = make_record()
        a = validate_annotation(rec, video)
        out = a.to_record()
        assert tuple(out) == RECORD_FIELDS
        assert out == rec

    def test_idempotent(self, video):
        a = validate_annotation(make_record(confidence=77.7), video)
        again = validate_annotation(a, video)
        assert again == a
        assert again.to_record() == a.to_record()

    def test_confidence_bounds(self, video):
        validate_annotation(make_record(confidence=0.0), video)
        validate_annotation(make_record(confidence=100.0), video)
        for bad in (-0.001, 100.001, 500):
            with pytest.raises(ConfidenceOutOfRange):
                validate_annotation(make_record(confidence=bad), video)

    def test_unknown_video(self):
        with pytest.raises(UnknownVideo):
            validate_annotation(make_record(), None)
        with pytest.raises(UnknownVideo):
            validate_annotation(
                make_record(video_id="other"),
                VideoMeta(video_id="v-1", duration=30.0))

    def test_missing_fields(self, video):
        for key in ("id", "user_id", "x1", "confidence", "submitted_at",
                    "label_kind", "label_value"):
            rec = make_record()
            del rec[key]
            with pytest.raises(InvalidRecord):
                validate_annotation(rec, video)

    def test_null_reason_allowed_and_blank_folds_to_null(self, video):
        assert validate_annotation(make_record(reason=None), video).reason is None
        assert validate_annotation(make_record(reason="   "), video).reason is None

    def test_reason_length_cap(self, video):
        ok = validate_annotation(make_record(reason="r" * 2000), video)
        assert len(ok.reason) == 2000
        with pytest.raises(InvalidRecord):
            validate_annotation(make_record(reason="r" * 2001), video)

    def test_temporal_overshoot_clipped_within_tolerance(self, video):
        a = validate_annotation(
            make_record(t_start=-0.04, t_end=30.03), video)
        assert a.region.t_start == 0.0
        assert a.region.t_end == 30.0

    def test_temporal_overshoot_beyond_tolerance_rejected(self, video):
        with pytest.raises(CoordinateOutOfRange):
            validate_annotation(make_record(t_end=30.06), video)
        with pytest.raises(CoordinateOutOfRange):
            validate_annotation(make_record(t_start=-0.06), video)

    def test_spatial_out_of_range_rejected_not_clamped(self, video):
        with pytest.raises(CoordinateOutOfRange):
            validate_annotation(make_record(x2=1.2), video)

    def test_degenerate_box_rejected(self, video):
        with pytest.raises(RegionDegenerate):
            validate_annotation(make_record(x1=0.5, x2=0.5), video)

    def test_submitted_at_must_be_integer_ms(self, video):
        with pytest.raises(InvalidRecord):
            validate_annotation(make_record(submitted_at=1.5), video)
        with pytest.raises(InvalidRecord):
            validate_annotation(make_record(submitted_at=-5), video)
        with pytest.raises(InvalidRecord):
            validate_annotation(make_record(submitted_at=True), video)

    def test_confidence_wire_precision(self, video):
        # Fractions that are not exactly representable in binary survive
        # one record round trip unchanged.
        for pct in (77.7, 0.1, 99.999, 33.333333):
            a = validate_annotation(make_record(confidence=pct), video)
            assert a.to_record()["confidence"] == pct


class TestMetaRoundTrips:
    def test_video_meta_round_trip(self):
        gt = GroundTruth(is_fake=True, artifacts=(
            _artifact(0.1, 0.1, 0.5, 0.5, 0.0, 10.0),))
        meta = VideoMeta(video_id="v9", duration=30.0, ground_truth=gt)
        assert VideoMeta.from_dict(meta.to_dict()) == meta

    def test_video_meta_without_truth(self):
        meta = VideoMeta(video_id="v0", duration=12.5)
        assert VideoMeta.from_dict(meta.to_dict()) == meta

    def test_video_meta_rejects_bad_duration(self):
        with pytest.raises(InvalidRecord):
            VideoMeta(video_id="v", duration=0.0).validate()
        with pytest.raises(InvalidRecord):
            VideoMeta.from_dict({"video_id": "v", "duration": -3.0})

    def test_truth_region_must_fit_duration(self):
        gt = GroundTruth(is_fake=True, artifacts=(
            _artifact(0.1, 0.1, 0.5, 0.5, 0.0, 31.0),))
        with pytest.raises(InvalidRecord):
            VideoMeta(video_id="v", duration=30.0, ground_truth=gt).validate()


def _artifact(x1, y1, x2, y2, t0, t1):
    from crowdmark import Artifact
    return Artifact(
        region=SpatioTemporalRegion(x1, y1, x2, y2, t0, t1),
        label=Label("predefined", "blurry"),
    )
