"""Confidence-weighted aggregation of spatio-temporal annotations.

Phase 1 greedily merges annotations, in descending confidence order, into
aggregated regions whenever the 3D IoU against a region's running
confidence-weighted box clears a threshold. Phase 2 computes per-label
weighted scores, top-T confidences, and clustered rationale summaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Protocol, Sequence

from .errors import DegenerateRegion, EmptyMemberList, MixedVideoInput
from .model import AggregationConfig, Annotation, Label, SpatioTemporalRegion, UserHistory


class ReasonClusterer(Protocol):
    def summarize(self, texts: Sequence[str]) -> list["ClusterSummary"]: ...


@dataclass(frozen=True, slots=True)
class ClusterSummary:
    """One thematic cluster of rationales, represented by its medoid text."""

    representative_text: str
    member_count: int
    cluster_index: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "representative_text": self.representative_text,
            "member_count": self.member_count,
            "cluster_index": self.cluster_index,
        }


@dataclass(frozen=True, slots=True)
class LabelPair:
    """One annotation's contribution to a label bucket."""

    user_id: str
    confidence: float
    reason: str | None


@dataclass(slots=True)
class LabelAggregate:
    score: float  # mean of confidence x annotator reliability
    conf: float   # mean of the top-T member confidences
    reason_summary: list[ClusterSummary]
    support_count: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "score": self.score,
            "conf": self.conf,
            "support_count": self.support_count,
            "reason_summary": [s.to_dict() for s in self.reason_summary],
        }


@dataclass(slots=True)
class AggregatedRegion:
    """A merged cluster of annotations with a running weighted region."""

    region_id: int
    region: SpatioTemporalRegion
    members: list[Annotation]
    label_data: dict[Label, list[LabelPair]]
    agg_info: dict[Label, LabelAggregate] = field(default_factory=dict)
    dominant_label: Label | None = None

    @property
    def annotation_ids(self) -> list[str]:
        return [a.id for a in self.members]

    @property
    def member_count(self) -> int:
        return len(self.members)

    def to_dict(self) -> dict[str, Any]:
        """Canonical form: stable field order, labels in insertion order."""
        return {
            "region_id": self.region_id,
            "region": self.region.to_dict(),
            "annotations": self.annotation_ids,
            "label_data": [
                {
                    "label": label.to_dict(),
                    "pairs": [
                        {"user_id": p.user_id, "confidence": p.confidence,
                         "reason": p.reason}
                        for p in pairs
                    ],
                }
                for label, pairs in self.label_data.items()
            ],
            "agg_info": [
                {"label": label.to_dict(), **info.to_dict()}
                for label, info in self.agg_info.items()
            ],
            "dominant_label": (self.dominant_label.to_dict()
                               if self.dominant_label else None),
        }


@dataclass(slots=True)
class AggregatedRegionSet:
    video_id: str
    regions: list[AggregatedRegion]
    input_annotation_count: int
    computed_at: int  # max member submitted_at; keeps serialization replayable

    def to_dict(self) -> dict[str, Any]:
        return {
            "video_id": self.video_id,
            "computed_at": self.computed_at,
            "input_annotation_count": self.input_annotation_count,
            "regions": [r.to_dict() for r in self.regions],
        }


def iou3d(a: SpatioTemporalRegion, b: SpatioTemporalRegion) -> float:
    """3D intersection-over-union over the (x, y, t) box product."""
    va = a.volume
    vb = b.volume
    if va <= 0.0 or vb <= 0.0:
        raise DegenerateRegion("iou3d needs positive-volume regions")
    ix = min(a.x2, b.x2) - max(a.x1, b.x1)
    if ix <= 0.0:
        return 0.0
    iy = min(a.y2, b.y2) - max(a.y1, b.y1)
    if iy <= 0.0:
        return 0.0
    it = min(a.t_end, b.t_end) - max(a.t_start, b.t_start)
    if it <= 0.0:
        return 0.0
    inter = ix * iy * it
    return inter / (va + vb - inter)


def conf_weighted_avg(
    members: Sequence[tuple[SpatioTemporalRegion, float]],
) -> SpatioTemporalRegion:
    """Confidence-weighted mean of regions, coordinate by coordinate.

    All-zero confidences fall back to the unweighted mean so the result is
    always defined.
    """
    if not members:
        raise EmptyMemberList("cannot average zero regions")
    first = members[0][0]
    if all(r == first for r, _ in members):
        # Identical points: the weighted mean is the point itself. Computing
        # it arithmetically would drift by an ulp and break exactness.
        return first
    total = 0.0
    for _, w in members:
        total += w
    x1 = y1 = x2 = y2 = t1 = t2 = 0.0
    if total <= 0.0:
        n = float(len(members))
        for r, _ in members:
            x1 += r.x1; y1 += r.y1; x2 += r.x2; y2 += r.y2
            t1 += r.t_start; t2 += r.t_end
        return SpatioTemporalRegion(x1 / n, y1 / n, x2 / n, y2 / n, t1 / n, t2 / n)
    for r, w in members:
        x1 += r.x1 * w; y1 += r.y1 * w; x2 += r.x2 * w; y2 += r.y2 * w
        t1 += r.t_start * w; t2 += r.t_end * w
    return SpatioTemporalRegion(
        x1 / total, y1 / total, x2 / total, y2 / total, t1 / total, t2 / total)


def _sorted_for_merge(annotations: Iterable[Annotation]) -> list[Annotation]:
    # Descending confidence; ties by submission time then id for determinism.
    return sorted(annotations, key=lambda a: (-a.confidence, a.submitted_at, a.id))


def merge_annotations(
    annotations: Sequence[Annotation],
    cfg: AggregationConfig | None = None,
) -> AggregatedRegionSet:
    """Phase 1: greedy confidence-ordered merging by 3D IoU.

    Each annotation joins the first existing region (in creation order) whose
    running region overlaps it at ``iou_thresh`` or better, after which that
    region's box is recomputed as the confidence-weighted average of all its
    members; otherwise it seeds a new region.
    """
    cfg = cfg or AggregationConfig()
    video_ids = {a.video_id for a in annotations}
    if len(video_ids) > 1:
        raise MixedVideoInput(f"annotations span videos: {sorted(video_ids)}")
    video_id = video_ids.pop() if video_ids else ""

    regions: list[AggregatedRegion] = []
    thresh = cfg.iou_thresh
    for a in _sorted_for_merge(annotations):
        merged = False
        for r in regions:
            if iou3d(a.region, r.region) >= thresh:
                r.members.append(a)
                r.label_data.setdefault(a.label, []).append(
                    LabelPair(a.user_id, a.confidence, a.reason))
                r.region = conf_weighted_avg(
                    [(m.region, m.confidence) for m in r.members])
                merged = True
                break
        if not merged:
            regions.append(AggregatedRegion(
                region_id=len(regions),
                region=a.region,
                members=[a],
                label_data={a.label: [LabelPair(a.user_id, a.confidence, a.reason)]},
            ))

    computed_at = max((a.submitted_at for a in annotations), default=0)
    return AggregatedRegionSet(
        video_id=video_id,
        regions=regions,
        input_annotation_count=len(annotations),
        computed_at=computed_at,
    )


def reliability(hist: UserHistory | None, cfg: AggregationConfig) -> float:
    """Mean of a user's past confidences; neutral prior for new users."""
    if hist is None or not hist.past_confidences:
        return cfg.new_user_reliability
    return sum(hist.past_confidences) / len(hist.past_confidences)


def compute_label_aggregates(
    region: AggregatedRegion,
    histories: Mapping[str, UserHistory],
    cfg: AggregationConfig,
    clusterer: ReasonClusterer | None = None,
) -> AggregatedRegion:
    """Phase 2: fill ``agg_info`` for every label bucket of a region."""
    for label, pairs in region.label_data.items():
        n = len(pairs)
        weighted = 0.0
        for p in pairs:
            weighted += p.confidence * reliability(histories.get(p.user_id), cfg)
        confs = sorted((p.confidence for p in pairs), reverse=True)
        top = confs[:cfg.top_t]
        reasons = [p.reason for p in pairs if p.reason]
        if reasons and clusterer is not None:
            summary = clusterer.summarize(reasons)
        else:
            summary = []
        region.agg_info[label] = LabelAggregate(
            score=weighted / n,
            conf=sum(top) / len(top),
            reason_summary=summary,
            support_count=n,
        )
    region.dominant_label = dominant_label(region)
    return region


def label_rank_key(label: Label, info: LabelAggregate) -> tuple:
    """Sort key shared by dominant-label choice and hover ordering:
    higher score first, then larger support, then lexicographic value."""
    return (-info.score, -info.support_count, label.value, label.kind)


def dominant_label(region: AggregatedRegion) -> Label | None:
    if not region.agg_info:
        return None
    return min(region.agg_info,
               key=lambda lb: label_rank_key(lb, region.agg_info[lb]))


def aggregate(
    annotations: Sequence[Annotation],
    histories: Mapping[str, UserHistory],
    cfg: AggregationConfig | None = None,
    clusterer: ReasonClusterer | None = None,
) -> AggregatedRegionSet:
    """The full pipeline: merge, then per-label aggregate attributes."""
    cfg = cfg or AggregationConfig()
    result = merge_annotations(annotations, cfg)
    for region in result.regions:
        compute_label_aggregates(region, histories, cfg, clusterer)
    return result


def histories_from_annotations(
    annotations: Iterable[Annotation],
    prior: Mapping[str, UserHistory] | None = None,
) -> dict[str, UserHistory]:
    """Build per-user confidence histories in submission order."""
    out: dict[str, UserHistory] = {}
    if prior:
        out = {uid: UserHistory(uid, list(h.past_confidences))
               for uid, h in prior.items()}
    for a in sorted(annotations, key=lambda a: (a.submitted_at, a.id)):
        out.setdefault(a.user_id, UserHistory(a.user_id)).append(a.confidence)
    return out
