"""Viewer-facing projections of aggregated regions.

Turns an aggregated region set into what a viewer sees: translucent
color-coded overlay rectangles at a time point, a ranked label list on
hover, and per-label rationale detail on demand. Colors encode consensus
strength; labels stay hidden on the initial overlay so the box itself is
the first cue.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .aggregation import AggregatedRegion, AggregatedRegionSet, label_rank_key
from .errors import (
    CoordinateOutOfRange,
    EmptyMemberList,
    UnknownLabel,
    UnknownRegion,
)
from .model import DemonstrationConfig, Label

GREEN = "green"
ORANGE = "orange"
RED = "red"

COLOR_HEX = {
    GREEN: "#00FF00",
    ORANGE: "#FFA500",
    RED: "#FF0000",
}


@dataclass(frozen=True)
class ConsensusState:
    """Agreement snapshot for one region: mean member confidence, share of
    members on the most frequent label, and the resulting color."""

    mean_confidence: float
    agreement: float
    color: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean_confidence": self.mean_confidence,
            "agreement": self.agreement,
            "color": self.color,
            "color_hex": COLOR_HEX[self.color],
        }


def color_state(mean_confidence: float, agreement: float,
                cfg: DemonstrationConfig | None = None) -> str:
    """Map (confidence, agreement) to a traffic-light color.

    Red needs only one floor violation; green needs both ceilings met;
    everything between is orange. The two rules cannot both fire.
    """
    cfg = cfg or DemonstrationConfig()
    if mean_confidence <= cfg.red_conf or agreement <= cfg.red_agree:
        return RED
    if mean_confidence >= cfg.green_conf and agreement >= cfg.green_agree:
        return GREEN
    return ORANGE


def compute_consensus(region: AggregatedRegion,
                      cfg: DemonstrationConfig | None = None) -> ConsensusState:
    cfg = cfg or DemonstrationConfig()
    if not region.members:
        raise EmptyMemberList(f"region {region.region_id} has no members")
    confs = [a.confidence for a in region.members]
    mean_conf = sum(confs) / len(confs)
    counts: dict[Label, int] = {}
    for a in region.members:
        counts[a.label] = counts.get(a.label, 0) + 1
    agreement = max(counts.values()) / len(region.members)
    return ConsensusState(mean_conf, agreement, color_state(mean_conf, agreement, cfg))


def overlays_at(region_set: AggregatedRegionSet, t: float,
                cfg: DemonstrationConfig | None = None) -> list[dict[str, Any]]:
    """Overlay rectangles for regions active at time t.

    A region is active on the half-open interval [t_start, t_end): a box
    that ends at t is no longer drawn at t. Labels are withheld here; the
    colored box is the initial cue and labels appear only on hover.
    """
    cfg = cfg or DemonstrationConfig()
    if t < 0:
        raise CoordinateOutOfRange(f"time point must be non-negative, got {t}")
    items = []
    for region in region_set.regions:
        r = region.region
        if not (r.t_start <= t < r.t_end):
            continue
        consensus = compute_consensus(region, cfg)
        items.append({
            "region_id": region.region_id,
            "x1": r.x1, "y1": r.y1, "x2": r.x2, "y2": r.y2,
            "t_start": r.t_start, "t_end": r.t_end,
            "color": consensus.color,
            "color_hex": COLOR_HEX[consensus.color],
            "opacity": cfg.overlay_opacity,
            "labels_hidden": True,
        })
    return items


def find_region(region_set: AggregatedRegionSet, region_id: int) -> AggregatedRegion:
    for region in region_set.regions:
        if region.region_id == region_id:
            return region
    raise UnknownRegion(f"no aggregated region {region_id}")


def hover(region: AggregatedRegion,
          cfg: DemonstrationConfig | None = None) -> dict[str, Any]:
    """Ranked label list for one region: top labels by aggregate score,
    highest first, capped at the display limit. No annotator identities."""
    cfg = cfg or DemonstrationConfig()
    ranked = sorted(region.agg_info.items(),
                    key=lambda kv: label_rank_key(kv[0], kv[1]))
    entries = []
    for label, info in ranked[:cfg.max_displayed_labels]:
        entries.append({
            "label": label.to_dict(),
            "score": info.score,
            "confidence_pct": info.conf * 100.0,
            "support_count": info.support_count,
        })
    return {"region_id": region.region_id, "labels": entries}


def detail(region: AggregatedRegion, label: Label | str) -> dict[str, Any]:
    """Expanded view of one label on one region: aggregate confidence,
    support, and the clustered rationale summaries."""
    if isinstance(label, str):
        matches = [l for l in region.agg_info if l.value == label]
        if not matches:
            raise UnknownLabel(
                f"region {region.region_id} has no label {label!r}")
        label = matches[0]
    info = region.agg_info.get(label)
    if info is None:
        raise UnknownLabel(
            f"region {region.region_id} has no label {label.value!r}")
    return {
        "region_id": region.region_id,
        "label": label.to_dict(),
        "score": info.score,
        "confidence_pct": info.conf * 100.0,
        "support_count": info.support_count,
        "rationales": [
            {"text": s.representative_text, "member_count": s.member_count}
            for s in info.reason_summary
        ],
    }
