"""Walk a handful of hand-written annotations through aggregation and the
display pipeline: merge overlapping boxes, score labels, pick a dominant
label per region, then render overlay, hover, and detail payloads.

Run:  python3 demos/01_aggregate_annotations.py
"""
from __future__ import annotations

import json

from crowdmark import (
    AggregationConfig,
    DemonstrationConfig,
    RationaleClusterer,
    VideoMeta,
    aggregate,
    compute_consensus,
    detail,
    histories_from_annotations,
    hover,
    overlays_at,
    validate_annotation,
)


def record(aid, user, box, label, conf, reason=None, *, kind="predefined", at=0):
    x1, y1, x2, y2, t1, t2 = box
    return {
        "id": aid, "video_id": "clip-7", "user_id": user,
        "x1": x1, "y1": y1, "x2": x2, "y2": y2,
        "t_start": t1, "t_end": t2,
        "label_kind": kind, "label_value": label,
        "confidence": conf, "reason": reason,
        "submitted_at": 1_700_000_000_000 + at,
    }


def main() -> None:
    # Three users box the same shimmering jawline; a fourth flags an
    # unrelated patch in the corner. Confidence is a 0-100 percentage.
    drafts = [
        record("a-1", "ana", (0.30, 0.40, 0.60, 0.70, 2.0, 6.0),
               "blurry", 90, "jawline shimmers when she turns", at=0),
        record("a-2", "ben", (0.32, 0.38, 0.62, 0.68, 2.5, 6.5),
               "blurry", 70, "soft smear under the chin", at=1),
        record("a-3", "cam", (0.28, 0.42, 0.58, 0.72, 1.5, 5.5),
               "melting", 80, "skin drips into the collar", at=2),
        record("a-4", "dee", (0.80, 0.05, 0.95, 0.20, 2.0, 6.0),
               "odd shadow", 55, kind="custom", at=3),
    ]
    video = VideoMeta("clip-7", duration=10.0)
    annotations = [validate_annotation(d, video) for d in drafts]

    # Reliability weights come from each user's past confidence record.
    histories = histories_from_annotations(annotations)

    # The clusterer groups rationale texts into themes for the detail view.
    agg = aggregate(annotations, histories, AggregationConfig(),
                    clusterer=RationaleClusterer())
    print(f"{len(annotations)} annotations merged into "
          f"{len(agg.regions)} regions\n")

    demo_cfg = DemonstrationConfig()
    for region in agg.regions:
        r = region.region
        print(f"region {region.region_id}: "
              f"({r.x1:.2f},{r.y1:.2f})-({r.x2:.2f},{r.y2:.2f}) "
              f"t=[{r.t_start:.1f},{r.t_end:.1f}] "
              f"members={region.member_count}")
        for label, info in sorted(region.agg_info.items(),
                                  key=lambda kv: -kv[1].score):
            print(f"  {label.value:<12} score={info.score:.4f} "
                  f"conf={info.conf:.2f} support={info.support_count}")
        dom = region.dominant_label
        state = compute_consensus(region, demo_cfg)
        print(f"  dominant: {dom.value}  consensus: "
              f"confidence={state.mean_confidence:.2f} "
              f"agreement={state.agreement:.2f} -> {state.color}\n")

    # What a viewer sees at t=3s: translucent rectangles, labels hidden.
    print("overlays at t=3.0:")
    print(json.dumps(overlays_at(agg, 3.0, demo_cfg), indent=2))

    # Hovering region 0 reveals the ranked label list (at most five).
    print("\nhover payload, region 0:")
    print(json.dumps(hover(agg.regions[0], demo_cfg), indent=2))

    # Clicking a label shows its rationales.
    print("\ndetail payload, region 0 / blurry:")
    print(json.dumps(detail(agg.regions[0], "blurry"), indent=2))


if __name__ == "__main__":
    main()
