"""Video-level classification, detection metrics, and convergence curves.

A video is called fake when any annotation (or any aggregated region,
depending on the configured basis) carries confidence at or above the
decision threshold; a video nobody annotated is called real. Metrics
treat fake as the positive class. The sensitivity sweep re-scores the
same stream across a threshold grid, and the convergence series tracks
how closely each step's new annotations land on the regions aggregated
from everything before them.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .aggregation import AggregatedRegionSet, iou3d, merge_annotations
from .errors import MissingGroundTruth
from .model import AggregationConfig, Annotation

SWEEP_START = 0.60
SWEEP_STOP = 1.00
SWEEP_STEP = 0.05


@dataclass(frozen=True)
class ClassificationConfig:
    confidence_threshold: float = 0.80
    # "per-annotation": raw member confidences decide.
    # "per-aggregated-region": each region's dominant-label aggregate
    # confidence decides.
    decision_basis: str = "per-annotation"

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence_threshold <= 1.0:
            raise ValueError(
                f"confidence_threshold must be in [0, 1], got {self.confidence_threshold}")
        if self.decision_basis not in ("per-annotation", "per-aggregated-region"):
            raise ValueError(f"unknown decision basis {self.decision_basis!r}")


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
        }


def classify_video(
    video_annotations: Sequence[Annotation] | AggregatedRegionSet,
    cfg: ClassificationConfig | None = None,
) -> bool:
    """True means the video is called fake. Empty input means real."""
    cfg = cfg or ClassificationConfig()
    if isinstance(video_annotations, AggregatedRegionSet):
        if cfg.decision_basis == "per-aggregated-region":
            for region in video_annotations.regions:
                label = region.dominant_label
                if label is None:
                    continue
                if region.agg_info[label].conf >= cfg.confidence_threshold:
                    return True
            return False
        members = [a for r in video_annotations.regions for a in r.members]
        return any(a.confidence >= cfg.confidence_threshold for a in members)
    return any(a.confidence >= cfg.confidence_threshold for a in video_annotations)


def prf(predictions: Mapping[str, bool], truth: Mapping[str, bool]) -> MetricsReport:
    """Precision/recall/F1 with fake as positive. Zero predicted positives
    gives precision 0; zero actual positives gives recall 0."""
    tp = fp = tn = fn = 0
    for video_id, predicted in predictions.items():
        if video_id not in truth:
            raise MissingGroundTruth(f"no ground truth for video {video_id!r}")
        actual = truth[video_id]
        if predicted and actual:
            tp += 1
        elif predicted and not actual:
            fp += 1
        elif not predicted and actual:
            fn += 1
        else:
            tn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return MetricsReport(precision, recall, f1, tp, fp, tn, fn)


def default_thresholds() -> list[float]:
    out = []
    t = SWEEP_START
    i = 0
    while True:
        t = round(SWEEP_START + i * SWEEP_STEP, 2)
        if t > SWEEP_STOP + 1e-9:
            break
        out.append(t)
        i += 1
    return out


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    # Lowest threshold attaining the best F1.
    peak_threshold: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("threshold,precision,recall,f1\n")
        for row in self.rows:
            buf.write(f"{row.threshold:.2f},{row.precision:.6f},"
                      f"{row.recall:.6f},{row.f1:.6f}\n")
        return buf.getvalue()


def sensitivity_sweep(
    dataset: Mapping[str, Sequence[Annotation]],
    truth: Mapping[str, bool],
    thresholds: Sequence[float] | None = None,
    decision_basis: str = "per-annotation",
) -> SweepResult:
    """Re-run video classification across a threshold grid.

    dataset maps every video id (annotated or not) to its annotations;
    videos absent from dataset but present in truth count as unannotated.
    """
    thresholds = list(thresholds) if thresholds is not None else default_thresholds()
    all_videos = set(truth)
    rows = []
    for t in thresholds:
        cfg = ClassificationConfig(confidence_threshold=t, decision_basis=decision_basis)
        predictions = {
            vid: classify_video(dataset.get(vid, ()), cfg) for vid in all_videos
        }
        m = prf(predictions, truth)
        rows.append(SweepRow(t, m.precision, m.recall, m.f1))
    best = max(rows, key=lambda r: (r.f1, -r.threshold))
    return SweepResult(tuple(rows), best.threshold)


@dataclass(frozen=True)
class ConvergencePoint:
    step: int
    # Mean over the step's annotations of the best IoU against any region
    # aggregated from all earlier steps; 0 when nothing came before.
    mean_iou: float
    # Mean spatial area (relative units) of the step's boxes.
    mean_area: float


def build_prior_sets(
    steps: Sequence[Sequence[Annotation]],
    cfg: AggregationConfig | None = None,
) -> list[dict[str, AggregatedRegionSet]]:
    """For each step, the per-video region sets merged from every strictly
    earlier step's annotations."""
    cfg = cfg or AggregationConfig()
    priors: list[dict[str, AggregatedRegionSet]] = []
    seen: dict[str, list[Annotation]] = {}
    for step in steps:
        priors.append({
            vid: merge_annotations(anns, cfg) for vid, anns in seen.items()
        })
        for a in step:
            seen.setdefault(a.video_id, []).append(a)
    return priors


def convergence_series(
    steps: Sequence[Sequence[Annotation]],
    prior_sets: Sequence[Mapping[str, AggregatedRegionSet]],
) -> list[ConvergencePoint]:
    if len(steps) != len(prior_sets):
        raise ValueError("steps and prior_sets must have equal length")
    points = []
    for i, step in enumerate(steps):
        ious = []
        areas = []
        for a in step:
            prior = prior_sets[i].get(a.video_id)
            if prior is None or not prior.regions:
                ious.append(0.0)
            else:
                ious.append(max(iou3d(a.region, r.region) for r in prior.regions))
            areas.append(a.region.area)
        mean_iou = sum(ious) / len(ious) if ious else 0.0
        mean_area = sum(areas) / len(areas) if areas else 0.0
        points.append(ConvergencePoint(i, mean_iou, mean_area))
    return points


def convergence_csv(points: Iterable[ConvergencePoint]) -> str:
    buf = io.StringIO()
    buf.write("step,mean_iou,mean_area\n")
    for p in points:
        buf.write(f"{p.step},{p.mean_iou:.6f},{p.mean_area:.6f}\n")
    return buf.getvalue()
