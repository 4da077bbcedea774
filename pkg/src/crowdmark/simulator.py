"""Synthetic videos, annotator populations, and baseline aggregators.

Videos here are metadata plus planted ground-truth geometry; no pixels.
Annotators are stochastic profiles (hit rate, confidence distribution,
localization noise, label confusion) that view a quota of videos per step
and emit canonical annotation records. Two baseline aggregators, greedy
non-maximum suppression and unweighted majority-vote merging, exist only
for comparison against confidence-weighted aggregation.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .aggregation import (
    AggregatedRegionSet,
    aggregate,
    histories_from_annotations,
    iou3d,
    merge_annotations,
)
from .errors import InvalidScenario, MissingGroundTruth
from .evaluation import ClassificationConfig, classify_video, prf
from .model import (
    AggregationConfig,
    Annotation,
    Artifact,
    GroundTruth,
    Label,
    SpatioTemporalRegion,
    VideoMeta,
    taxonomy,
    validate_annotation,
)

DAY_MS = 86_400_000


@dataclass(frozen=True)
class AnnotatorProfile:
    """Stochastic behavior of one synthetic annotator."""

    user_id: str
    hit_rate: float = 0.75
    false_alarm_rate: float = 0.05
    confidence_mean: float = 0.85
    confidence_std: float = 0.10
    spatial_noise_sigma: float = 0.05
    temporal_noise_sigma: float = 0.5
    label_accuracy: float = 0.8

    def __post_init__(self) -> None:
        for name in ("hit_rate", "false_alarm_rate", "confidence_mean",
                     "label_accuracy"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidScenario(f"{name} must be in [0, 1], got {v}")
        for name in ("confidence_std", "spatial_noise_sigma",
                     "temporal_noise_sigma"):
            v = getattr(self, name)
            if v < 0.0:
                raise InvalidScenario(f"{name} must be >= 0, got {v}")
        if not self.user_id:
            raise InvalidScenario("annotator user_id must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "user_id": self.user_id,
            "hit_rate": self.hit_rate,
            "false_alarm_rate": self.false_alarm_rate,
            "confidence_mean": self.confidence_mean,
            "confidence_std": self.confidence_std,
            "spatial_noise_sigma": self.spatial_noise_sigma,
            "temporal_noise_sigma": self.temporal_noise_sigma,
            "label_accuracy": self.label_accuracy,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "AnnotatorProfile":
        return cls(**dict(d))


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one synthetic run; the seed fixes everything."""

    seed: int = 0
    video_count: int = 60
    video_duration: float = 30.0
    fake_fraction: float = 0.5
    artifacts_per_fake: int = 1
    annotators: tuple[AnnotatorProfile, ...] = ()
    steps: int = 7
    per_step_quota: int = 10
    # Calibrated mode draws false-alarm confidence from its own, lower
    # distribution instead of the annotator's usual one.
    calibrated: bool = False
    false_alarm_confidence_mean: float = 0.55
    false_alarm_confidence_std: float = 0.15
    # Per-step decay multipliers; values < 1 shrink noise/padding over time.
    noise_decay: float = 1.0
    box_pad: float = 0.0
    pad_decay: float = 1.0
    # Optional explicit artifacts: video index -> list of artifact dicts
    # ({"region": {...}, "label": {...}}). Overrides random planting there.
    planted: Mapping[int, Sequence[Mapping[str, Any]]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.video_count < 1:
            raise InvalidScenario("video_count must be >= 1")
        if self.video_duration <= 0:
            raise InvalidScenario("video_duration must be > 0")
        if not 0.0 <= self.fake_fraction <= 1.0:
            raise InvalidScenario("fake_fraction must be in [0, 1]")
        if self.artifacts_per_fake < 1:
            raise InvalidScenario("artifacts_per_fake must be >= 1")
        if not self.annotators:
            raise InvalidScenario("at least one annotator profile required")
        if self.steps < 1:
            raise InvalidScenario("steps must be >= 1")
        if self.per_step_quota < 1:
            raise InvalidScenario("per_step_quota must be >= 1")
        if self.noise_decay < 0 or self.pad_decay < 0:
            raise InvalidScenario("decay multipliers must be >= 0")
        if self.box_pad < 0:
            raise InvalidScenario("box_pad must be >= 0")
        seen = set()
        for p in self.annotators:
            if p.user_id in seen:
                raise InvalidScenario(f"duplicate annotator {p.user_id!r}")
            seen.add(p.user_id)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ScenarioConfig":
        d = dict(d)
        raw = d.pop("annotators", [])
        if isinstance(raw, Mapping):
            # Template form: {"count": N, "profile": {...}} stamps out N
            # profiles differing only in user_id.
            template = dict(raw.get("profile", {}))
            template.pop("user_id", None)
            profiles = tuple(
                AnnotatorProfile(user_id=f"sim-user-{i:03d}", **template)
                for i in range(int(raw["count"])))
        else:
            profiles = tuple(AnnotatorProfile.from_dict(p) for p in raw)
        planted = {int(k): v for k, v in dict(d.pop("planted", {})).items()}
        return cls(annotators=profiles, planted=planted, **d)

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "video_count": self.video_count,
            "video_duration": self.video_duration,
            "fake_fraction": self.fake_fraction,
            "artifacts_per_fake": self.artifacts_per_fake,
            "annotators": [p.to_dict() for p in self.annotators],
            "steps": self.steps,
            "per_step_quota": self.per_step_quota,
            "calibrated": self.calibrated,
            "false_alarm_confidence_mean": self.false_alarm_confidence_mean,
            "false_alarm_confidence_std": self.false_alarm_confidence_std,
            "noise_decay": self.noise_decay,
            "box_pad": self.box_pad,
            "pad_decay": self.pad_decay,
            "planted": {str(k): list(v) for k, v in self.planted.items()},
        }


@dataclass
class Scenario:
    """Generated world: video metadata with ground truth plus the
    step-ordered annotation stream."""

    config: ScenarioConfig
    videos: list[VideoMeta]
    steps: list[list[Annotation]]

    @property
    def all_annotations(self) -> list[Annotation]:
        return [a for step in self.steps for a in step]


def _parse_artifact(d: Mapping[str, Any], duration: float) -> Artifact:
    r = d["region"]
    region = SpatioTemporalRegion(
        float(r["x1"]), float(r["y1"]), float(r["x2"]), float(r["y2"]),
        float(r["t_start"]), float(r["t_end"]))
    region.validate()
    if region.t_end > duration:
        raise InvalidScenario(
            f"planted region ends at {region.t_end}, video lasts {duration}")
    lab = d["label"]
    return Artifact(region=region, label=Label(lab["kind"], lab["value"]))


def _random_region(rng: np.random.Generator, duration: float) -> SpatioTemporalRegion:
    cx = rng.uniform(0.2, 0.8)
    cy = rng.uniform(0.2, 0.8)
    hx = rng.uniform(0.08, 0.2)
    hy = rng.uniform(0.08, 0.2)
    t_start = rng.uniform(0.0, 0.6 * duration)
    length = rng.uniform(0.15 * duration, 0.35 * duration)
    return SpatioTemporalRegion(
        x1=cx - hx, y1=cy - hy, x2=cx + hx, y2=cy + hy,
        t_start=t_start, t_end=min(t_start + length, duration))


def _perturbed_region(
    rng: np.random.Generator,
    base: SpatioTemporalRegion,
    pad: float,
    spatial_sigma: float,
    temporal_sigma: float,
    duration: float,
) -> SpatioTemporalRegion:
    w = base.x2 - base.x1
    h = base.y2 - base.y1
    dt = base.t_end - base.t_start
    x1 = min(max(base.x1 - pad * w + rng.normal(0.0, spatial_sigma), 0.0), 1.0)
    x2 = min(max(base.x2 + pad * w + rng.normal(0.0, spatial_sigma), 0.0), 1.0)
    y1 = min(max(base.y1 - pad * h + rng.normal(0.0, spatial_sigma), 0.0), 1.0)
    y2 = min(max(base.y2 + pad * h + rng.normal(0.0, spatial_sigma), 0.0), 1.0)
    t1 = min(max(base.t_start - pad * dt + rng.normal(0.0, temporal_sigma), 0.0), duration)
    t2 = min(max(base.t_end + pad * dt + rng.normal(0.0, temporal_sigma), 0.0), duration)
    # Noise can collapse or invert an edge pair; fall back to the planted
    # coordinates on that axis, which are always valid.
    if x2 - x1 <= 1e-6:
        x1, x2 = base.x1, base.x2
    if y2 - y1 <= 1e-6:
        y1, y2 = base.y1, base.y2
    if t2 - t1 <= 1e-6:
        t1, t2 = base.t_start, base.t_end
    return SpatioTemporalRegion(x1, y1, x2, y2, t1, t2)


def _draw_confidence(rng: np.random.Generator, cfg: ScenarioConfig,
                     profile: AnnotatorProfile, correct: bool) -> float:
    if cfg.calibrated and not correct:
        mean, std = cfg.false_alarm_confidence_mean, cfg.false_alarm_confidence_std
    else:
        mean, std = profile.confidence_mean, profile.confidence_std
    # Clipped (censored) normal: mass accumulates at 0 and 1, so maximal
    # confidence is actually reachable.
    return float(min(max(rng.normal(mean, std), 0.0), 1.0))


def _wrong_label(rng: np.random.Generator, true_label: Label) -> Label:
    others = [l for l in taxonomy() if l != true_label]
    return others[int(rng.integers(len(others)))]


def generate_scenario(cfg: ScenarioConfig) -> Scenario:
    """Deterministically expand a config into videos and a step-ordered
    annotation stream. Every emitted annotation passes full validation."""
    rng = np.random.default_rng(cfg.seed)
    fake_count = round(cfg.video_count * cfg.fake_fraction)

    videos: list[VideoMeta] = []
    for i in range(cfg.video_count):
        video_id = f"v{i:03d}"
        is_fake = i < fake_count
        artifacts: tuple[Artifact, ...] = ()
        if is_fake:
            if i in cfg.planted:
                artifacts = tuple(
                    _parse_artifact(d, cfg.video_duration) for d in cfg.planted[i])
            else:
                artifacts = tuple(
                    Artifact(
                        region=_random_region(rng, cfg.video_duration),
                        label=taxonomy()[int(rng.integers(len(taxonomy())))],
                    )
                    for _ in range(cfg.artifacts_per_fake))
        meta = VideoMeta(
            video_id=video_id,
            duration=cfg.video_duration,
            ground_truth=GroundTruth(is_fake=is_fake, artifacts=artifacts),
        )
        meta.validate()
        videos.append(meta)

    by_id = {v.video_id: v for v in videos}
    counter = 0
    steps: list[list[Annotation]] = []
    for step in range(cfg.steps):
        sigma_scale = cfg.noise_decay ** step
        pad = cfg.box_pad * (cfg.pad_decay ** step)
        emitted: list[Annotation] = []
        for profile in cfg.annotators:
            viewed_count = min(cfg.per_step_quota, cfg.video_count)
            viewed = sorted(
                int(i) for i in rng.choice(
                    cfg.video_count, size=viewed_count, replace=False))
            for vi in viewed:
                video = videos[vi]
                truth = video.ground_truth
                drafts: list[tuple[SpatioTemporalRegion, Label, float]] = []
                if truth.is_fake:
                    for artifact in truth.artifacts:
                        if rng.random() >= profile.hit_rate:
                            continue
                        region = _perturbed_region(
                            rng, artifact.region, pad,
                            profile.spatial_noise_sigma * sigma_scale,
                            profile.temporal_noise_sigma * sigma_scale,
                            cfg.video_duration)
                        if rng.random() < profile.label_accuracy:
                            label = artifact.label
                        else:
                            label = _wrong_label(rng, artifact.label)
                        drafts.append((region, label,
                                       _draw_confidence(rng, cfg, profile, True)))
                else:
                    if rng.random() < profile.false_alarm_rate:
                        region = _random_region(rng, cfg.video_duration)
                        label = taxonomy()[int(rng.integers(len(taxonomy())))]
                        drafts.append((region, label,
                                       _draw_confidence(rng, cfg, profile, False)))
                for region, label, conf in drafts:
                    record = {
                        "id": f"sim-{counter:06d}",
                        "video_id": video.video_id,
                        "user_id": profile.user_id,
                        "x1": region.x1, "y1": region.y1,
                        "x2": region.x2, "y2": region.y2,
                        "t_start": region.t_start, "t_end": region.t_end,
                        "label_kind": label.kind, "label_value": label.value,
                        "confidence": conf * 100.0,
                        "reason": None,
                        "submitted_at": step * DAY_MS + counter * 1000,
                    }
                    emitted.append(validate_annotation(record, by_id[video.video_id]))
                    counter += 1
        steps.append(emitted)
    return Scenario(config=cfg, videos=videos, steps=steps)


def baseline_nms(annotations: Sequence[Annotation],
                 iou_thresh: float = 0.40) -> list[Annotation]:
    """Greedy non-maximum suppression over 3D IoU: walk boxes in descending
    confidence; each survivor suppresses every remaining box overlapping it
    at or above the threshold. Survivors are input boxes verbatim."""
    order = sorted(annotations,
                   key=lambda a: (-a.confidence, a.submitted_at, a.id))
    survivors: list[Annotation] = []
    suppressed: set[str] = set()
    for i, a in enumerate(order):
        if a.id in suppressed:
            continue
        survivors.append(a)
        for b in order[i + 1:]:
            if b.id in suppressed:
                continue
            if iou3d(a.region, b.region) >= iou_thresh:
                suppressed.add(b.id)
    return survivors


@dataclass
class VoteRegion:
    """Unweighted merge bucket used by the majority-vote baseline."""

    region: SpatioTemporalRegion
    members: list[Annotation]

    @property
    def mean_confidence(self) -> float:
        return sum(a.confidence for a in self.members) / len(self.members)

    @property
    def top_label(self) -> Label:
        counts: dict[Label, int] = {}
        for a in self.members:
            counts[a.label] = counts.get(a.label, 0) + 1
        return min(counts, key=lambda l: (-counts[l], l.value, l.kind))


def baseline_majority_vote(annotations: Sequence[Annotation],
                           iou_thresh: float = 0.40) -> list[VoteRegion]:
    """Order-of-arrival merging with unweighted averaging: every annotation
    counts the same regardless of confidence."""
    regions: list[VoteRegion] = []
    for a in sorted(annotations, key=lambda a: (a.submitted_at, a.id)):
        merged = False
        for vr in regions:
            if iou3d(a.region, vr.region) >= iou_thresh:
                vr.members.append(a)
                n = len(vr.members)
                vr.region = SpatioTemporalRegion(
                    x1=sum(m.region.x1 for m in vr.members) / n,
                    y1=sum(m.region.y1 for m in vr.members) / n,
                    x2=sum(m.region.x2 for m in vr.members) / n,
                    y2=sum(m.region.y2 for m in vr.members) / n,
                    t_start=sum(m.region.t_start for m in vr.members) / n,
                    t_end=sum(m.region.t_end for m in vr.members) / n,
                )
                merged = True
                break
        if not merged:
            regions.append(VoteRegion(region=a.region, members=[a]))
    return regions


@dataclass(frozen=True)
class MethodMetrics:
    localization_iou: float
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ComparisonReport:
    methods: dict[str, MethodMetrics]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("method,localization_iou,precision,recall,f1\n")
        for name, m in self.methods.items():
            buf.write(f"{name},{m.localization_iou:.6f},{m.precision:.6f},"
                      f"{m.recall:.6f},{m.f1:.6f}\n")
        return buf.getvalue()


def _best_iou(artifact: Artifact,
              boxes: Sequence[SpatioTemporalRegion]) -> float:
    if not boxes:
        return 0.0
    return max(iou3d(artifact.region, b) for b in boxes)


def run_comparison(
    scenario: Scenario,
    agg_cfg: AggregationConfig | None = None,
    class_cfg: ClassificationConfig | None = None,
) -> ComparisonReport:
    """Score confidence-weighted aggregation against NMS, unweighted
    majority vote, and raw individual annotations, on localization IoU
    against planted artifacts and on video-level fake detection."""
    agg_cfg = agg_cfg or AggregationConfig()
    class_cfg = class_cfg or ClassificationConfig()
    annotations = scenario.all_annotations
    truth: dict[str, bool] = {}
    for v in scenario.videos:
        if v.ground_truth is None:
            raise MissingGroundTruth(f"video {v.video_id} has no ground truth")
        truth[v.video_id] = v.ground_truth.is_fake

    by_video: dict[str, list[Annotation]] = {v.video_id: [] for v in scenario.videos}
    for a in annotations:
        by_video[a.video_id].append(a)
    histories = histories_from_annotations(annotations)

    region_threshold = ClassificationConfig(
        confidence_threshold=class_cfg.confidence_threshold,
        decision_basis="per-aggregated-region")

    weighted_sets: dict[str, AggregatedRegionSet] = {}
    nms_survivors: dict[str, list[Annotation]] = {}
    vote_regions: dict[str, list[VoteRegion]] = {}
    for vid, anns in by_video.items():
        weighted_sets[vid] = aggregate(anns, histories, agg_cfg) if anns \
            else merge_annotations([], agg_cfg)
        nms_survivors[vid] = baseline_nms(anns, agg_cfg.iou_thresh)
        vote_regions[vid] = baseline_majority_vote(anns, agg_cfg.iou_thresh)

    loc: dict[str, list[float]] = {
        "confidence_weighted": [], "nms_baseline": [],
        "majority_vote": [], "individual": [],
    }
    for v in scenario.videos:
        gt = v.ground_truth
        if not gt.is_fake:
            continue
        anns = by_video[v.video_id]
        for artifact in gt.artifacts:
            loc["confidence_weighted"].append(_best_iou(
                artifact, [r.region for r in weighted_sets[v.video_id].regions]))
            loc["nms_baseline"].append(_best_iou(
                artifact, [a.region for a in nms_survivors[v.video_id]]))
            loc["majority_vote"].append(_best_iou(
                artifact, [r.region for r in vote_regions[v.video_id]]))
            if anns:
                per_ann = [iou3d(a.region, artifact.region) for a in anns]
                loc["individual"].append(sum(per_ann) / len(per_ann))
            else:
                loc["individual"].append(0.0)

    predictions = {
        "confidence_weighted": {
            vid: classify_video(weighted_sets[vid], region_threshold)
            for vid in truth},
        "nms_baseline": {
            vid: classify_video(nms_survivors[vid], class_cfg) for vid in truth},
        "majority_vote": {
            vid: any(r.mean_confidence >= class_cfg.confidence_threshold
                     for r in vote_regions[vid])
            for vid in truth},
        "individual": {
            vid: classify_video(by_video[vid], class_cfg) for vid in truth},
    }

    methods = {}
    for name in ("confidence_weighted", "nms_baseline", "majority_vote",
                 "individual"):
        m = prf(predictions[name], truth)
        mean_loc = (sum(loc[name]) / len(loc[name])) if loc[name] else 0.0
        methods[name] = MethodMetrics(mean_loc, m.precision, m.recall, m.f1)
    return ComparisonReport(methods)
