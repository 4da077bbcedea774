"""Command-line verbs: serve, aggregate, simulate, evaluate, replay.

Every verb is a pure function of its file inputs and flags. Success exits
0 and writes results to stdout or the requested files; failure exits
nonzero after printing a single machine-readable JSON error line to
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .aggregation import AggregationConfig, histories_from_annotations, aggregate
from .errors import CrowdmarkError, MissingGroundTruth
from .evaluation import (
    ClassificationConfig,
    build_prior_sets,
    classify_video,
    convergence_csv,
    convergence_series,
    sensitivity_sweep,
)
from .logstore import ANNOTATION_TAG, format_line, replay
from .model import VideoMeta
from .service import ServiceConfig, VideoStore, batch_aggregate, build_clusterer, create_app
from .simulator import DAY_MS, ScenarioConfig, generate_scenario, run_comparison


def _canonical_json(payload: Any) -> str:
    return json.dumps(payload, separators=(",", ":"), sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_manifest(path: str) -> list[VideoMeta]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [VideoMeta.from_dict(v) for v in data.get("videos", [])]


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    cfg = ServiceConfig.from_file(args.config)
    if args.host or args.port:
        cfg = ServiceConfig(
            listen_host=args.host or cfg.listen_host,
            listen_port=args.port or cfg.listen_port,
            data_dir=cfg.data_dir,
            embedder_endpoint=cfg.embedder_endpoint,
            debounce_ms=cfg.debounce_ms,
            aggregation=cfg.aggregation,
            demonstration=cfg.demonstration,
            clustering=cfg.clustering,
        )
    store = VideoStore(cfg)
    app = create_app(store)
    try:
        uvicorn.run(app, host=cfg.listen_host, port=cfg.listen_port,
                    log_level="info")
    finally:
        store.close()
    return 0


def cmd_aggregate(args: argparse.Namespace) -> int:
    cfg = ServiceConfig.from_file(args.config) if args.config else None
    agg_cfg = cfg.aggregation if cfg else AggregationConfig()
    clusterer = build_clusterer(cfg) if cfg else build_clusterer(
        ServiceConfig())
    sets = batch_aggregate(args.log, video_id=args.video,
                           up_to_seq=args.seq, agg_cfg=agg_cfg,
                           clusterer=clusterer)
    if args.video is not None:
        payload: Any = sets[args.video].to_dict()
    else:
        payload = {"videos": {vid: s.to_dict() for vid, s in sorted(sets.items())}}
    _emit(_canonical_json(payload), args.out)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    raw = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
    cfg = ScenarioConfig.from_dict(raw)
    scenario = generate_scenario(cfg)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    manifest = {"videos": [v.to_dict() for v in scenario.videos]}
    (out_dir / "videos.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    stream = sorted(scenario.all_annotations,
                    key=lambda a: (a.submitted_at, a.id))
    with (out_dir / "stream.log").open("w", encoding="utf-8") as f:
        for seq, annotation in enumerate(stream, start=1):
            f.write(format_line(ANNOTATION_TAG, seq, annotation.to_record()))

    report = run_comparison(scenario)
    (out_dir / "comparison.csv").write_text(report.to_csv(), encoding="utf-8")

    sys.stdout.write(_canonical_json({
        "videos": len(scenario.videos),
        "annotations": len(stream),
        "steps": cfg.steps,
        "out_dir": str(out_dir),
    }))
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    videos = _load_manifest(args.videos)
    truth: dict[str, bool] = {}
    for v in videos:
        if v.ground_truth is None:
            raise MissingGroundTruth(f"video {v.video_id} lacks ground truth")
        truth[v.video_id] = v.ground_truth.is_fake

    state = replay(args.stream)
    dataset: dict[str, Sequence] = {
        vid: state.annotations_for(vid) for vid in state.active
    }
    if args.decision_basis == "per-aggregated-region":
        histories = histories_from_annotations(
            [a for anns in dataset.values() for a in anns])
        dataset = {vid: aggregate(anns, histories) if anns else ()
                   for vid, anns in dataset.items()}
    result = sensitivity_sweep(dataset, truth,
                               decision_basis=args.decision_basis)

    all_annotations = [a for vid in state.active
                       for a in state.annotations_for(vid)]
    all_annotations.sort(key=lambda a: (a.submitted_at, a.id))
    step_count = (max(a.submitted_at for a in all_annotations) // DAY_MS + 1
                  if all_annotations else 0)
    steps = [[] for _ in range(step_count)]
    for a in all_annotations:
        steps[a.submitted_at // DAY_MS].append(a)
    points = convergence_series(steps, build_prior_sets(steps))

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "sweep.csv").write_text(result.to_csv(), encoding="utf-8")
    (out_dir / "convergence.csv").write_text(convergence_csv(points),
                                             encoding="utf-8")

    cfg = ClassificationConfig(confidence_threshold=args.threshold,
                               decision_basis=args.decision_basis)
    predictions = {vid: classify_video(dataset.get(vid, ()), cfg)
                   for vid in truth}
    fakes = sum(1 for v in predictions.values() if v)
    sys.stdout.write(_canonical_json({
        "peak_threshold": result.peak_threshold,
        "threshold": args.threshold,
        "predicted_fake": fakes,
        "videos": len(truth),
        "out_dir": str(out_dir),
    }))
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    state = replay(args.log)
    active = sum(len(v) for v in state.active.values())
    sys.stdout.write(_canonical_json({
        "last_seq": state.last_seq,
        "annotations": state.annotation_count,
        "tombstones": state.tombstone_count,
        "active": active,
        "videos": sum(1 for v in state.active.values() if v),
        "users": len(state.histories),
    }))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crowdmark",
        description="Collaborative video-annotation engine: service, "
                    "batch aggregation, simulation, and evaluation.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", help="service config JSON file")
    p.add_argument("--host", help="listen host override")
    p.add_argument("--port", type=int, help="listen port override")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("aggregate", help="aggregate a log file offline")
    p.add_argument("--log", required=True, help="annotation log path")
    p.add_argument("--video", help="restrict to one video id")
    p.add_argument("--seq", type=int, help="stop after this sequence number")
    p.add_argument("--config", help="service config JSON file")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(fn=cmd_aggregate)

    p = sub.add_parser("simulate", help="generate a synthetic scenario")
    p.add_argument("--scenario", required=True, help="scenario config JSON")
    p.add_argument("--out-dir", required=True,
                   help="directory for videos.json, stream.log, comparison.csv")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("evaluate", help="score a stream against ground truth")
    p.add_argument("--stream", required=True, help="annotation stream log")
    p.add_argument("--videos", required=True,
                   help="video manifest with ground truth")
    p.add_argument("--out-dir", required=True,
                   help="directory for sweep.csv and convergence.csv")
    p.add_argument("--threshold", type=float, default=0.80)
    p.add_argument("--decision-basis", default="per-annotation",
                   choices=["per-annotation", "per-aggregated-region"])
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("replay", help="rebuild state from a log and check it")
    p.add_argument("--log", required=True, help="annotation log path")
    p.set_defaults(fn=cmd_replay)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CrowdmarkError as exc:
        sys.stderr.write(_canonical_json(
            {"error": exc.code, "message": str(exc)}))
        return 1
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(_canonical_json(
            {"error": type(exc).__name__, "message": str(exc)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
