"""HTTP service and batch plumbing over the annotation log.

The store owns one append-only log plus a video manifest, keeps per-video
aggregate snapshots, and recomputes a video's aggregate from scratch off
the request path whenever its annotations change. Reads always serve the
latest complete snapshot; a snapshot is stale only between an append and
the completion of the recompute it scheduled. Recomputes triggered within
the debounce window coalesce into one run.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .aggregation import AggregatedRegionSet, aggregate
from .clustering import HashingEmbedder, RationaleClusterer, RemoteEmbedder
from .demonstration import detail, find_region, hover, overlays_at
from .errors import (
    CoordinateOutOfRange,
    CrowdmarkError,
    InvalidRecord,
    NotAuthor,
    UnknownAnnotation,
    UnknownVideo,
)
from .logstore import AnnotationLog, replay
from .model import (
    AggregationConfig,
    ClusterConfig,
    DemonstrationConfig,
    UserHistory,
    VideoMeta,
    validate_annotation,
)

DEFAULT_LISTEN = "127.0.0.1:8700"
LOG_FILENAME = "annotations.log"
MANIFEST_FILENAME = "videos.json"


@dataclass(frozen=True)
class ServiceConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8700
    data_dir: Path = Path("./data")
    embedder_endpoint: str | None = None
    debounce_ms: int = 250
    aggregation: AggregationConfig = field(default_factory=AggregationConfig)
    demonstration: DemonstrationConfig = field(default_factory=DemonstrationConfig)
    clustering: ClusterConfig = field(default_factory=ClusterConfig)

    def __post_init__(self) -> None:
        if self.debounce_ms < 0:
            raise ValueError("debounce_ms must be >= 0")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any],
                  env: Mapping[str, str] | None = None) -> "ServiceConfig":
        env = os.environ if env is None else env
        listen = env.get("CROWDMARK_LISTEN") or d.get("listen", DEFAULT_LISTEN)
        host, _, port_text = listen.rpartition(":")
        if not host or not port_text.isdigit():
            raise ValueError(f"listen address must be host:port, got {listen!r}")
        data_dir = Path(env.get("CROWDMARK_DATA_DIR")
                        or d.get("data_dir", "./data"))
        endpoint = env.get("CROWDMARK_EMBEDDER_ENDPOINT") \
            or d.get("embedder_endpoint")
        return cls(
            listen_host=host,
            listen_port=int(port_text),
            data_dir=data_dir,
            embedder_endpoint=endpoint or None,
            debounce_ms=int(d.get("debounce_ms", 250)),
            aggregation=AggregationConfig(**d.get("aggregation", {})),
            demonstration=DemonstrationConfig(**d.get("demonstration", {})),
            clustering=ClusterConfig(**d.get("clustering", {})),
        )

    @classmethod
    def from_file(cls, path: Path | str | None = None,
                  env: Mapping[str, str] | None = None) -> "ServiceConfig":
        data: dict[str, Any] = {}
        if path is not None:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_dict(data, env)


def build_clusterer(cfg: ServiceConfig) -> RationaleClusterer:
    if cfg.embedder_endpoint:
        embedder = RemoteEmbedder(cfg.embedder_endpoint,
                                  dim=cfg.clustering.embedding_dim)
    else:
        embedder = HashingEmbedder(cfg.clustering.embedding_dim)
    return RationaleClusterer(embedder, cfg.clustering)


def _empty_set(video_id: str) -> AggregatedRegionSet:
    return AggregatedRegionSet(video_id=video_id, regions=(),
                               input_annotation_count=0, computed_at=0)


def _now_ms() -> int:
    return int(time.time() * 1000)


class VideoStore:
    """Single-process state: manifest, log, snapshots, recompute worker."""

    def __init__(self, config: ServiceConfig,
                 clusterer: RationaleClusterer | None = None):
        self.config = config
        self.config.data_dir.mkdir(parents=True, exist_ok=True)
        self.clusterer = clusterer or build_clusterer(config)
        self.videos: dict[str, VideoMeta] = {}
        self._manifest_path = config.data_dir / MANIFEST_FILENAME
        if self._manifest_path.exists():
            manifest = json.loads(self._manifest_path.read_text(encoding="utf-8"))
            for entry in manifest.get("videos", []):
                meta = VideoMeta.from_dict(entry)
                self.videos[meta.video_id] = meta

        self.log = AnnotationLog(config.data_dir / LOG_FILENAME)
        self._lock = threading.RLock()
        self._cond = threading.Condition(self._lock)
        self._snapshots: dict[str, tuple[AggregatedRegionSet, int]] = {}
        self._dirty: dict[str, float] = {}
        self._busy: set[str] = set()
        self._stop = False

        # Recover snapshots for every video with live annotations before
        # accepting traffic, so restart equals replay.
        for video_id in list(self.log.state.active):
            if self.log.state.active[video_id]:
                self._recompute(video_id)
        self._worker = threading.Thread(
            target=self._worker_loop, name="crowdmark-recompute", daemon=True)
        self._worker.start()

    # -- manifest ---------------------------------------------------------

    def register_video(self, meta: VideoMeta) -> VideoMeta:
        meta.validate()
        with self._lock:
            existing = self.videos.get(meta.video_id)
            if existing is not None:
                if existing.duration != meta.duration:
                    raise InvalidRecord(
                        f"video {meta.video_id!r} already registered "
                        f"with duration {existing.duration}")
                return existing
            self.videos[meta.video_id] = meta
            self._save_manifest()
            return meta

    def _save_manifest(self) -> None:
        payload = {"videos": [self.videos[k].to_dict()
                              for k in sorted(self.videos)]}
        tmp = self._manifest_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                       encoding="utf-8")
        tmp.replace(self._manifest_path)

    def video(self, video_id: str) -> VideoMeta:
        meta = self.videos.get(video_id)
        if meta is None:
            raise UnknownVideo(f"no video {video_id!r}")
        return meta

    # -- writes -----------------------------------------------------------

    def submit(self, video_id: str, body: Mapping[str, Any]) -> tuple[dict, int]:
        video = self.video(video_id)
        draft = dict(body)
        if draft.get("video_id") not in (None, video_id):
            raise InvalidRecord(
                f"body video_id {draft['video_id']!r} does not match path")
        draft["video_id"] = video_id
        if not draft.get("id"):
            draft["id"] = uuid.uuid4().hex
        if draft.get("submitted_at") is None:
            draft["submitted_at"] = _now_ms()
        annotation = validate_annotation(draft, video)
        record = annotation.to_record()
        with self._cond:
            seq = self.log.append_annotation(record)
            self._mark_dirty(video_id)
        return record, seq

    def delete(self, video_id: str, annotation_id: str, caller: str) -> int:
        self.video(video_id)
        with self._cond:
            annotation = self.log.state.active.get(video_id, {}).get(annotation_id)
            if annotation is None:
                raise UnknownAnnotation(
                    f"no live annotation {annotation_id!r} on video {video_id!r}")
            if annotation.user_id != caller:
                raise NotAuthor(
                    f"annotation {annotation_id!r} belongs to another user")
            seq = self.log.append_tombstone(
                annotation_id, video_id, caller, _now_ms())
            self._mark_dirty(video_id)
        return seq

    # -- reads ------------------------------------------------------------

    def snapshot(self, video_id: str) -> tuple[AggregatedRegionSet, int]:
        self.video(video_id)
        with self._lock:
            snap = self._snapshots.get(video_id)
            if snap is None:
                return _empty_set(video_id), 0
            return snap

    def annotations(self, video_id: str) -> list[dict[str, Any]]:
        self.video(video_id)
        with self._lock:
            live = self.log.state.annotations_for(video_id)
        live.sort(key=lambda a: (a.submitted_at, a.id))
        return [a.to_record() for a in live]

    def wait_for(self, video_id: str, seq: int, timeout: float = 5.0) -> bool:
        """Block until the video's snapshot reflects at least seq."""
        deadline = time.monotonic() + timeout
        with self._cond:
            while True:
                snap = self._snapshots.get(video_id)
                if snap is not None and snap[1] >= seq:
                    return True
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return False
                self._cond.wait(remaining)

    # -- recompute machinery ------------------------------------------------

    def _mark_dirty(self, video_id: str) -> None:
        # Appends inside the window share one deadline: bursts coalesce.
        if video_id not in self._dirty:
            self._dirty[video_id] = time.monotonic() + self.config.debounce_ms / 1000.0
        self._cond.notify_all()

    def _worker_loop(self) -> None:
        while True:
            with self._cond:
                while not self._stop:
                    now = time.monotonic()
                    due = [v for v, dl in self._dirty.items() if dl <= now]
                    if due:
                        break
                    timeout = None
                    if self._dirty:
                        timeout = max(0.0, min(self._dirty.values()) - now)
                    self._cond.wait(timeout)
                if self._stop:
                    return
                for v in due:
                    del self._dirty[v]
                    self._busy.add(v)
            for v in due:
                try:
                    self._recompute(v)
                finally:
                    with self._cond:
                        self._busy.discard(v)
                        self._cond.notify_all()

    def _recompute(self, video_id: str) -> None:
        with self._lock:
            annotations = self.log.state.annotations_for(video_id)
            histories = {
                uid: UserHistory(uid, list(h.past_confidences))
                for uid, h in self.log.state.histories.items()
            }
            seq = self.log.last_seq
        if annotations:
            result = aggregate(annotations, histories,
                               self.config.aggregation, self.clusterer)
        else:
            result = _empty_set(video_id)
        with self._cond:
            current = self._snapshots.get(video_id)
            if current is None or current[1] < seq:
                self._snapshots[video_id] = (result, seq)
            self._cond.notify_all()

    def drain(self, timeout: float = 10.0) -> bool:
        """Wait until no recompute is pending or running."""
        deadline = time.monotonic() + timeout
        with self._cond:
            while self._dirty or self._busy:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return False
                self._cond.wait(remaining)
            return True

    def close(self) -> None:
        with self._cond:
            self._stop = True
            self._cond.notify_all()
        self._worker.join(timeout=5.0)
        self.log.close()


def batch_aggregate(
    log_path: Path | str,
    video_id: str | None = None,
    up_to_seq: int | None = None,
    agg_cfg: AggregationConfig | None = None,
    clusterer: RationaleClusterer | None = None,
) -> dict[str, AggregatedRegionSet]:
    """Pure function of the log file: replay a prefix and aggregate each
    video exactly as the live service would."""
    state = replay(log_path, up_to_seq=up_to_seq)
    agg_cfg = agg_cfg or AggregationConfig()
    targets = [video_id] if video_id is not None else sorted(state.active)
    out: dict[str, AggregatedRegionSet] = {}
    for vid in targets:
        annotations = state.annotations_for(vid)
        if annotations:
            out[vid] = aggregate(annotations, state.histories, agg_cfg, clusterer)
        else:
            out[vid] = _empty_set(vid)
    return out


def _status_for(exc: CrowdmarkError) -> int:
    from .errors import LogCorrupt, UnknownLabel, UnknownRegion

    if isinstance(exc, NotAuthor):
        return 403
    if isinstance(exc, (UnknownVideo, UnknownRegion, UnknownLabel,
                        UnknownAnnotation)):
        return 404
    if isinstance(exc, LogCorrupt):
        return 500
    return 400


def create_app(store: VideoStore):
    from fastapi import Body, FastAPI, Header, Query
    from fastapi.responses import JSONResponse

    app = FastAPI(title="crowdmark")
    app.state.store = store

    @app.exception_handler(CrowdmarkError)
    async def crowdmark_error(request, exc: CrowdmarkError):
        return JSONResponse(status_code=_status_for(exc),
                            content={"error": exc.code, "message": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "seq": store.log.last_seq}

    @app.get("/videos")
    def list_videos():
        videos = [{"video_id": v.video_id, "duration": v.duration}
                  for _, v in sorted(store.videos.items())]
        return {"videos": videos}

    @app.post("/videos", status_code=201)
    def register_video(body: dict = Body(...)):
        meta = VideoMeta(video_id=str(body.get("video_id", "")),
                         duration=float(body.get("duration", 0.0)))
        stored = store.register_video(meta)
        return {"video_id": stored.video_id, "duration": stored.duration}

    @app.post("/videos/{video_id}/annotations", status_code=201)
    def submit_annotation(video_id: str, body: dict = Body(...)):
        record, seq = store.submit(video_id, body)
        return {"annotation": record, "seq": seq}

    @app.get("/videos/{video_id}/annotations")
    def list_annotations(video_id: str):
        return {"video_id": video_id, "annotations": store.annotations(video_id)}

    @app.delete("/videos/{video_id}/annotations/{annotation_id}")
    def delete_annotation(video_id: str, annotation_id: str,
                          x_user_id: str | None = Header(default=None)):
        if not x_user_id:
            raise InvalidRecord("X-User-Id header required for deletion")
        seq = store.delete(video_id, annotation_id, x_user_id)
        return {"deleted": annotation_id, "seq": seq}

    @app.get("/videos/{video_id}/overlays")
    def get_overlays(video_id: str, t: float = Query(...)):
        if t < 0:
            raise CoordinateOutOfRange(f"time point must be >= 0, got {t}")
        snap, seq = store.snapshot(video_id)
        items = overlays_at(snap, t, store.config.demonstration)
        return {"video_id": video_id, "t": t, "seq": seq, "overlays": items}

    @app.get("/videos/{video_id}/regions/{region_id}/hover")
    def get_hover(video_id: str, region_id: int):
        snap, seq = store.snapshot(video_id)
        payload = hover(find_region(snap, region_id), store.config.demonstration)
        payload["video_id"] = video_id
        payload["seq"] = seq
        return payload

    @app.get("/videos/{video_id}/regions/{region_id}/labels/{label_value:path}")
    def get_detail(video_id: str, region_id: int, label_value: str):
        snap, seq = store.snapshot(video_id)
        payload = detail(find_region(snap, region_id), label_value)
        payload["video_id"] = video_id
        payload["seq"] = seq
        return payload

    @app.get("/videos/{video_id}/aggregate")
    def get_aggregate(video_id: str):
        snap, seq = store.snapshot(video_id)
        return {"video_id": video_id, "seq": seq, "aggregate": snap.to_dict()}

    return app
