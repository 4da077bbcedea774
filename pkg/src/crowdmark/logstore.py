"""Append-only annotation log with tombstone deletes and full replay.

One log file per deployment. Each line is `<TAG> <seq> <json>` where TAG is
ANNOTATION or TOMBSTONE, seq is a 1-based strictly increasing integer, and
the JSON payload is a canonical annotation record or a tombstone reference.
Records are never rewritten; replaying the file reconstructs exact state.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

from .errors import InvalidRecord, LogCorrupt, UnknownAnnotation
from .model import (
    Annotation,
    Label,
    SpatioTemporalRegion,
    UserHistory,
)

ANNOTATION_TAG = "ANNOTATION"
TOMBSTONE_TAG = "TOMBSTONE"


@dataclass(frozen=True)
class LogRecord:
    tag: str
    seq: int
    payload: dict[str, Any]


def format_line(tag: str, seq: int, payload: dict[str, Any]) -> str:
    return f"{tag} {seq} {json.dumps(payload, separators=(',', ':'), sort_keys=True)}\n"


def parse_line(line: str, line_no: int) -> LogRecord:
    parts = line.rstrip("\n").split(" ", 2)
    if len(parts) != 3:
        raise LogCorrupt(f"line {line_no}: expected '<TAG> <seq> <json>'")
    tag, seq_text, body = parts
    if tag not in (ANNOTATION_TAG, TOMBSTONE_TAG):
        raise LogCorrupt(f"line {line_no}: unknown record tag {tag!r}")
    try:
        seq = int(seq_text)
    except ValueError:
        raise LogCorrupt(f"line {line_no}: bad sequence number {seq_text!r}") from None
    try:
        payload = json.loads(body)
    except json.JSONDecodeError as exc:
        raise LogCorrupt(f"line {line_no}: bad JSON payload: {exc}") from None
    if not isinstance(payload, dict):
        raise LogCorrupt(f"line {line_no}: payload must be a JSON object")
    return LogRecord(tag, seq, payload)


def annotation_from_record(record: dict[str, Any]) -> Annotation:
    """Rebuild an Annotation from a canonical record that already passed
    validation when it was first written."""
    return Annotation(
        id=record["id"],
        video_id=record["video_id"],
        user_id=record["user_id"],
        region=SpatioTemporalRegion(
            x1=record["x1"], y1=record["y1"],
            x2=record["x2"], y2=record["y2"],
            t_start=record["t_start"], t_end=record["t_end"]),
        label=Label(record["label_kind"], record["label_value"]),
        confidence=record["confidence"] / 100.0,
        reason=record.get("reason"),
        submitted_at=record["submitted_at"],
    )


@dataclass
class LogState:
    """Everything replay recovers: live annotations per video, tombstoned
    ids, per-user confidence histories, and counters."""

    active: dict[str, dict[str, Annotation]] = field(default_factory=dict)
    seen_ids: set[str] = field(default_factory=set)
    tombstoned: set[str] = field(default_factory=set)
    histories: dict[str, UserHistory] = field(default_factory=dict)
    last_seq: int = 0
    annotation_count: int = 0
    tombstone_count: int = 0

    def annotations_for(self, video_id: str) -> list[Annotation]:
        return list(self.active.get(video_id, {}).values())

    def apply(self, record: LogRecord) -> None:
        if record.seq <= self.last_seq:
            raise LogCorrupt(
                f"sequence {record.seq} not after {self.last_seq}")
        self.last_seq = record.seq
        if record.tag == ANNOTATION_TAG:
            ann = annotation_from_record(record.payload)
            if ann.id in self.seen_ids:
                raise LogCorrupt(f"duplicate annotation id {ann.id!r}")
            self.seen_ids.add(ann.id)
            self.active.setdefault(ann.video_id, {})[ann.id] = ann
            hist = self.histories.setdefault(ann.user_id, UserHistory(ann.user_id))
            hist.append(ann.confidence)
            self.annotation_count += 1
        else:
            aid = record.payload.get("annotation_id")
            vid = record.payload.get("video_id")
            if not aid or not vid:
                raise LogCorrupt("tombstone missing annotation_id or video_id")
            per_video = self.active.get(vid, {})
            if aid not in per_video:
                raise LogCorrupt(
                    f"tombstone for unknown or already-deleted annotation {aid!r}")
            del per_video[aid]
            self.tombstoned.add(aid)
            self.tombstone_count += 1


def read_records(path: Path | str) -> Iterator[LogRecord]:
    path = Path(path)
    if not path.exists():
        return
    with path.open("r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            yield parse_line(line, line_no)


def replay(path: Path | str, up_to_seq: int | None = None) -> LogState:
    """Rebuild state from the log, enforcing integrity: strictly increasing
    sequence numbers, no duplicate ids, no dangling tombstones."""
    state = LogState()
    for record in read_records(path):
        if up_to_seq is not None and record.seq > up_to_seq:
            break
        state.apply(record)
    return state


class AnnotationLog:
    """Writer handle over the append-only file. Appends are flushed and
    fsynced before the sequence number is handed back."""

    def __init__(self, path: Path | str):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._state = replay(self.path)
        self._file = self.path.open("a", encoding="utf-8")

    @property
    def state(self) -> LogState:
        return self._state

    @property
    def last_seq(self) -> int:
        return self._state.last_seq

    def _write(self, tag: str, payload: dict[str, Any]) -> int:
        seq = self._state.last_seq + 1
        line = format_line(tag, seq, payload)
        # Round-trip through the parser so nothing unreplayable is written,
        # then persist before mutating in-memory state.
        record = parse_line(line, -1)
        self._file.write(line)
        self._file.flush()
        os.fsync(self._file.fileno())
        self._state.apply(record)
        return seq

    def append_annotation(self, record: dict[str, Any]) -> int:
        aid = record.get("id")
        vid = record.get("video_id")
        if not aid or not vid:
            raise InvalidRecord("annotation record needs id and video_id")
        if aid in self._state.seen_ids:
            raise InvalidRecord(f"annotation id {aid!r} already used")
        return self._write(ANNOTATION_TAG, record)

    def append_tombstone(self, annotation_id: str, video_id: str,
                         user_id: str, deleted_at_ms: int) -> int:
        per_video = self._state.active.get(video_id, {})
        if annotation_id not in per_video:
            raise UnknownAnnotation(
                f"no live annotation {annotation_id!r} on video {video_id!r}")
        return self._write(TOMBSTONE_TAG, {
            "annotation_id": annotation_id,
            "video_id": video_id,
            "user_id": user_id,
            "deleted_at": deleted_at_ms,
        })

    def close(self) -> None:
        self._file.close()
