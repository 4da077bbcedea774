"""End-to-end tour of the HTTP service: register a video, submit
annotations from three users, read back overlays, hover summaries, and a
label detail view, delete one annotation, then prove the append-only log
survives a restart.

Runs entirely in process against a temporary data directory.

Run:  python3 demos/04_service_walkthrough.py
"""
from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from crowdmark import ServiceConfig, VideoStore, create_app


def body(aid, user, box, label, conf, reason=None, *, at=0):
    x1, y1, x2, y2, t1, t2 = box
    return {
        "id": aid, "user_id": user,
        "x1": x1, "y1": y1, "x2": x2, "y2": y2,
        "t_start": t1, "t_end": t2,
        "label_kind": "predefined", "label_value": label,
        "confidence": conf, "reason": reason,
        "submitted_at": 1_700_000_000_000 + at,
    }


def show(title: str, payload) -> None:
    print(f"\n== {title}")
    print(json.dumps(payload, indent=2))


def main() -> None:
    data_dir = Path(tempfile.mkdtemp()) / "data"
    cfg = ServiceConfig(data_dir=data_dir, debounce_ms=10)
    store = VideoStore(cfg)
    client = TestClient(create_app(store))

    print(client.get("/health").json())

    client.post("/videos", json={"video_id": "clip-7", "duration": 30.0})

    submissions = [
        body("a-1", "ana", (0.30, 0.40, 0.60, 0.70, 2.0, 6.0),
             "blurry", 90, "jawline shimmers when she turns", at=0),
        body("a-2", "ben", (0.32, 0.38, 0.62, 0.68, 2.5, 6.5),
             "blurry", 70, "soft smear under the chin", at=1),
        body("a-3", "cam", (0.28, 0.42, 0.58, 0.72, 1.5, 5.5),
             "melting", 80, "skin drips into the collar", at=2),
        body("a-4", "ben", (0.80, 0.05, 0.95, 0.20, 2.0, 6.0),
             "artificial", 40, at=3),
    ]
    seq = 0
    for b in submissions:
        seq = client.post("/videos/clip-7/annotations", json=b).json()["seq"]
    store.wait_for("clip-7", seq)  # let the debounced recompute land

    show("overlays at t=3.0 (labels stay hidden until hover)",
         client.get("/videos/clip-7/overlays", params={"t": 3.0}).json())
    show("hover, region 0",
         client.get("/videos/clip-7/regions/0/hover").json())
    show("detail, region 0, label 'blurry'",
         client.get("/videos/clip-7/regions/0/labels/blurry").json())

    # Only the author may delete, and the header names the caller.
    resp = client.delete("/videos/clip-7/annotations/a-4",
                         headers={"X-User-Id": "ana"})
    print(f"\nana deleting ben's annotation: {resp.status_code} "
          f"{resp.json()['error']}")
    resp = client.delete("/videos/clip-7/annotations/a-4",
                         headers={"X-User-Id": "ben"})
    print(f"ben deleting his own:          {resp.status_code}")
    store.wait_for("clip-7", seq + 1)  # deletion is log record 5

    before = client.get("/videos/clip-7/aggregate").json()
    store.close()

    # A fresh store on the same data directory replays the log and lands
    # on the identical aggregate.
    reopened = VideoStore(cfg)
    after_set, after_seq = reopened.snapshot("clip-7")
    after = json.loads(json.dumps(after_set.to_dict()))  # tuples -> lists
    same = before["aggregate"] == after
    print(f"\nrestart replayed {after_seq} log records; "
          f"aggregate identical: {same}")
    reopened.close()


if __name__ == "__main__":
    main()
