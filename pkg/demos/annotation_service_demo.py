#!/usr/bin/env python3
"""Drive the annotation HTTP service end to end, no browser required.

Boots the service on an ephemeral port against a throwaway project, walks
the queue, submits an annotation with keyword/opinion spans, shows the
server rejecting an invalid one, performs a manual sentence split, and
exports the resulting gold record.
"""

import json
import tempfile
import urllib.request
from pathlib import Path
from urllib.error import HTTPError

from qinu.config import ProjectConfig, init_project
from qinu.server import AnnotationService


def call(base, method, path, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(
        base + path, data=data, method=method, headers={"X-Annotator": "demo"}
    )
    try:
        with urllib.request.urlopen(req) as r:
            return r.status, json.loads(r.read())
    except HTTPError as e:
        return e.code, json.loads(e.read())


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        store = init_project(Path(tmp) / "proj", ProjectConfig())
        reviews = Path(tmp) / "reviews.jsonl"
        reviews.write_text(
            json.dumps(
                {
                    "review_id": "r1",
                    "source": "demo",
                    "product_id": "demo-product",
                    "stars": 4,
                    "title": "solid",
                    "body": "This software is fast. Crashes on load though and loses work.",
                    "date": "2024-03-01",
                    "helpfulness_votes": 12,
                }
            )
            + "\n",
            encoding="utf-8",
        )
        store.ingest_reviews(reviews)
        store.segment(review_ids=["r1"])

        svc = AnnotationService(store, port=0)
        port = svc.start()
        base = f"http://127.0.0.1:{port}"
        print(f"service on {base}")

        status, rows = call(base, "GET", "/api/sentences?status=unannotated&limit=10")
        print(f"\nqueue ({len(rows)} unannotated):")
        for row in rows:
            print(f"  {row['sentence']['sentence_id']}: {row['sentence']['text']!r}")

        sid = rows[0]["sentence"]["sentence_id"]
        status, stored = call(
            base,
            "POST",
            "/api/annotations",
            {
                "sentence_id": sid,
                "topic": "efficiency",
                "keyword_span": [1, 2],
                "opinion_span": [1, 2],
                "polarity": "positive",
            },
        )
        print(f"\nPOST annotation -> {status}: topic={stored['topic']}")

        status, err = call(
            base,
            "POST",
            "/api/annotations",
            {"sentence_id": sid, "topic": "other", "keyword_span": [0, 1], "polarity": "neutral"},
        )
        print(f"POST invalid (other + keyword) -> {status}: {err['error']}")

        split_row = rows[1]["sentence"]
        split_sid = split_row["sentence_id"]
        # char_offset is relative to the sentence span in the review body
        body = rows[1]["review"]["body"]
        span_raw = body[split_row["span_start"]:split_row["span_end"]]
        offset = span_raw.index("though") + len("though")
        status, halves = call(
            base,
            "POST",
            f"/api/sentences/{split_sid}/split",
            {"char_offset": offset},
        )
        print(f"POST split -> {status}: {halves['left']['text']!r} | {halves['right']['text']!r}")

        status, progress = call(base, "GET", "/api/progress")
        print(f"progress -> {progress}")

        svc.stop()
        gold = store.export_gold()
        print(f"\nexported gold: {len(gold)} record(s), first topic {gold[0].topic.value}")
        store.check_invariants()
        print("store invariants hold")


if __name__ == "__main__":
    main()
