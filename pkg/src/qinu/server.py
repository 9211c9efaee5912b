"""Loopback HTTP service exposing the annotation workflow.

Single-user, no auth: the annotator identifies per request via the
X-Annotator header. All mutations go through the store's single-writer
lock; reads serve from immutable snapshots. Validation failures always map
to 4xx (404 unknown id, 409 conflicting mutation, 422 invariant violation),
never 5xx.

Endpoints (JSON bodies, UTF-8):
    GET  /api/progress                      -> {"total", "annotated"}
    GET  /api/sentences?status=all|unannotated&limit=N
    GET  /api/reviews/{id}
    POST /api/annotations                   -> 201 + stored record
    POST /api/sentences/{id}/split          -> 200 + both halves
static assets (the annotation UI) are served at / when a directory is
configured.
"""

import datetime as _dt
import json
import logging
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlparse

from .config import ProjectConfig
from .corpus import Annotation, ProjectStore
from .errors import ConflictError, DataError, ValidationError
from .pipeline import tokenize

log = logging.getLogger(__name__)

_SPLIT_RE = re.compile(r"^/api/sentences/([^/]+)/split$")
_REVIEW_RE = re.compile(r"^/api/reviews/([^/]+)$")

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
}


class AnnotationService:
    """HTTP facade over one ProjectStore; start() binds, stop() shuts down."""

    def __init__(
        self,
        store: ProjectStore,
        config: ProjectConfig | None = None,
        host: str = "127.0.0.1",
        port: int = 8765,
        static_dir: str | Path | None = None,
    ):
        self.store = store
        self.config = config or ProjectConfig()
        self.host = host
        self.port = port
        self.static_dir = Path(static_dir) if static_dir else None
        self._httpd: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    def bind(self) -> int:
        """Bind the listening socket; returns the actual port (resolves 0)."""
        if self._httpd is None:
            try:
                self._httpd = ThreadingHTTPServer((self.host, self.port), _make_handler(self))
            except OSError as e:
                raise DataError(f"cannot bind {self.host}:{self.port}: {e}") from e
            self.port = self._httpd.server_address[1]
        return self.port

    def start(self) -> int:
        """Bind and serve on a background thread; returns the bound port."""
        self.bind()
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self.port

    def serve_forever(self) -> None:
        """Blocking variant for the CLI."""
        self.bind()
        try:
            self._httpd.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            self._httpd.server_close()

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
            self._httpd = None
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    # -- request logic, kept off the handler class for testability ---------

    def progress(self) -> dict:
        state = self.store.snapshot
        return {"total": len(state.sentences), "annotated": len(self.store.annotated_sentence_ids())}

    def _sentence_payload(self, s, annotated: bool) -> dict:
        # tokens are included so the client annotates against the exact
        # tokenization that span validation uses
        return {
            **s.to_json(),
            "annotated": annotated,
            "tokens": tokenize(s.text, self.store.pipeline_config),
        }

    def list_sentences(self, status: str, limit: int) -> list[dict]:
        state = self.store.snapshot
        annotated = self.store.annotated_sentence_ids()
        out = []
        for rid in sorted(state.review_sentences):
            review = state.reviews[rid]
            for sid in state.review_sentences[rid]:
                if status == "unannotated" and sid in annotated:
                    continue
                out.append(
                    {
                        "sentence": self._sentence_payload(state.sentences[sid], sid in annotated),
                        "review": review.to_json(),
                    }
                )
                if len(out) >= limit:
                    return out
        return out

    def review_payload(self, review_id: str) -> dict:
        review = self.store.review(review_id)
        annotated = self.store.annotated_sentence_ids()
        return {
            **review.to_json(),
            "sentences": [
                self._sentence_payload(s, s.sentence_id in annotated)
                for s in self.store.sentences_of(review_id)
            ],
        }

    def submit_annotation(self, body: dict, annotator: str | None) -> dict:
        record = dict(body)
        if annotator:
            record["annotator_id"] = annotator
        record.setdefault("annotator_id", "anonymous")
        record.setdefault(
            "timestamp", _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        )
        stored = self.store.record_annotation(Annotation.from_json(record))
        return stored.to_json()

    def split(self, sentence_id: str, body: dict) -> dict:
        try:
            offset = int(body["char_offset"])
        except (KeyError, TypeError, ValueError):
            raise ValidationError("body must carry an integer char_offset") from None
        left, right = self.store.split_sentence(sentence_id, offset)
        return {"left": left.to_json(), "right": right.to_json()}


def _make_handler(service: AnnotationService):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            log.debug("%s " + fmt, self.address_string(), *args)

        def _send_json(self, status: int, payload) -> None:
            raw = json.dumps(payload, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(raw)))
            self.end_headers()
            self.wfile.write(raw)

        def _send_error_json(self, status: int, message: str) -> None:
            self._send_json(status, {"error": message})

        def _read_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            if not raw:
                raise ValidationError("request body must be JSON")
            try:
                body = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as e:
                raise ValidationError(f"invalid JSON body: {e}") from e
            if not isinstance(body, dict):
                raise ValidationError("request body must be a JSON object")
            return body

        def _dispatch(self, method: str) -> None:
            url = urlparse(self.path)
            try:
                if method == "GET":
                    self._get(url)
                else:
                    self._post(url)
            except ValidationError as e:
                self._send_error_json(422, str(e))
            except ConflictError as e:
                self._send_error_json(409, str(e))
            except DataError as e:
                status = 404 if "unknown" in str(e) else 422
                self._send_error_json(status, str(e))

        def _get(self, url) -> None:
            if url.path == "/api/progress":
                self._send_json(200, service.progress())
                return
            if url.path == "/api/sentences":
                q = parse_qs(url.query)
                status = q.get("status", ["all"])[0]
                if status not in ("all", "unannotated"):
                    raise ValidationError("status must be 'all' or 'unannotated'")
                try:
                    limit = int(q.get("limit", ["50"])[0])
                except ValueError:
                    raise ValidationError("limit must be an integer") from None
                self._send_json(200, service.list_sentences(status, max(1, limit)))
                return
            m = _REVIEW_RE.match(url.path)
            if m:
                self._send_json(200, service.review_payload(unquote(m.group(1))))
                return
            self._serve_static(url.path)

        def _post(self, url) -> None:
            if url.path == "/api/annotations":
                body = self._read_body()
                annotator = self.headers.get("X-Annotator")
                self._send_json(201, service.submit_annotation(body, annotator))
                return
            m = _SPLIT_RE.match(url.path)
            if m:
                body = self._read_body()
                self._send_json(200, service.split(unquote(m.group(1)), body))
                return
            self._send_error_json(404, f"no such endpoint: POST {url.path}")

        def _serve_static(self, path: str) -> None:
            if service.static_dir is None:
                self._send_error_json(
                    404, "no static assets configured; use the /api endpoints"
                )
                return
            rel = "index.html" if path in ("", "/") else path.lstrip("/")
            target = (service.static_dir / rel).resolve()
            root = service.static_dir.resolve()
            if root not in target.parents and target != root:
                self._send_error_json(404, "not found")
                return
            if not target.is_file():
                self._send_error_json(404, f"not found: {path}")
                return
            raw = target.read_bytes()
            self.send_response(200)
            ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(raw)))
            self.end_headers()
            self.wfile.write(raw)

        def do_GET(self):  # noqa: N802 (http.server API)
            self._dispatch("GET")

        def do_POST(self):  # noqa: N802
            self._dispatch("POST")

    return Handler


def serve_annotation_api(
    store: ProjectStore,
    port: int,
    config: ProjectConfig | None = None,
    host: str = "127.0.0.1",
    static_dir: str | Path | None = None,
) -> AnnotationService:
    """Start the annotation service in the background and return its handle."""
    service = AnnotationService(store, config, host=host, port=port, static_dir=static_dir)
    service.start()
    return service
