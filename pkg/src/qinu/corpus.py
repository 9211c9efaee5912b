"""Review corpus store: ingestion, balanced sampling, sentence segmentation,
annotation capture and gold-standard export.

Storage layout is a project directory of append-only JSONL logs:

    reviews.jsonl      one review object per line
    sentences.jsonl    sentence log; later records supersede earlier ones
                       whose char spans they overlap (how manual splits work)
    annotations.jsonl  annotation log; latest record per (sentence, annotator)
                       wins
    selection.json     review ids chosen by the balanced sampler (derived,
                       rewritten on each sampling run)

Reads work against immutable in-memory snapshots; every mutation is
serialized through one lock and swaps the snapshot, so concurrent readers
(e.g. HTTP handlers) never observe a half-applied change.
"""

import json
import logging
import threading
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .errors import ConflictError, DataError, ValidationError
from .pipeline import PipelineConfig, tokenize

log = logging.getLogger(__name__)

Span = tuple[int, int]


class Topic(Enum):
    EFFECTIVENESS = "effectiveness"
    EFFICIENCY = "efficiency"
    FREEDOM_FROM_RISK = "freedom_from_risk"
    OTHER = "other"


# Fixed order used for deterministic iteration and argmax tie-breaking.
TOPIC_ORDER = (Topic.EFFECTIVENESS, Topic.EFFICIENCY, Topic.FREEDOM_FROM_RISK, Topic.OTHER)
CHARACTERISTIC_TOPICS = TOPIC_ORDER[:3]


class Polarity(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class Review:
    review_id: str
    source: str
    product_id: str
    stars: int
    title: str
    body: str
    date: str | None = None
    helpfulness_votes: int = 0

    def validate(self) -> None:
        if not self.review_id:
            raise ValidationError("review_id must be non-empty")
        if self.stars not in (1, 2, 3, 4, 5):
            raise ValidationError(f"stars must be in 1..5, got {self.stars!r}")
        if not self.body or not self.body.strip():
            raise ValidationError("body must be non-empty after trim")
        if self.helpfulness_votes < 0:
            raise ValidationError("helpfulness_votes must be >= 0")

    def to_json(self) -> dict:
        return {
            "review_id": self.review_id,
            "source": self.source,
            "product_id": self.product_id,
            "stars": self.stars,
            "title": self.title,
            "body": self.body,
            "date": self.date,
            "helpfulness_votes": self.helpfulness_votes,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Review":
        try:
            r = cls(
                review_id=str(obj["review_id"]),
                source=str(obj.get("source", "")),
                product_id=str(obj.get("product_id", "")),
                stars=int(obj["stars"]),
                title=str(obj.get("title", "") or ""),
                body=str(obj["body"]),
                date=obj.get("date") or None,
                helpfulness_votes=int(obj.get("helpfulness_votes") or 0),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"malformed review record: {e}") from e
        r.validate()
        return r


@dataclass(frozen=True)
class Sentence:
    sentence_id: str
    review_id: str
    ordinal: int
    text: str
    span_start: int
    span_end: int
    origin: str = "auto"  # auto | manual_split
    needs_review: bool = False

    @property
    def span(self) -> Span:
        return (self.span_start, self.span_end)

    def to_json(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "review_id": self.review_id,
            "ordinal": self.ordinal,
            "text": self.text,
            "span_start": self.span_start,
            "span_end": self.span_end,
            "origin": self.origin,
            "needs_review": self.needs_review,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Sentence":
        try:
            return cls(
                sentence_id=str(obj["sentence_id"]),
                review_id=str(obj["review_id"]),
                ordinal=int(obj["ordinal"]),
                text=str(obj["text"]),
                span_start=int(obj["span_start"]),
                span_end=int(obj["span_end"]),
                origin=str(obj.get("origin", "auto")),
                needs_review=bool(obj.get("needs_review", False)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"malformed sentence record: {e}") from e


def _span_from_json(v) -> Span | None:
    if v is None:
        return None
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ValidationError(f"span must be a [start, end) pair, got {v!r}")
    return (int(v[0]), int(v[1]))


@dataclass(frozen=True)
class Annotation:
    sentence_id: str
    topic: Topic
    polarity: Polarity
    annotator_id: str
    timestamp: str
    keyword_span: Span | None = None
    opinion_span: Span | None = None
    modifier_span: Span | None = None

    def to_json(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "topic": self.topic.value,
            "keyword_span": list(self.keyword_span) if self.keyword_span else None,
            "opinion_span": list(self.opinion_span) if self.opinion_span else None,
            "modifier_span": list(self.modifier_span) if self.modifier_span else None,
            "polarity": self.polarity.value,
            "annotator_id": self.annotator_id,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Annotation":
        try:
            return cls(
                sentence_id=str(obj["sentence_id"]),
                topic=Topic(obj["topic"]),
                polarity=Polarity(obj["polarity"]),
                annotator_id=str(obj["annotator_id"]),
                timestamp=str(obj.get("timestamp", "")),
                keyword_span=_span_from_json(obj.get("keyword_span")),
                opinion_span=_span_from_json(obj.get("opinion_span")),
                modifier_span=_span_from_json(obj.get("modifier_span")),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ValidationError):
                raise
            raise ValidationError(f"malformed annotation record: {e}") from e


@dataclass(frozen=True)
class GoldRecord:
    """One exported gold-standard sentence with its resolved label."""

    sentence_id: str
    text: str
    topic: Topic
    polarity: Polarity
    keyword_span: Span | None = None
    opinion_span: Span | None = None
    modifier_span: Span | None = None


LabeledDataset = list[GoldRecord]


# ---------------------------------------------------------------------------
# Sentence segmentation
# ---------------------------------------------------------------------------

DEFAULT_ABBREVIATIONS = frozenset(
    {
        "e.g.", "i.e.", "etc.", "vs.", "cf.", "mr.", "mrs.", "ms.", "dr.",
        "prof.", "st.", "no.", "fig.", "approx.", "inc.", "ltd.", "co.",
        "dept.", "min.", "max.", "ver.",
    }
)

_TERMINALS = ".!?"
_CLOSERS = "\"')]}”’»"
_OPENERS = "\"'([{“‘«"


@dataclass(frozen=True)
class SegmentationConfig:
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS
    max_tokens: int = 60


def _is_abbreviation(body: str, run_start: int, run_end: int, abbreviations) -> bool:
    # Only a lone period can close an abbreviation; "etc.." or "ok?!" never do.
    if body[run_start:run_end] != ".":
        return False
    w = run_start
    while w > 0 and not body[w - 1].isspace():
        w -= 1
    word = body[w:run_end].lstrip(_OPENERS)
    return word.lower() in abbreviations


def _cut_points(body: str, abbreviations) -> list[int]:
    cuts = []
    n = len(body)
    i = 0
    while i < n:
        if body[i] not in _TERMINALS:
            i += 1
            continue
        j = i
        while j < n and body[j] in _TERMINALS:
            j += 1
        k = j
        while k < n and body[k] in _CLOSERS:
            k += 1
        # A boundary needs trailing whitespace or end of body, e.g. "v2.0" has neither.
        if (k >= n or body[k].isspace()) and not _is_abbreviation(body, i, j, abbreviations):
            if k < n:
                cuts.append(k)
        i = j
    return cuts


def segment_review(review: Review, rules: SegmentationConfig | None = None) -> list[Sentence]:
    """Split a review body into sentences on terminal punctuation.

    The produced char spans tile [0, len(body)) exactly: inter-sentence
    whitespace is carried at the head of the following span and stripped
    only from the sentence text, so the body is always reconstructible
    from spans. Fragments longer than ``max_tokens`` whitespace tokens are
    flagged ``needs_review`` for manual splitting.
    """
    rules = rules or SegmentationConfig()
    body = review.body
    spans: list[Span] = []
    prev = 0
    for cut in _cut_points(body, rules.abbreviations):
        spans.append((prev, cut))
        prev = cut
    spans.append((prev, len(body)))

    # Merge whitespace-only fragments into a neighbor so no empty sentence exists.
    merged: list[Span] = []
    for a, b in spans:
        if body[a:b].strip():
            merged.append((a, b))
        elif merged:
            merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))  # leading whitespace: extend into next span below
    if len(merged) > 1 and not body[merged[0][0]:merged[0][1]].strip():
        merged[1] = (merged[0][0], merged[1][1])
        merged.pop(0)

    sentences = []
    for ordinal, (a, b) in enumerate(merged):
        text = body[a:b].strip()
        sentences.append(
            Sentence(
                sentence_id=f"{review.review_id}:s{ordinal}",
                review_id=review.review_id,
                ordinal=ordinal,
                text=text,
                span_start=a,
                span_end=b,
                origin="auto",
                needs_review=len(text.split()) > rules.max_tokens,
            )
        )
    return sentences


# ---------------------------------------------------------------------------
# Project store
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Snapshot:
    """Immutable view of the materialized store state."""

    reviews: dict[str, Review] = field(default_factory=dict)
    sentences: dict[str, Sentence] = field(default_factory=dict)
    review_sentences: dict[str, tuple[str, ...]] = field(default_factory=dict)
    # (sentence_id, annotator_id) -> (timestamp, seq, Annotation); latest wins
    latest_annotations: dict[tuple[str, str], tuple[str, int, Annotation]] = field(default_factory=dict)
    selection: tuple[str, ...] | None = None


class ProjectStore:
    """Append-only review/sentence/annotation store rooted at a directory."""

    def __init__(
        self,
        root: str | Path,
        pipeline_config: PipelineConfig | None = None,
        segmentation_config: SegmentationConfig | None = None,
    ):
        self.root = Path(root)
        self.pipeline_config = pipeline_config or PipelineConfig()
        self.segmentation_config = segmentation_config or SegmentationConfig()
        self.reviews_path = self.root / "reviews.jsonl"
        self.sentences_path = self.root / "sentences.jsonl"
        self.annotations_path = self.root / "annotations.jsonl"
        self.selection_path = self.root / "selection.json"
        self._lock = threading.Lock()
        self._seq = 0
        self._state = _Snapshot()
        self.root.mkdir(parents=True, exist_ok=True)
        self._load()

    # -- loading ----------------------------------------------------------

    def _read_jsonl(self, path: Path) -> list[dict]:
        if not path.exists():
            return []
        records = []
        with path.open("r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError as e:
                    raise DataError(f"{path.name}:{lineno}: invalid JSON: {e}") from e
        return records

    def _load(self) -> None:
        reviews: dict[str, Review] = {}
        for obj in self._read_jsonl(self.reviews_path):
            r = Review.from_json(obj)
            reviews.setdefault(r.review_id, r)

        sentences: dict[str, Sentence] = {}
        by_review: dict[str, dict[str, Sentence]] = {}
        for obj in self._read_jsonl(self.sentences_path):
            s = Sentence.from_json(obj)
            if s.review_id not in reviews:
                raise DataError(f"sentence {s.sentence_id} references unknown review {s.review_id}")
            self._apply_sentence(by_review, s)
        for live in by_review.values():
            for s in live.values():
                sentences[s.sentence_id] = s

        latest: dict[tuple[str, str], tuple[str, int, Annotation]] = {}
        for obj in self._read_jsonl(self.annotations_path):
            a = Annotation.from_json(obj)
            self._seq += 1
            if a.sentence_id in sentences:
                key = (a.sentence_id, a.annotator_id)
                prev = latest.get(key)
                cand = (a.timestamp, self._seq, a)
                if prev is None or cand[:2] > prev[:2]:
                    latest[key] = cand

        selection = None
        if self.selection_path.exists():
            selection = tuple(json.loads(self.selection_path.read_text(encoding="utf-8")))

        self._state = _Snapshot(
            reviews=reviews,
            sentences=sentences,
            review_sentences={rid: self._ordered_ids(live) for rid, live in by_review.items()},
            latest_annotations=latest,
            selection=selection,
        )

    @staticmethod
    def _ordered_ids(live: dict[str, Sentence]) -> tuple[str, ...]:
        return tuple(s.sentence_id for s in sorted(live.values(), key=lambda s: s.ordinal))

    @staticmethod
    def _apply_sentence(by_review: dict[str, dict[str, Sentence]], s: Sentence) -> None:
        live = by_review.setdefault(s.review_id, {})
        drop = [
            sid
            for sid, t in live.items()
            if sid == s.sentence_id or (t.span_start < s.span_end and s.span_start < t.span_end)
        ]
        for sid in drop:
            del live[sid]
        live[s.sentence_id] = s

    # -- snapshot accessors -------------------------------------------------

    @property
    def snapshot(self) -> _Snapshot:
        return self._state

    def review(self, review_id: str) -> Review:
        try:
            return self._state.reviews[review_id]
        except KeyError:
            raise DataError(f"unknown review {review_id!r}") from None

    def sentence(self, sentence_id: str) -> Sentence:
        try:
            return self._state.sentences[sentence_id]
        except KeyError:
            raise DataError(f"unknown sentence {sentence_id!r}") from None

    def sentences_of(self, review_id: str) -> list[Sentence]:
        state = self._state
        return [state.sentences[sid] for sid in state.review_sentences.get(review_id, ())]

    def annotations_for(self, sentence_id: str) -> list[Annotation]:
        state = self._state
        return [v[2] for (sid, _), v in state.latest_annotations.items() if sid == sentence_id]

    def annotated_sentence_ids(self) -> set[str]:
        return {sid for (sid, _) in self._state.latest_annotations}

    # -- file helpers -------------------------------------------------------

    @staticmethod
    def _append_jsonl(path: Path, objs: list[dict]) -> None:
        with path.open("a", encoding="utf-8") as f:
            for obj in objs:
                f.write(json.dumps(obj, ensure_ascii=False) + "\n")

    # -- operations ---------------------------------------------------------

    def ingest_reviews(self, path: str | Path, strict: bool = False) -> int:
        """Append valid review records from a JSONL file, skipping duplicate ids.

        Invalid lines abort with DataError when strict, otherwise they are
        logged with their line number and skipped. Returns the number of
        newly stored reviews; re-ingesting the same file is a no-op.
        """
        path = Path(path)
        try:
            raw_lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise DataError(f"cannot read {path}: {e}") from e

        with self._lock:
            state = self._state
            known = dict(state.reviews)
            fresh: list[Review] = []
            for lineno, line in enumerate(raw_lines, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    r = Review.from_json(obj)
                except (json.JSONDecodeError, ValidationError) as e:
                    if strict:
                        raise DataError(f"{path.name}:{lineno}: {e}") from e
                    log.warning("%s:%d: skipping invalid review record: %s", path.name, lineno, e)
                    continue
                if r.review_id in known:
                    continue
                known[r.review_id] = r
                fresh.append(r)

            if fresh:
                self._append_jsonl(self.reviews_path, [r.to_json() for r in fresh])
                self._state = replace(state, reviews=known)
            return len(fresh)

    def sample_balanced(self, per_star: int) -> list[str]:
        """Pick up to ``per_star`` top reviews per (product, star) bucket.

        "Top" ranks by helpfulness_votes descending, then review_id ascending.
        The selection is persisted and returned in (product, star, rank) order.
        """
        if per_star < 1:
            raise ValueError(f"per_star must be >= 1, got {per_star}")
        with self._lock:
            state = self._state
            if not state.reviews:
                raise DataError("store has no reviews to sample")
            buckets: dict[tuple[str, int], list[Review]] = {}
            for r in state.reviews.values():
                buckets.setdefault((r.product_id, r.stars), []).append(r)
            selected: list[str] = []
            for key in sorted(buckets):
                ranked = sorted(buckets[key], key=lambda r: (-r.helpfulness_votes, r.review_id))
                selected.extend(r.review_id for r in ranked[:per_star])
            self.selection_path.write_text(
                json.dumps(selected, ensure_ascii=False, indent=0) + "\n", encoding="utf-8"
            )
            self._state = replace(state, selection=tuple(selected))
            return selected

    def segment(self, review_ids: list[str] | None = None, force: bool = False) -> int:
        """Segment reviews into sentences (selected reviews by default).

        Reviews that already have sentences are skipped unless ``force``;
        re-segmenting would discard manual splits and orphan annotations.
        Returns the number of sentences appended.
        """
        with self._lock:
            state = self._state
            if review_ids is None:
                review_ids = list(state.selection) if state.selection is not None else list(state.reviews)
            produced: list[Sentence] = []
            for rid in review_ids:
                if rid not in state.reviews:
                    raise DataError(f"unknown review {rid!r}")
                if state.review_sentences.get(rid) and not force:
                    continue
                produced.extend(segment_review(state.reviews[rid], self.segmentation_config))
            if produced:
                self._append_jsonl(self.sentences_path, [s.to_json() for s in produced])
                self._absorb_sentences(produced)
            return len(produced)

    def _absorb_sentences(self, produced: list[Sentence]) -> None:
        state = self._state
        by_review = {
            rid: {sid: state.sentences[sid] for sid in ids}
            for rid, ids in state.review_sentences.items()
        }
        for s in produced:
            self._apply_sentence(by_review, s)
        sentences = {s.sentence_id: s for live in by_review.values() for s in live.values()}
        latest = {
            key: val for key, val in state.latest_annotations.items() if key[0] in sentences
        }
        self._state = replace(
            state,
            sentences=sentences,
            review_sentences={rid: self._ordered_ids(live) for rid, live in by_review.items()},
            latest_annotations=latest,
        )

    def split_sentence(self, sentence_id: str, char_offset: int) -> tuple[Sentence, Sentence]:
        """Manually split one sentence at ``char_offset`` (relative to its span).

        The parent is superseded by two ``manual_split`` halves whose spans
        partition the original; following sentences shift one ordinal up.
        Refused when the offset touches a boundary, a half would be empty
        after trim, or the sentence already carries an annotation.
        """
        with self._lock:
            state = self._state
            if sentence_id not in state.sentences:
                raise DataError(f"unknown sentence {sentence_id!r}")
            if any(sid == sentence_id for (sid, _) in state.latest_annotations):
                raise ConflictError(f"sentence {sentence_id} is already annotated")
            parent = state.sentences[sentence_id]
            length = parent.span_end - parent.span_start
            if not (0 < char_offset < length):
                raise ValidationError(
                    f"char_offset must be strictly inside the span (0 < offset < {length})"
                )
            body = state.reviews[parent.review_id].body
            mid = parent.span_start + char_offset
            left_text = body[parent.span_start:mid].strip()
            right_text = body[mid:parent.span_end].strip()
            if not left_text or not right_text:
                raise ValidationError("both halves must be non-empty after trim")

            max_tokens = self.segmentation_config.max_tokens
            halves = [
                Sentence(
                    sentence_id=parent.sentence_id + suffix,
                    review_id=parent.review_id,
                    ordinal=parent.ordinal + i,
                    text=text,
                    span_start=a,
                    span_end=b,
                    origin="manual_split",
                    needs_review=len(text.split()) > max_tokens,
                )
                for i, (suffix, text, a, b) in enumerate(
                    [
                        ("a", left_text, parent.span_start, mid),
                        ("b", right_text, mid, parent.span_end),
                    ]
                )
            ]
            shifted = [
                replace(state.sentences[sid], ordinal=state.sentences[sid].ordinal + 1)
                for sid in state.review_sentences[parent.review_id]
                if state.sentences[sid].ordinal > parent.ordinal
            ]
            records = halves + shifted
            self._append_jsonl(self.sentences_path, [s.to_json() for s in records])
            self._absorb_sentences(records)
            return halves[0], halves[1]

    def record_annotation(self, a: Annotation) -> Annotation:
        """Validate and append one annotation; supersedes the annotator's prior
        record for the same sentence."""
        with self._lock:
            state = self._state
            if a.sentence_id not in state.sentences:
                raise DataError(f"unknown sentence {a.sentence_id!r}")
            if not a.annotator_id:
                raise ValidationError("annotator_id must be non-empty")
            sentence = state.sentences[a.sentence_id]
            n_tokens = len(tokenize(sentence.text, self.pipeline_config))
            if a.topic is Topic.OTHER:
                if a.keyword_span is not None:
                    raise ValidationError("topic 'other' must not carry a keyword_span")
            elif a.keyword_span is None:
                raise ValidationError(f"topic {a.topic.value!r} requires a keyword_span")
            for name, span in (
                ("keyword_span", a.keyword_span),
                ("opinion_span", a.opinion_span),
                ("modifier_span", a.modifier_span),
            ):
                if span is None:
                    continue
                start, end = span
                if not (0 <= start < end <= n_tokens):
                    raise ValidationError(
                        f"{name} [{start},{end}) out of token range 0..{n_tokens} "
                        f"for sentence {a.sentence_id}"
                    )
            self._append_jsonl(self.annotations_path, [a.to_json()])
            self._seq += 1
            latest = dict(state.latest_annotations)
            key = (a.sentence_id, a.annotator_id)
            prev = latest.get(key)
            cand = (a.timestamp, self._seq, a)
            if prev is None or cand[:2] > prev[:2]:
                latest[key] = cand
            self._state = replace(state, latest_annotations=latest)
            return a

    def check_invariants(self) -> None:
        """Raise DataError if any store invariant is violated.

        Checked: sentences reference existing reviews, per-review ordinals
        are contiguous from 0, spans tile the review body exactly, sentence
        text is the trimmed span substring, and annotations reference
        existing sentences with spans valid under the project tokenizer.
        """
        state = self._state
        for rid, sids in state.review_sentences.items():
            if rid not in state.reviews:
                raise DataError(f"sentences reference unknown review {rid!r}")
            body = state.reviews[rid].body
            sentences = [state.sentences[sid] for sid in sids]
            for ordinal, s in enumerate(sentences):
                if s.ordinal != ordinal:
                    raise DataError(f"review {rid}: ordinals not contiguous at {s.sentence_id}")
                if not (0 <= s.span_start < s.span_end <= len(body)):
                    raise DataError(f"sentence {s.sentence_id}: span outside body bounds")
                if s.text != body[s.span_start:s.span_end].strip():
                    raise DataError(f"sentence {s.sentence_id}: text does not match its span")
            if sentences:
                if sentences[0].span_start != 0 or sentences[-1].span_end != len(body):
                    raise DataError(f"review {rid}: spans do not cover the body")
                for prev, nxt in zip(sentences, sentences[1:]):
                    if prev.span_end != nxt.span_start:
                        raise DataError(f"review {rid}: span gap before {nxt.sentence_id}")
        for (sid, annotator), (_, _, a) in state.latest_annotations.items():
            if sid not in state.sentences:
                raise DataError(f"annotation by {annotator} references unknown sentence {sid!r}")
            n_tokens = len(tokenize(state.sentences[sid].text, self.pipeline_config))
            for name, span in (
                ("keyword_span", a.keyword_span),
                ("opinion_span", a.opinion_span),
                ("modifier_span", a.modifier_span),
            ):
                if span is not None and not (0 <= span[0] < span[1] <= n_tokens):
                    raise DataError(f"annotation on {sid}: {name} out of token range")
            if a.topic is Topic.OTHER and a.keyword_span is not None:
                raise DataError(f"annotation on {sid}: topic 'other' carries a keyword_span")
            if a.topic is not Topic.OTHER and a.keyword_span is None:
                raise DataError(f"annotation on {sid}: missing keyword_span")

    def export_gold(self) -> LabeledDataset:
        """Resolve annotations into one labeled record per sentence.

        Keeps each annotator's latest record, takes the majority topic
        across annotators (ties drop the sentence with a warning), and copies
        polarity/spans from the most recent majority-topic annotation.
        Output is ordered by sentence_id.
        """
        state = self._state
        if not state.latest_annotations:
            raise DataError("no annotations to export")
        per_sentence: dict[str, list[tuple[str, int, Annotation]]] = {}
        for (sid, _), val in state.latest_annotations.items():
            per_sentence.setdefault(sid, []).append(val)

        gold: LabeledDataset = []
        dropped = 0
        for sid in sorted(per_sentence):
            votes: dict[Topic, int] = {}
            for _, _, a in per_sentence[sid]:
                votes[a.topic] = votes.get(a.topic, 0) + 1
            best = max(votes.values())
            winners = [t for t, c in votes.items() if c == best]
            if len(winners) > 1:
                dropped += 1
                continue
            topic = winners[0]
            _, _, chosen = max(
                (v for v in per_sentence[sid] if v[2].topic is topic), key=lambda v: v[:2]
            )
            gold.append(
                GoldRecord(
                    sentence_id=sid,
                    text=state.sentences[sid].text,
                    topic=topic,
                    polarity=chosen.polarity,
                    keyword_span=chosen.keyword_span,
                    opinion_span=chosen.opinion_span,
                    modifier_span=chosen.modifier_span,
                )
            )
        if dropped:
            log.warning("export_gold dropped %d sentence(s) with tied topic votes", dropped)
        return gold
