"""Deterministic tokenization, vocabulary construction and sparse vectors.

Every classifier consumes this pipeline, and annotation spans index into
its token output, so all of it is pure and stable: same input, same config,
same result, every run.
"""

import math
import unicodedata
from dataclasses import dataclass, field
from importlib import resources


def _shipped_stopwords() -> frozenset[str]:
    text = resources.files("qinu.data").joinpath("stopwords.txt").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


# Negators and intensifiers are deliberately absent from the shipped list;
# polarity scoring needs them to survive tokenization.
DEFAULT_STOPWORDS = _shipped_stopwords()


@dataclass(frozen=True)
class PipelineConfig:
    lowercase: bool = True
    strip_punctuation: bool = True
    stopwords: frozenset[str] = DEFAULT_STOPWORDS
    min_token_len: int = 1

    def __post_init__(self):
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")
        if not isinstance(self.stopwords, frozenset):
            object.__setattr__(self, "stopwords", frozenset(self.stopwords))

    def to_json(self) -> dict:
        return {
            "lowercase": self.lowercase,
            "strip_punctuation": self.strip_punctuation,
            "stopwords": sorted(self.stopwords),
            "min_token_len": self.min_token_len,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PipelineConfig":
        return cls(
            lowercase=bool(obj.get("lowercase", True)),
            strip_punctuation=bool(obj.get("strip_punctuation", True)),
            stopwords=frozenset(obj["stopwords"]) if "stopwords" in obj else DEFAULT_STOPWORDS,
            min_token_len=int(obj.get("min_token_len", 1)),
        )


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _strip_edges(token: str) -> str:
    start, end = 0, len(token)
    while start < end and _is_punct(token[start]):
        start += 1
    while end > start and _is_punct(token[end - 1]):
        end -= 1
    return token[start:end]


def tokenize(text: str, config: PipelineConfig | None = None) -> list[str]:
    """Whitespace-split tokens, edge punctuation stripped, stopwords removed.

    Interior punctuation survives ("v2.0", "won't"); tokens emptied by
    stripping or shorter than min_token_len are dropped.
    """
    config = config or PipelineConfig()
    out = []
    for raw in text.split():
        tok = _strip_edges(raw) if config.strip_punctuation else raw
        if config.lowercase:
            tok = tok.lower()
        if len(tok) < config.min_token_len:
            continue
        if tok in config.stopwords:
            continue
        out.append(tok)
    return out


def token_count(text: str, config: PipelineConfig | None = None) -> int:
    """Pre-stopword token count: the sentence-length measure used by the
    length-bucket analysis."""
    config = config or PipelineConfig()
    if config.stopwords:
        config = PipelineConfig(
            lowercase=config.lowercase,
            strip_punctuation=config.strip_punctuation,
            stopwords=frozenset(),
            min_token_len=config.min_token_len,
        )
    return len(tokenize(text, config))


@dataclass(frozen=True)
class Vocabulary:
    """Dense term ids in first-occurrence order plus document frequencies.

    Built from training-fold documents only; prediction treats everything
    else as out-of-vocabulary.
    """

    term_to_id: dict[str, int]
    document_frequency: tuple[int, ...]
    n_documents: int

    def __len__(self) -> int:
        return len(self.term_to_id)

    def id_of(self, term: str) -> int | None:
        return self.term_to_id.get(term)

    @property
    def terms(self) -> list[str]:
        ordered = [""] * len(self.term_to_id)
        for term, tid in self.term_to_id.items():
            ordered[tid] = term
        return ordered

    def to_json(self) -> dict:
        return {
            "terms": self.terms,
            "document_frequency": list(self.document_frequency),
            "n_documents": self.n_documents,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Vocabulary":
        return cls(
            term_to_id={t: i for i, t in enumerate(obj["terms"])},
            document_frequency=tuple(obj["document_frequency"]),
            n_documents=int(obj["n_documents"]),
        )


def build_vocabulary(docs: list[list[str]]) -> Vocabulary:
    """Assign term ids in first-occurrence order; df counts distinct docs."""
    if not docs:
        raise ValueError("docs must be non-empty")
    term_to_id: dict[str, int] = {}
    df: list[int] = []
    for doc in docs:
        seen = set()
        for tok in doc:
            tid = term_to_id.get(tok)
            if tid is None:
                tid = len(term_to_id)
                term_to_id[tok] = tid
                df.append(0)
            if tid not in seen:
                seen.add(tid)
                df[tid] += 1
    return Vocabulary(term_to_id=term_to_id, document_frequency=tuple(df), n_documents=len(docs))


@dataclass(frozen=True)
class TermVector:
    """Sparse term_id -> weight map; zero weights are never stored."""

    weights: dict[int, float]
    length_tokens: int

    @property
    def total(self) -> float:
        return sum(self.weights.values())

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights.values()))


def vectorize_counts(
    tokens: list[str], vocab: Vocabulary, length_tokens: int | None = None
) -> TermVector:
    """Raw in-vocabulary term counts. OOV tokens still count toward
    length_tokens; pass an explicit length to record the pre-stopword count."""
    weights: dict[int, float] = {}
    for tok in tokens:
        tid = vocab.id_of(tok)
        if tid is not None:
            weights[tid] = weights.get(tid, 0.0) + 1.0
    return TermVector(weights=weights, length_tokens=len(tokens) if length_tokens is None else length_tokens)


def tfidf_transform(v: TermVector, vocab: Vocabulary, l2_normalize: bool = True) -> TermVector:
    """weight(t) = count(t) * ln(N / df(t)), dropping terms present in every
    training document (idf 0), then L2-normalized by default."""
    n = vocab.n_documents
    weights: dict[int, float] = {}
    for tid, count in v.weights.items():
        df = vocab.document_frequency[tid]
        if df >= n:
            continue
        weights[tid] = count * math.log(n / df)
    if l2_normalize and weights:
        norm = math.sqrt(sum(w * w for w in weights.values()))
        if norm > 0:
            weights = {tid: w / norm for tid, w in weights.items()}
    return TermVector(weights=weights, length_tokens=v.length_tokens)
