"""Word- and sentence-level semantic similarity.

Two interchangeable word measures back the sentence measure: a taxonomy
path/depth similarity (exp(-alpha*l) * tanh(beta*h) over synset pairs) and
a trigram co-occurrence relatedness computed from a local frequency table.
The sentence measure blends a semantic-vector cosine with a word-order
term: delta*Ss + (1-delta)*So.

Everything here is pure and symmetric; unknown words score 0 rather than
raising, so classification degrades gracefully on unseen text.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError


@dataclass(frozen=True)
class WordSimParams:
    alpha: float = 0.2   # path-length decay
    beta: float = 0.45   # depth scaling

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")


@dataclass(frozen=True)
class SentenceSimParams:
    delta: float = 0.85          # semantic vs word-order blend
    backend: str = "ngram"       # "taxonomy" | "ngram"
    order_threshold: float = 0.4
    word_params: WordSimParams = field(default_factory=WordSimParams)

    def __post_init__(self):
        if not (0.0 <= self.delta <= 1.0):
            raise ValueError("delta must be in [0, 1]")
        if self.backend not in ("taxonomy", "ngram"):
            raise ValueError(f"unknown backend {self.backend!r}")

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "backend": self.backend,
            "order_threshold": self.order_threshold,
            "alpha": self.word_params.alpha,
            "beta": self.word_params.beta,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SentenceSimParams":
        return cls(
            delta=float(obj.get("delta", 0.85)),
            backend=str(obj.get("backend", "ngram")),
            order_threshold=float(obj.get("order_threshold", 0.4)),
            word_params=WordSimParams(
                alpha=float(obj.get("alpha", 0.2)), beta=float(obj.get("beta", 0.45))
            ),
        )


class Taxonomy:
    """A word taxonomy: synsets of words linked child-to-parent into a forest.

    A virtual root at depth 0 adopts every parentless synset, so top-level
    synsets have depth 1 and any two synsets share at least the virtual root.
    """

    def __init__(self, synsets: list[tuple[str, list[str], str | None]]):
        self._parent: dict[str, str | None] = {}
        self._words: dict[str, list[str]] = {}
        self._word_to_synsets: dict[str, list[str]] = {}
        for sid, words, parent in synsets:
            if sid in self._parent:
                raise DataError(f"duplicate synset id {sid!r}")
            self._parent[sid] = parent
            self._words[sid] = list(words)
        for sid, parent in self._parent.items():
            if parent is not None and parent not in self._parent:
                raise DataError(f"synset {sid!r} references unknown parent {parent!r}")
        self._depth: dict[str, int] = {}
        for sid in self._parent:
            self._depth_of(sid, trail=set())
        for sid, words in self._words.items():
            for w in words:
                self._word_to_synsets.setdefault(w.casefold(), []).append(sid)

    def _depth_of(self, sid: str, trail: set) -> int:
        if sid in self._depth:
            return self._depth[sid]
        if sid in trail:
            raise DataError(f"taxonomy cycle through synset {sid!r}")
        trail.add(sid)
        parent = self._parent[sid]
        d = 1 if parent is None else self._depth_of(parent, trail) + 1
        self._depth[sid] = d
        return d

    def depth(self, sid: str) -> int:
        return self._depth[sid]

    def synsets_of(self, word: str) -> list[str]:
        return self._word_to_synsets.get(word.casefold(), [])

    def _ancestors(self, sid: str) -> dict[str, int]:
        out = {}
        cur: str | None = sid
        while cur is not None:
            out[cur] = self._depth[cur]
            cur = self._parent[cur]
        return out

    def path_and_depth(self, s1: str, s2: str) -> tuple[int, int]:
        """(shortest path length l, depth h of the deepest common ancestor);
        h = 0 means the only common ancestor is the virtual root."""
        a1 = self._ancestors(s1)
        a2 = self._ancestors(s2)
        h = max((d for sid, d in a1.items() if sid in a2), default=0)
        l = self._depth[s1] + self._depth[s2] - 2 * h
        return l, h

    @classmethod
    def load(cls, path: str | Path) -> "Taxonomy":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
            synsets = [(str(s["id"]), list(s["words"]), s.get("parent")) for s in obj["synsets"]]
        except (OSError, KeyError, TypeError, json.JSONDecodeError) as e:
            raise DataError(f"cannot load taxonomy from {path}: {e}") from e
        return cls(synsets)


def word_similarity_taxonomy(
    w1: str, w2: str, tax: Taxonomy, p: WordSimParams | None = None
) -> float:
    """Max over synset pairs of exp(-alpha*l) * tanh(beta*h); identical words
    score 1.0 and words outside the taxonomy score 0.0."""
    if w1.casefold() == w2.casefold():
        return 1.0
    p = p or WordSimParams()
    s1 = tax.synsets_of(w1)
    s2 = tax.synsets_of(w2)
    if not s1 or not s2:
        return 0.0
    best = 0.0
    for a in s1:
        for b in s2:
            l, h = tax.path_and_depth(a, b)
            best = max(best, math.exp(-p.alpha * l) * math.tanh(p.beta * h))
    return min(best, 1.0)


class NgramTable:
    """Unigram and trigram counts standing in for a web-scale corpus."""

    def __init__(self, unigrams: dict[str, int], trigrams: dict[tuple[str, str, str], int]):
        self.unigrams = dict(unigrams)
        self.trigrams = dict(trigrams)
        self.total_unigrams = sum(self.unigrams.values())
        self._member: dict[str, set[tuple[str, str, str]]] = {}
        for tri in self.trigrams:
            for w in set(tri):
                self._member.setdefault(w, set()).add(tri)

    def count(self, word: str) -> int:
        return self.unigrams.get(word.casefold(), 0)

    def trigrams_with_both(self, w1: str, w2: str) -> list[int]:
        t1 = self._member.get(w1.casefold())
        t2 = self._member.get(w2.casefold())
        if not t1 or not t2:
            return []
        return [self.trigrams[tri] for tri in sorted(t1 & t2)]

    def to_json(self) -> dict:
        return {
            "unigrams": dict(sorted(self.unigrams.items())),
            "trigrams": [
                {"w": list(tri), "count": c} for tri, c in sorted(self.trigrams.items())
            ],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json(), ensure_ascii=False, indent=0) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "NgramTable":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
            unigrams = {str(w): int(c) for w, c in obj["unigrams"].items()}
            trigrams = {tuple(e["w"]): int(e["count"]) for e in obj["trigrams"]}
        except (OSError, KeyError, TypeError, json.JSONDecodeError) as e:
            raise DataError(f"cannot load ngram table from {path}: {e}") from e
        return cls(unigrams, trigrams)


def build_ngram_table(docs: list[list[str]]) -> NgramTable:
    """Count unigrams and sliding-window trigrams over tokenized documents."""
    unigrams: dict[str, int] = {}
    trigrams: dict[tuple[str, str, str], int] = {}
    for doc in docs:
        toks = [t.casefold() for t in doc]
        for t in toks:
            unigrams[t] = unigrams.get(t, 0) + 1
        for i in range(len(toks) - 2):
            tri = (toks[i], toks[i + 1], toks[i + 2])
            trigrams[tri] = trigrams.get(tri, 0) + 1
    return NgramTable(unigrams, trigrams)


def word_relatedness_ngram(w1: str, w2: str, table: NgramTable) -> float:
    """min(1, mu / max(c(w1), c(w2))) where mu is the mean count of trigrams
    containing both words; 0.0 without co-occurrence or for unknown words."""
    if w1.casefold() == w2.casefold():
        return 1.0
    c1, c2 = table.count(w1), table.count(w2)
    denom = max(c1, c2)
    if min(c1, c2) == 0 or denom == 0:
        return 0.0
    counts = table.trigrams_with_both(w1, w2)
    if not counts:
        return 0.0
    mu = sum(counts) / len(counts)
    return min(1.0, mu / denom)


def make_word_sim(params: SentenceSimParams, knowledge) -> "callable":
    """Bind the configured backend into a (w1, w2) -> [0,1] function."""
    if params.backend == "taxonomy":
        if not isinstance(knowledge, Taxonomy):
            raise ValueError("taxonomy backend needs a Taxonomy knowledge source")
        return lambda a, b: word_similarity_taxonomy(a, b, knowledge, params.word_params)
    if not isinstance(knowledge, NgramTable):
        raise ValueError("ngram backend needs an NgramTable knowledge source")
    return lambda a, b: word_relatedness_ngram(a, b, knowledge)


def sentence_similarity(
    s1: list[str],
    s2: list[str],
    params: SentenceSimParams | None = None,
    knowledge=None,
    _word_sim=None,
) -> float:
    """Blend of semantic-vector cosine and word-order agreement in [0, 1].

    Over the joint word set of both sentences, each sentence contributes a
    semantic vector of best word similarities (Ss = their cosine) and a
    word-order vector of 1-based best-match positions, zeroed below the
    order threshold (So = 1 - |r1-r2|/|r1+r2|, defined as 1 when both order
    vectors are all-zero or identical). Note So is exactly 0 for sentences
    with disjoint vocabularies and no cross similarity: the order vectors
    have disjoint support, which makes |r1-r2| = |r1+r2|, so two unrelated
    sentences score 0.0 overall, not (1-delta).
    """
    if not s1 or not s2:
        raise ValueError("sentence token lists must be non-empty")
    params = params or SentenceSimParams()
    word_sim = _word_sim or make_word_sim(params, knowledge)

    joint: list[str] = []
    seen = set()
    for tok in list(s1) + list(s2):
        if tok not in seen:
            seen.add(tok)
            joint.append(tok)

    def vectors(tokens: list[str]) -> tuple[list[float], list[int]]:
        sem, order = [], []
        for w in joint:
            best, best_pos = 0.0, 0
            for pos, tok in enumerate(tokens, start=1):
                s = word_sim(w, tok)
                if s > best:
                    best, best_pos = s, pos
            sem.append(best)
            order.append(best_pos if best > params.order_threshold else 0)
        return sem, order

    v1, r1 = vectors(list(s1))
    v2, r2 = vectors(list(s2))

    n1 = math.sqrt(sum(x * x for x in v1))
    n2 = math.sqrt(sum(x * x for x in v2))
    ss = sum(a * b for a, b in zip(v1, v2)) / (n1 * n2) if n1 > 0 and n2 > 0 else 0.0

    diff = math.sqrt(sum((a - b) ** 2 for a, b in zip(r1, r2)))
    summ = math.sqrt(sum((a + b) ** 2 for a, b in zip(r1, r2)))
    so = 1.0 if summ == 0.0 else 1.0 - diff / summ

    return params.delta * ss + (1.0 - params.delta) * so
