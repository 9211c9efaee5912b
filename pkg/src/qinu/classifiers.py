"""Four interchangeable topic classifiers over tokenized sentences.

- multinomial naive Bayes on raw counts (Laplace-smoothed)
- one-vs-rest linear SVM on tf-idf, trained by seeded Pegasos-style
  subgradient descent on the regularized hinge loss
- latent semantic analysis: truncated SVD of the tf-idf matrix with
  nearest-centroid classification in the reduced space
- similarity-based: per-class exemplar sentences scored with the sentence
  similarity measure, mean of the top 3 matches per class

All training is deterministic given (data, hyperparameters, seed); trained
models are immutable and safe for concurrent prediction. Unknown words are
ignored everywhere, never an error.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import TOPIC_ORDER, LabeledDataset, Topic
from .errors import DataError
from .pipeline import PipelineConfig, TermVector, Vocabulary, build_vocabulary, tfidf_transform, tokenize, vectorize_counts
from .similarity import NgramTable, SentenceSimParams, Taxonomy, make_word_sim

LabeledTokens = list[tuple[list[str], Topic]]

MODEL_FORMAT_VERSION = 1


def tokenize_dataset(gold: LabeledDataset, config: PipelineConfig | None = None) -> LabeledTokens:
    return [(tokenize(rec.text, config), rec.topic) for rec in gold]


@dataclass(frozen=True)
class Prediction:
    topic: Topic
    scores: dict[Topic, float]


def _argmax_topic(scores: dict[Topic, float]) -> Topic:
    best_topic = TOPIC_ORDER[0]
    best = scores.get(best_topic, -math.inf)
    for t in TOPIC_ORDER[1:]:
        s = scores.get(t, -math.inf)
        if s > best:
            best, best_topic = s, t
    return best_topic


def _prediction(scores: dict[Topic, float]) -> Prediction:
    full = {t: scores.get(t, -math.inf) for t in TOPIC_ORDER}
    return Prediction(topic=_argmax_topic(full), scores=full)


def _resolve_classes(data: LabeledTokens, classes) -> list[Topic]:
    if not data:
        raise ValueError("training data must be non-empty")
    present = {label for _, label in data}
    if classes is None:
        return [t for t in TOPIC_ORDER if t in present]
    classes = list(classes)
    missing = [t.value for t in classes if t not in present]
    if missing:
        raise DataError(f"no training examples for class(es): {', '.join(missing)}")
    return classes


def _tfidf_rows(data_tokens: list[list[str]], vocab: Vocabulary) -> np.ndarray:
    X = np.zeros((len(data_tokens), len(vocab)))
    for i, toks in enumerate(data_tokens):
        tv = tfidf_transform(vectorize_counts(toks, vocab), vocab)
        for tid, w in tv.weights.items():
            X[i, tid] = w
    return X


def _tfidf_vector(tokens: list[str], vocab: Vocabulary) -> np.ndarray:
    x = np.zeros(len(vocab))
    tv = tfidf_transform(vectorize_counts(tokens, vocab), vocab)
    for tid, w in tv.weights.items():
        x[tid] = w
    return x


# ---------------------------------------------------------------------------
# Multinomial naive Bayes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NbModel:
    classes: tuple[Topic, ...]
    log_prior: dict[Topic, float]
    log_likelihood: dict[Topic, np.ndarray]  # per term id
    smoothing: float
    vocab: Vocabulary


def train_nb(
    data: LabeledTokens,
    smoothing: float = 1.0,
    vocab: Vocabulary | None = None,
    classes=None,
) -> NbModel:
    """log_prior(c) = ln(n_c/n); log_likelihood(t|c) = ln((count(t,c)+s) / (tokens_c + s*|V|))."""
    if smoothing <= 0:
        raise ValueError(f"smoothing must be > 0, got {smoothing}")
    classes = _resolve_classes(data, classes)
    data = [(toks, label) for toks, label in data if label in set(classes)]
    if vocab is None:
        vocab = build_vocabulary([toks for toks, _ in data])
    n = len(data)
    V = len(vocab)
    counts = {c: np.zeros(V) for c in classes}
    n_class = {c: 0 for c in classes}
    for toks, label in data:
        n_class[label] += 1
        row = counts[label]
        for tok in toks:
            tid = vocab.id_of(tok)
            if tid is not None:
                row[tid] += 1.0
    log_prior = {c: math.log(n_class[c] / n) for c in classes}
    log_likelihood = {}
    for c in classes:
        denom = counts[c].sum() + smoothing * V
        log_likelihood[c] = np.log((counts[c] + smoothing) / denom) if V else np.zeros(0)
    return NbModel(
        classes=tuple(classes),
        log_prior=log_prior,
        log_likelihood=log_likelihood,
        smoothing=smoothing,
        vocab=vocab,
    )


def _predict_nb(model: NbModel, tokens: list[str]) -> Prediction:
    tids = [tid for tid in (model.vocab.id_of(t) for t in tokens) if tid is not None]
    scores = {}
    for c in model.classes:
        s = model.log_prior[c]
        ll = model.log_likelihood[c]
        for tid in tids:
            s += ll[tid]
        scores[c] = s
    return _prediction(scores)


# ---------------------------------------------------------------------------
# One-vs-rest linear SVM
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SvmHyper:
    lam: float = 1e-3
    epochs: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass(frozen=True)
class SvmModel:
    classes: tuple[Topic, ...]
    weights: dict[Topic, np.ndarray]
    bias: dict[Topic, float]
    hyper: SvmHyper
    vocab: Vocabulary
    objective_history: tuple[float, ...] = ()  # total regularized hinge after each epoch


def svm_objective(X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, lam: float) -> float:
    """Regularized hinge objective for one binary machine."""
    margins = y * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * lam * float(w @ w) + float(hinge.mean())


def train_svm(
    data: LabeledTokens,
    hyper: SvmHyper | None = None,
    vocab: Vocabulary | None = None,
    classes=None,
) -> SvmModel:
    """One binary hinge-loss machine per class, subgradient steps 1/(lam*t).

    Sample order is a seeded per-epoch shuffle shared by all machines, so a
    fixed seed reproduces the weights bit for bit.
    """
    hyper = hyper or SvmHyper()
    classes = _resolve_classes(data, classes)
    if len(classes) < 2:
        raise DataError("SVM training needs at least 2 classes")
    data = [(toks, label) for toks, label in data if label in set(classes)]
    if vocab is None:
        vocab = build_vocabulary([toks for toks, _ in data])
    X = _tfidf_rows([toks for toks, _ in data], vocab)
    labels = [label for _, label in data]
    n = len(data)

    rng = np.random.default_rng(hyper.seed)
    epoch_orders = [rng.permutation(n) for _ in range(hyper.epochs)]

    weights: dict[Topic, np.ndarray] = {}
    bias: dict[Topic, float] = {}
    per_epoch: list[float] = [0.0] * hyper.epochs
    for c in classes:
        y = np.array([1.0 if label is c else -1.0 for label in labels])
        w = np.zeros(X.shape[1])
        b = 0.0
        t = 0
        for epoch, order in enumerate(epoch_orders):
            for i in order:
                t += 1
                eta = 1.0 / (hyper.lam * t)
                x = X[i]
                if y[i] * (x @ w + b) < 1.0:
                    w *= 1.0 - eta * hyper.lam
                    w += eta * y[i] * x
                    b += eta * y[i]
                else:
                    w *= 1.0 - eta * hyper.lam
            per_epoch[epoch] += svm_objective(X, y, w, b, hyper.lam)
        weights[c] = w
        bias[c] = b
    return SvmModel(
        classes=tuple(classes),
        weights=weights,
        bias=bias,
        hyper=hyper,
        vocab=vocab,
        objective_history=tuple(per_epoch),
    )


def _predict_svm(model: SvmModel, tokens: list[str]) -> Prediction:
    x = _tfidf_vector(tokens, model.vocab)
    scores = {c: float(model.weights[c] @ x + model.bias[c]) for c in model.classes}
    return _prediction(scores)


# ---------------------------------------------------------------------------
# Latent semantic analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LsaModel:
    rank: int
    projection: np.ndarray        # |V| x k, orthonormal columns
    singular_values: np.ndarray   # length k, non-increasing
    centroids: dict[Topic, np.ndarray]
    classes: tuple[Topic, ...]
    vocab: Vocabulary


def default_lsa_rank(n_documents: int, vocab_size: int) -> int:
    return max(1, min(100, n_documents - 1, vocab_size))


def train_lsa(
    data: LabeledTokens,
    rank: int | None = None,
    vocab: Vocabulary | None = None,
    classes=None,
) -> LsaModel:
    """Truncated SVD of the tf-idf document matrix; class centroids are means
    of the projected, L2-normalized training documents."""
    classes = _resolve_classes(data, classes)
    data = [(toks, label) for toks, label in data if label in set(classes)]
    if vocab is None:
        vocab = build_vocabulary([toks for toks, _ in data])
    X = _tfidf_rows([toks for toks, _ in data], vocab)
    n, V = X.shape
    if rank is None:
        rank = default_lsa_rank(n, V)
    if not (1 <= rank <= min(V, n)):
        raise ValueError(f"rank must be in [1, {min(V, n)}], got {rank}")
    if not np.any(X):
        raise DataError("degenerate all-zero document matrix (no discriminating terms)")

    _, s, vt = np.linalg.svd(X, full_matrices=False)
    projection = vt[:rank].T
    docs_k = X @ projection
    norms = np.linalg.norm(docs_k, axis=1)
    normed = np.divide(docs_k, norms[:, None], out=np.zeros_like(docs_k), where=norms[:, None] > 0)

    labels = [label for _, label in data]
    centroids = {}
    for c in classes:
        rows = normed[[i for i, label in enumerate(labels) if label is c]]
        centroids[c] = rows.mean(axis=0)
    return LsaModel(
        rank=rank,
        projection=projection,
        singular_values=s[:rank].copy(),
        centroids=centroids,
        classes=tuple(classes),
        vocab=vocab,
    )


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b / (na * nb))


def _predict_lsa(model: LsaModel, tokens: list[str]) -> Prediction:
    x = _tfidf_vector(tokens, model.vocab)
    p = x @ model.projection
    scores = {c: _cosine(p, model.centroids[c]) for c in model.classes}
    return _prediction(scores)


# ---------------------------------------------------------------------------
# Similarity-based classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimSentModel:
    exemplars: dict[Topic, list[list[str]]]
    params: SentenceSimParams
    knowledge: Taxonomy | NgramTable
    classes: tuple[Topic, ...]
    top_k: int = 3


def train_simsent(
    data: LabeledTokens,
    params: SentenceSimParams | None = None,
    knowledge=None,
    classes=None,
) -> SimSentModel:
    """Store all training sentences as per-class exemplars (dataset order)."""
    params = params or SentenceSimParams()
    if knowledge is None:
        raise ValueError("simsent training needs a knowledge source (Taxonomy or NgramTable)")
    classes = _resolve_classes(data, classes)
    exemplars: dict[Topic, list[list[str]]] = {c: [] for c in classes}
    for toks, label in data:
        if label in exemplars:
            exemplars[label].append(list(toks))
    return SimSentModel(
        exemplars=exemplars, params=params, knowledge=knowledge, classes=tuple(classes)
    )


class SimsentScorer:
    """Vectorized pair scorer, numerically equivalent to
    similarity.sentence_similarity on the model's word-sim backend.

    Word similarities over the exemplar vocabulary are computed once; per
    test sentence only the cross block against unseen words is added.
    """

    def __init__(self, model: SimSentModel):
        self.model = model
        self.word_sim = make_word_sim(model.params, model.knowledge)
        self.words: list[str] = []
        self.index: dict[str, int] = {}
        for toks in (t for ex in model.exemplars.values() for t in ex):
            for tok in toks:
                if tok not in self.index:
                    self.index[tok] = len(self.words)
                    self.words.append(tok)
        W = len(self.words)
        self.base = np.zeros((W, W))
        for i in range(W):
            self.base[i, i] = 1.0
            for j in range(i + 1, W):
                s = self.word_sim(self.words[i], self.words[j])
                self.base[i, j] = s
                self.base[j, i] = s
        self.exemplar_ids = {
            c: [np.array([self.index[t] for t in toks], dtype=int) for toks in exs]
            for c, exs in model.exemplars.items()
        }

    def _extend(self, tokens: list[str]) -> tuple[np.ndarray, np.ndarray]:
        """Similarity matrix covering base words plus this sentence's new words."""
        new = []
        for tok in tokens:
            if tok not in self.index and tok not in new:
                new.append(tok)
        W = len(self.words)
        if not new:
            ids = np.array([self.index[t] for t in tokens], dtype=int)
            return self.base, ids
        n_ext = W + len(new)
        ext = np.zeros((n_ext, n_ext))
        ext[:W, :W] = self.base
        lookup = dict(self.index)
        for k, tok in enumerate(new):
            lookup[tok] = W + k
        for k, tok in enumerate(new):
            row = W + k
            ext[row, row] = 1.0
            for j, w in enumerate(self.words):
                s = self.word_sim(tok, w)
                ext[row, j] = s
                ext[j, row] = s
            for other in new[:k]:
                s = self.word_sim(tok, other)
                ext[row, lookup[other]] = s
                ext[lookup[other], row] = s
        ids = np.array([lookup[t] for t in tokens], dtype=int)
        return ext, ids

    def _pair(self, mat: np.ndarray, ids1: np.ndarray, ids2: np.ndarray) -> float:
        params = self.model.params
        joint = list(dict.fromkeys(ids1.tolist() + ids2.tolist()))
        j = np.array(joint, dtype=int)

        def side(ids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            sub = mat[np.ix_(j, ids)]
            sem = sub.max(axis=1)
            pos = sub.argmax(axis=1) + 1
            order = np.where(sem > params.order_threshold, pos, 0)
            return sem, order

        v1, r1 = side(ids1)
        v2, r2 = side(ids2)
        n1 = np.linalg.norm(v1)
        n2 = np.linalg.norm(v2)
        ss = float(v1 @ v2 / (n1 * n2)) if n1 > 0 and n2 > 0 else 0.0
        summ = np.linalg.norm(r1 + r2)
        so = 1.0 if summ == 0.0 else 1.0 - float(np.linalg.norm(r1 - r2)) / float(summ)
        return params.delta * ss + (1.0 - params.delta) * so

    def score(self, tokens: list[str]) -> dict[Topic, float]:
        model = self.model
        if not tokens:
            return {c: 0.0 for c in model.classes}
        mat, ids = self._extend(tokens)
        scores = {}
        for c in model.classes:
            sims = [
                self._pair(mat, ids, ex_ids) if len(ex_ids) else 0.0
                for ex_ids in self.exemplar_ids[c]
            ]
            if not sims:
                scores[c] = 0.0
                continue
            sims.sort(reverse=True)
            top = sims[: model.top_k]
            scores[c] = sum(top) / len(top)
        return scores


_SCORER_CACHE: dict[int, SimsentScorer] = {}


def _predict_simsent(model: SimSentModel, tokens: list[str]) -> Prediction:
    scorer = _SCORER_CACHE.get(id(model))
    if scorer is None or scorer.model is not model:
        scorer = SimsentScorer(model)
        _SCORER_CACHE.clear()
        _SCORER_CACHE[id(model)] = scorer
    return _prediction(scorer.score(tokens))


# ---------------------------------------------------------------------------
# Shared predict + persistence
# ---------------------------------------------------------------------------

ClassifierModel = NbModel | SvmModel | LsaModel | SimSentModel

KINDS = ("nb", "svm", "lsa", "simsent")


def model_kind(model: ClassifierModel) -> str:
    return {NbModel: "nb", SvmModel: "svm", LsaModel: "lsa", SimSentModel: "simsent"}[type(model)]


def predict(model: ClassifierModel, tokens: list[str]) -> Prediction:
    """Score all four topics and return the argmax (ties break in fixed
    topic order)."""
    if isinstance(model, NbModel):
        return _predict_nb(model, tokens)
    if isinstance(model, SvmModel):
        return _predict_svm(model, tokens)
    if isinstance(model, LsaModel):
        return _predict_lsa(model, tokens)
    if isinstance(model, SimSentModel):
        return _predict_simsent(model, tokens)
    raise TypeError(f"not a trained classifier model: {type(model).__name__}")


def _knowledge_to_json(knowledge) -> dict:
    if isinstance(knowledge, NgramTable):
        return {"type": "ngram", **knowledge.to_json()}
    if isinstance(knowledge, Taxonomy):
        return {
            "type": "taxonomy",
            "synsets": [
                {"id": sid, "words": knowledge._words[sid], "parent": knowledge._parent[sid]}
                for sid in sorted(knowledge._parent)
            ],
        }
    raise TypeError(f"unknown knowledge source {type(knowledge).__name__}")


def _knowledge_from_json(obj: dict):
    if obj["type"] == "ngram":
        return NgramTable(
            {str(w): int(c) for w, c in obj["unigrams"].items()},
            {tuple(e["w"]): int(e["count"]) for e in obj["trigrams"]},
        )
    return Taxonomy([(s["id"], list(s["words"]), s.get("parent")) for s in obj["synsets"]])


def save_model(model: ClassifierModel, path: str | Path) -> None:
    kind = model_kind(model)
    obj: dict = {"format_version": MODEL_FORMAT_VERSION, "kind": kind}
    if isinstance(model, NbModel):
        obj.update(
            classes=[c.value for c in model.classes],
            log_prior={c.value: model.log_prior[c] for c in model.classes},
            log_likelihood={c.value: model.log_likelihood[c].tolist() for c in model.classes},
            smoothing=model.smoothing,
            vocab=model.vocab.to_json(),
        )
    elif isinstance(model, SvmModel):
        obj.update(
            classes=[c.value for c in model.classes],
            weights={c.value: model.weights[c].tolist() for c in model.classes},
            bias={c.value: model.bias[c] for c in model.classes},
            hyper={"lambda": model.hyper.lam, "epochs": model.hyper.epochs, "seed": model.hyper.seed},
            objective_history=list(model.objective_history),
            vocab=model.vocab.to_json(),
        )
    elif isinstance(model, LsaModel):
        obj.update(
            classes=[c.value for c in model.classes],
            rank=model.rank,
            projection=model.projection.tolist(),
            singular_values=model.singular_values.tolist(),
            centroids={c.value: model.centroids[c].tolist() for c in model.classes},
            vocab=model.vocab.to_json(),
        )
    else:
        obj.update(
            classes=[c.value for c in model.classes],
            exemplars={c.value: model.exemplars[c] for c in model.classes},
            params=model.params.to_json(),
            knowledge=_knowledge_to_json(model.knowledge),
            top_k=model.top_k,
        )
    Path(path).write_text(json.dumps(obj, ensure_ascii=False) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> ClassifierModel:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"cannot load model from {path}: {e}") from e
    if obj.get("format_version") != MODEL_FORMAT_VERSION:
        raise DataError(f"unsupported model format_version {obj.get('format_version')!r}")
    kind = obj.get("kind")
    classes = tuple(Topic(c) for c in obj["classes"])
    if kind == "nb":
        return NbModel(
            classes=classes,
            log_prior={Topic(c): float(v) for c, v in obj["log_prior"].items()},
            log_likelihood={Topic(c): np.array(v) for c, v in obj["log_likelihood"].items()},
            smoothing=float(obj["smoothing"]),
            vocab=Vocabulary.from_json(obj["vocab"]),
        )
    if kind == "svm":
        h = obj["hyper"]
        return SvmModel(
            classes=classes,
            weights={Topic(c): np.array(v) for c, v in obj["weights"].items()},
            bias={Topic(c): float(v) for c, v in obj["bias"].items()},
            hyper=SvmHyper(lam=float(h["lambda"]), epochs=int(h["epochs"]), seed=int(h["seed"])),
            vocab=Vocabulary.from_json(obj["vocab"]),
            objective_history=tuple(obj.get("objective_history", ())),
        )
    if kind == "lsa":
        return LsaModel(
            rank=int(obj["rank"]),
            projection=np.array(obj["projection"]),
            singular_values=np.array(obj["singular_values"]),
            centroids={Topic(c): np.array(v) for c, v in obj["centroids"].items()},
            classes=classes,
            vocab=Vocabulary.from_json(obj["vocab"]),
        )
    if kind == "simsent":
        return SimSentModel(
            exemplars={Topic(c): [list(t) for t in v] for c, v in obj["exemplars"].items()},
            params=SentenceSimParams.from_json(obj["params"]),
            knowledge=_knowledge_from_json(obj["knowledge"]),
            classes=classes,
            top_k=int(obj.get("top_k", 3)),
        )
    raise DataError(f"unknown model kind {kind!r}")
