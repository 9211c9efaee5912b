"""Stratified cross-validation, classification metrics and report assembly.

Fold assignment hashes each record's sentence_id with the seed, so a plan
depends only on the labeled set, never on dataset order; an order-
independent model therefore produces identical pooled results after any
shuffle of its input. Per fold, the vocabulary and every knowledge source
are built from training records only.
"""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classifiers import predict, train_lsa, train_nb, train_simsent, train_svm
from .config import ProjectConfig
from .corpus import TOPIC_ORDER, LabeledDataset, Topic
from .errors import DataError
from .pipeline import build_vocabulary, token_count, tokenize
from .similarity import Taxonomy, build_ngram_table

DEFAULT_BUCKET_EDGES = (5, 8, 13)  # buckets: <=4, 5-7, 8-12, 13+


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    assignment: tuple[int, ...]

    def fold_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignment) if f == fold]

    def train_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignment) if f != fold]


def stratified_folds(data: LabeledDataset, k: int, seed: int = 0) -> FoldPlan:
    """Assign each record a fold, class by class, spread <= 1 per class.

    Within a class, records are ordered by a seeded hash of their
    sentence_id and dealt round-robin; the dealing position carries over
    between classes so total fold sizes stay balanced too.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    by_class: dict[Topic, list[int]] = {}
    for i, rec in enumerate(data):
        by_class.setdefault(rec.topic, []).append(i)
    small = [t.value for t in TOPIC_ORDER if t in by_class and len(by_class[t]) < k]
    if small:
        raise DataError(f"class(es) smaller than k={k}: {', '.join(small)}")

    def sort_key(i: int) -> tuple[str, str]:
        sid = data[i].sentence_id
        digest = hashlib.sha256(f"{seed}:{sid}".encode("utf-8")).hexdigest()
        return (digest, sid)

    assignment = [0] * len(data)
    cursor = 0
    for topic in TOPIC_ORDER:
        for i in sorted(by_class.get(topic, []), key=sort_key):
            assignment[i] = cursor % k
            cursor += 1
    return FoldPlan(k=k, seed=seed, assignment=tuple(assignment))


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple[Topic, ...]
    counts: np.ndarray  # rows = gold, columns = predicted

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_json(self) -> dict:
        return {
            "labels": [t.value for t in self.labels],
            "counts": self.counts.astype(int).tolist(),
        }


def confusion_matrix(gold: list[Topic], predicted: list[Topic]) -> ConfusionMatrix:
    if len(gold) != len(predicted):
        raise ValueError("gold and predicted must have the same length")
    idx = {t: i for i, t in enumerate(TOPIC_ORDER)}
    counts = np.zeros((len(TOPIC_ORDER), len(TOPIC_ORDER)), dtype=int)
    for g, p in zip(gold, predicted):
        counts[idx[g], idx[p]] += 1
    return ConfusionMatrix(labels=TOPIC_ORDER, counts=counts)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    auc: float | None

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "support": self.support,
            "auc": self.auc,
        }


@dataclass(frozen=True)
class Metrics:
    per_class: dict[Topic, ClassMetrics]
    accuracy: float
    macro_f1: float
    micro_f1: float
    macro_auc: float | None

    def to_json(self) -> dict:
        return {
            "per_class": {t.value: m.to_json() for t, m in self.per_class.items()},
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "micro_f1": self.micro_f1,
            "macro_auc": self.macro_auc,
        }


def auc_one_vs_rest(scores: list[float], positive: list[bool]) -> float | None:
    """Rank-based AUC with tied scores counted half; None without both classes."""
    n_pos = sum(positive)
    n_neg = len(positive) - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    order = np.argsort(np.asarray(scores), kind="stable")
    sorted_scores = np.asarray(scores)[order]
    ranks = np.empty(len(scores))
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0  # average rank, 1-based
        i = j + 1
    rank_sum = sum(r for r, p in zip(ranks, positive) if p)
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def compute_metrics(
    cm: ConfusionMatrix,
    scores: list[dict[Topic, float]] | None = None,
    gold: list[Topic] | None = None,
) -> Metrics:
    """Precision/recall/F1/accuracy from the confusion matrix plus one-vs-rest
    AUC from per-record scores; zero denominators score 0, macro averages
    skip classes with no gold members."""
    counts = cm.counts
    if gold is not None:
        gold_counts = np.array([sum(1 for g in gold if g is t) for t in cm.labels])
        if not np.array_equal(gold_counts, counts.sum(axis=1)):
            raise ValueError("confusion matrix rows do not match gold labels")
        if scores is not None and len(scores) != len(gold):
            raise ValueError("scores and gold must be parallel")
    total = counts.sum()
    per_class: dict[Topic, ClassMetrics] = {}
    f1_values = []
    auc_values = []
    for i, topic in enumerate(cm.labels):
        tp = counts[i, i]
        fp = counts[:, i].sum() - tp
        fn = counts[i, :].sum() - tp
        precision = tp / (tp + fp) if (tp + fp) > 0 else 0.0
        recall = tp / (tp + fn) if (tp + fn) > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if (precision + recall) > 0 else 0.0
        support = int(counts[i, :].sum())
        auc = None
        if scores is not None and gold is not None:
            auc = auc_one_vs_rest(
                [s[topic] for s in scores], [g is topic for g in gold]
            )
        per_class[topic] = ClassMetrics(
            precision=float(precision), recall=float(recall), f1=float(f1), support=support, auc=auc
        )
        if support > 0:
            f1_values.append(float(f1))
            if auc is not None:
                auc_values.append(auc)
    accuracy = float(np.trace(counts) / total) if total > 0 else 0.0
    # micro-F1 from pooled TP/FP/FN; equals accuracy for single-label multiclass
    tp_total = np.trace(counts)
    fp_total = total - tp_total
    micro_f1 = float(2 * tp_total / (2 * tp_total + 2 * fp_total)) if total > 0 else 0.0
    macro_f1 = float(np.mean(f1_values)) if f1_values else 0.0
    macro_auc = float(np.mean(auc_values)) if auc_values else None
    return Metrics(
        per_class=per_class,
        accuracy=accuracy,
        macro_f1=macro_f1,
        micro_f1=micro_f1,
        macro_auc=macro_auc,
    )


@dataclass(frozen=True)
class LengthBucket:
    label: str
    low: int
    high: int | None  # None = open-ended
    support: int
    macro_f1: float | None

    def to_json(self) -> dict:
        return {
            "bucket": self.label,
            "support": self.support,
            "macro_f1": self.macro_f1,
        }


@dataclass(frozen=True)
class LengthBucketReport:
    buckets: list[LengthBucket]

    @property
    def total(self) -> int:
        return sum(b.support for b in self.buckets)

    def bucket(self, label: str) -> LengthBucket:
        for b in self.buckets:
            if b.label == label:
                return b
        raise KeyError(label)

    def to_json(self) -> list[dict]:
        return [b.to_json() for b in self.buckets]


def length_bucket_report(
    predictions: list[Topic],
    gold: list[Topic],
    lengths: list[int],
    edges: tuple[int, ...] = DEFAULT_BUCKET_EDGES,
) -> LengthBucketReport:
    """Macro-F1 per sentence-length bucket; supports partition the records."""
    if not (len(predictions) == len(gold) == len(lengths)):
        raise ValueError("predictions, gold and lengths must be parallel")
    bounds = [0, *edges]
    buckets = []
    for b, low in enumerate(bounds):
        high = bounds[b + 1] - 1 if b + 1 < len(bounds) else None
        label = f"{max(low, 1)}-{high}" if high is not None else f"{low}+"
        members = [
            i
            for i, n in enumerate(lengths)
            if n >= low and (high is None or n <= high)
        ]
        if members:
            cm = confusion_matrix([gold[i] for i in members], [predictions[i] for i in members])
            macro_f1 = compute_metrics(cm).macro_f1
        else:
            macro_f1 = None
        buckets.append(
            LengthBucket(label=label, low=low, high=high, support=len(members), macro_f1=macro_f1)
        )
    return LengthBucketReport(buckets=buckets)


@dataclass(frozen=True)
class KeywordRanking:
    per_topic: dict[Topic, list[tuple[str, int]]]

    def to_json(self) -> dict:
        return {
            t.value: [{"keyword": w, "count": c} for w, c in ranked]
            for t, ranked in self.per_topic.items()
        }


def top_keywords(gold: LabeledDataset, k: int = 5, config=None) -> KeywordRanking:
    """Most frequent annotator keyword tokens per topic (case-folded),
    count descending with lexicographic tie-break."""
    if k < 1:
        raise ValueError("k must be >= 1")
    counts: dict[Topic, dict[str, int]] = {t: {} for t in TOPIC_ORDER[:3]}
    saw_span = False
    for rec in gold:
        if rec.topic not in counts or rec.keyword_span is None:
            continue
        saw_span = True
        tokens = tokenize(rec.text, config)
        start, end = rec.keyword_span
        for w in tokens[start:end]:
            w = w.casefold()
            counts[rec.topic][w] = counts[rec.topic].get(w, 0) + 1
    if not saw_span:
        raise DataError("gold standard has no keyword spans")
    per_topic = {
        t: sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))[:k] for t, c in counts.items()
    }
    return KeywordRanking(per_topic=per_topic)


# ---------------------------------------------------------------------------
# Cross-validated evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FoldResult:
    fold: int
    metrics: Metrics
    confusion: ConfusionMatrix
    n_train: int
    n_test: int

    def to_json(self) -> dict:
        return {
            "fold": self.fold,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "metrics": self.metrics.to_json(),
            "confusion": self.confusion.to_json(),
        }


@dataclass(frozen=True)
class EvalReport:
    classifier: str
    k: int
    seed: int
    config_hash: str
    folds: list[FoldResult]
    pooled: Metrics
    pooled_confusion: ConfusionMatrix
    length_buckets: LengthBucketReport
    keywords: KeywordRanking

    def to_json(self) -> dict:
        return {
            "classifier": self.classifier,
            "k": self.k,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "folds": [f.to_json() for f in self.folds],
            "pooled": {
                "metrics": self.pooled.to_json(),
                "confusion": self.pooled_confusion.to_json(),
            },
            "length_buckets": self.length_buckets.to_json(),
            "keywords": self.keywords.to_json(),
            "notes": [
                "zero-denominator metrics are reported as 0",
                "macro averages skip classes absent from the gold labels",
                "bounds on a constructed corpus verify the pipeline, not absolute quality",
            ],
        }

    def render_text(self) -> str:
        lines = [
            f"Evaluation: classifier={self.classifier} k={self.k} seed={self.seed} "
            f"config={self.config_hash}"
        ]
        for f in self.folds:
            m = f.metrics
            lines.append(
                f"  fold {f.fold}: n={f.n_test:<4d} acc={m.accuracy:.3f} "
                f"macroF1={m.macro_f1:.3f}"
            )
        m = self.pooled
        auc = f"{m.macro_auc:.3f}" if m.macro_auc is not None else "n/a"
        lines.append(
            f"  pooled: acc={m.accuracy:.3f} macroF1={m.macro_f1:.3f} "
            f"microF1={m.micro_f1:.3f} macroAUC={auc}"
        )
        lines.append("  per class (precision / recall / f1 / auc / support):")
        for t, cm_ in m.per_class.items():
            auc = f"{cm_.auc:.3f}" if cm_.auc is not None else "  n/a"
            lines.append(
                f"    {t.value:<18} {cm_.precision:.3f} / {cm_.recall:.3f} / "
                f"{cm_.f1:.3f} / {auc} / {cm_.support}"
            )
        lines.append("  macro-F1 by sentence length:")
        for b in self.length_buckets.buckets:
            shown = f"{b.macro_f1:.3f}" if b.macro_f1 is not None else "n/a"
            lines.append(f"    {b.label:<6} {shown}  (n={b.support})")
        lines.append("  top keywords:")
        for t, ranked in self.keywords.per_topic.items():
            words = ", ".join(w for w, _ in ranked)
            lines.append(f"    {t.value:<18} {words}")
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json(), ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )


def _train_for_fold(kind: str, train_pairs, vocab, config: ProjectConfig, classes):
    if kind == "nb":
        return train_nb(train_pairs, smoothing=config.nb_smoothing, vocab=vocab, classes=classes)
    if kind == "svm":
        return train_svm(train_pairs, hyper=config.svm, vocab=vocab, classes=classes)
    if kind == "lsa":
        return train_lsa(train_pairs, rank=config.lsa_rank, vocab=vocab, classes=classes)
    if kind == "simsent":
        if config.similarity.backend == "taxonomy":
            if not config.taxonomy_path:
                raise DataError("similarity backend 'taxonomy' needs taxonomy_path in the config")
            knowledge = Taxonomy.load(config.taxonomy_path)
        else:
            knowledge = build_ngram_table([toks for toks, _ in train_pairs])
        return train_simsent(train_pairs, params=config.similarity, knowledge=knowledge, classes=classes)
    raise ValueError(f"unknown classifier kind {kind!r}")


def cross_validate(
    data: LabeledDataset,
    classifier_kind: str,
    k: int = 3,
    seed: int = 0,
    config: ProjectConfig | None = None,
) -> EvalReport:
    """k-fold stratified evaluation with models and vocabularies built from
    training folds only; per-fold and pooled metrics plus the length-bucket
    and keyword analyses."""
    config = config or ProjectConfig()
    plan = stratified_folds(data, k, seed)
    tokens = [tokenize(rec.text, config.pipeline) for rec in data]
    lengths = [token_count(rec.text, config.pipeline) for rec in data]
    labels = [rec.topic for rec in data]
    classes = [t for t in TOPIC_ORDER if t in set(labels)]

    predicted: list[Topic | None] = [None] * len(data)
    scores: list[dict[Topic, float] | None] = [None] * len(data)
    folds: list[FoldResult] = []
    for fold in range(k):
        train_idx = plan.train_indices(fold)
        test_idx = plan.fold_indices(fold)
        train_pairs = [(tokens[i], labels[i]) for i in train_idx]
        vocab = build_vocabulary([tokens[i] for i in train_idx])
        train_terms = {t for i in train_idx for t in tokens[i]}
        leaked = set(vocab.term_to_id) - train_terms
        if leaked:
            raise AssertionError(f"vocabulary terms outside training fold: {sorted(leaked)[:5]}")
        model = _train_for_fold(classifier_kind, train_pairs, vocab, config, classes)
        for i in test_idx:
            p = predict(model, tokens[i])
            predicted[i] = p.topic
            scores[i] = p.scores
        fold_gold = [labels[i] for i in test_idx]
        fold_pred = [predicted[i] for i in test_idx]
        fold_scores = [scores[i] for i in test_idx]
        cm = confusion_matrix(fold_gold, fold_pred)
        folds.append(
            FoldResult(
                fold=fold,
                metrics=compute_metrics(cm, fold_scores, fold_gold),
                confusion=cm,
                n_train=len(train_idx),
                n_test=len(test_idx),
            )
        )

    pooled_cm = confusion_matrix(labels, predicted)
    pooled = compute_metrics(pooled_cm, scores, labels)
    buckets = length_bucket_report(predicted, labels, lengths)
    try:
        keywords = top_keywords(data, 5, config.pipeline)
    except DataError:
        keywords = KeywordRanking(per_topic={t: [] for t in TOPIC_ORDER[:3]})
    return EvalReport(
        classifier=classifier_kind,
        k=k,
        seed=seed,
        config_hash=config.config_hash(),
        folds=folds,
        pooled=pooled,
        pooled_confusion=pooled_cm,
        length_buckets=buckets,
        keywords=keywords,
    )
