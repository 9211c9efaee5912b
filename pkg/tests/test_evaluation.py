import itertools
import random

import numpy as np
import pytest

from qinu.config import ProjectConfig
from qinu.corpus import TOPIC_ORDER, GoldRecord, Polarity, Topic
from qinu.errors import DataError
from qinu.evaluation import (
    ConfusionMatrix,
    auc_one_vs_rest,
    compute_metrics,
    confusion_matrix,
    cross_validate,
    length_bucket_report,
    stratified_folds,
    top_keywords,
)

EFF = Topic.EFFECTIVENESS
EFC = Topic.EFFICIENCY
RISK = Topic.FREEDOM_FROM_RISK
OTHER = Topic.OTHER


def _dataset(class_counts: dict[Topic, int], prefix="s") -> list[GoldRecord]:
    out = []
    i = 0
    for topic, n in class_counts.items():
        for _ in range(n):
            out.append(
                GoldRecord(
                    sentence_id=f"{prefix}{i:04d}",
                    text=f"token{i} filler",
                    topic=topic,
                    polarity=Polarity.NEUTRAL,
                )
            )
            i += 1
    return out


# -- independent oracles ------------------------------------------------------


def brute_force_auc(scores, positive):
    pairs = concordant = 0.0
    for (s_p, p), (s_n, n) in itertools.product(zip(scores, positive), zip(scores, positive)):
        if p and not n:
            pairs += 1
            if s_p > s_n:
                concordant += 1
            elif s_p == s_n:
                concordant += 0.5
    return concordant / pairs if pairs else None


def brute_force_prf(gold, pred, topic):
    tp = sum(1 for g, p in zip(gold, pred) if g is topic and p is topic)
    fp = sum(1 for g, p in zip(gold, pred) if g is not topic and p is topic)
    fn = sum(1 for g, p in zip(gold, pred) if g is topic and p is not topic)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


class TestStratifiedFolds:
    def test_600_record_plan_balances_everything(self):
        # counting oracle: 300/200/100 across k=3
        data = _dataset({EFF: 300, EFC: 200, RISK: 100})
        plan = stratified_folds(data, k=3, seed=0)
        for fold in range(3):
            idx = plan.fold_indices(fold)
            assert len(idx) == 200
            per_class = {t: 0 for t in (EFF, EFC, RISK)}
            for i in idx:
                per_class[data[i].topic] += 1
            assert per_class[EFF] == 100
            assert per_class[EFC] in (66, 67)
            assert per_class[RISK] in (33, 34)

    def test_same_seed_same_plan(self):
        data = _dataset({EFF: 30, EFC: 20})
        assert stratified_folds(data, 4, seed=9) == stratified_folds(data, 4, seed=9)

    def test_different_seed_differs(self):
        data = _dataset({EFF: 30, EFC: 20})
        assert stratified_folds(data, 4, seed=1) != stratified_folds(data, 4, seed=2)

    def test_small_class_rejected(self):
        data = _dataset({EFF: 10, EFC: 2})
        with pytest.raises(DataError, match="efficiency"):
            stratified_folds(data, k=3)

    def test_k_below_two_rejected(self):
        with pytest.raises(ValueError):
            stratified_folds(_dataset({EFF: 4}), k=1)

    def test_assignment_independent_of_dataset_order(self):
        data = _dataset({EFF: 12, EFC: 9, RISK: 6})
        plan = stratified_folds(data, 3, seed=5)
        by_id = {rec.sentence_id: plan.assignment[i] for i, rec in enumerate(data)}
        shuffled = list(data)
        random.Random(0).shuffle(shuffled)
        plan2 = stratified_folds(shuffled, 3, seed=5)
        assert all(plan2.assignment[i] == by_id[rec.sentence_id] for i, rec in enumerate(shuffled))

    def test_spread_at_most_one_on_random_datasets(self):
        rng = random.Random(123)
        for trial in range(100):
            k = rng.randint(2, 5)
            counts = {t: rng.randint(k, 40) for t in TOPIC_ORDER if rng.random() < 0.9}
            if not counts:
                counts = {EFF: k}
            data = _dataset(counts, prefix=f"t{trial}_")
            plan = stratified_folds(data, k, seed=trial)
            for topic in counts:
                sizes = [
                    sum(1 for i in plan.fold_indices(f) if data[i].topic is topic)
                    for f in range(k)
                ]
                assert max(sizes) - min(sizes) <= 1


class TestMetrics:
    def test_hand_computed_prf(self):
        # TP=8, FP=2, FN=4 for the first class
        counts = np.array([[8, 4, 0, 0], [2, 6, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        cm = ConfusionMatrix(labels=TOPIC_ORDER, counts=counts)
        m = compute_metrics(cm)
        eff = m.per_class[EFF]
        assert eff.precision == pytest.approx(0.8)
        assert eff.recall == pytest.approx(8 / 12, abs=1e-4)
        assert eff.f1 == pytest.approx(2 * 0.8 * (8 / 12) / (0.8 + 8 / 12), abs=1e-9)
        assert round(eff.f1, 4) == 0.7273

    def test_perfect_predictions(self):
        gold = [EFF, EFC, RISK, OTHER] * 3
        cm = confusion_matrix(gold, gold)
        scores = [{t: (1.0 if t is g else 0.0) for t in TOPIC_ORDER} for g in gold]
        m = compute_metrics(cm, scores, gold)
        assert m.accuracy == 1.0
        assert m.macro_f1 == 1.0
        assert all(c.auc == 1.0 for c in m.per_class.values())

    def test_auc_pairwise_example(self):
        # pairwise concordance oracle: one concordant, one discordant pair
        assert auc_one_vs_rest([0.9, 0.8, 0.7], [True, False, True]) == pytest.approx(0.5)

    def test_auc_tie_counts_half(self):
        assert auc_one_vs_rest([0.5, 0.5], [True, False]) == pytest.approx(0.5)

    def test_auc_single_class_undefined(self):
        assert auc_one_vs_rest([0.5, 0.7], [True, True]) is None

    def test_micro_f1_equals_accuracy(self):
        rng = random.Random(5)
        for _ in range(20):
            gold = [rng.choice(TOPIC_ORDER) for _ in range(30)]
            pred = [rng.choice(TOPIC_ORDER) for _ in range(30)]
            m = compute_metrics(confusion_matrix(gold, pred))
            assert m.micro_f1 == pytest.approx(m.accuracy, abs=1e-12)

    def test_matches_brute_force_on_random_instances(self):
        # metric oracle equivalence, 100 randomized instances
        rng = random.Random(99)
        for _ in range(100):
            n = rng.randint(4, 40)
            gold = [rng.choice(TOPIC_ORDER) for _ in range(n)]
            pred = [rng.choice(TOPIC_ORDER) for _ in range(n)]
            scores = [
                {t: rng.choice([rng.random(), round(rng.random(), 1)]) for t in TOPIC_ORDER}
                for _ in range(n)
            ]
            m = compute_metrics(confusion_matrix(gold, pred), scores, gold)
            f1s = []
            for t in TOPIC_ORDER:
                p_ref, r_ref, f_ref = brute_force_prf(gold, pred, t)
                got = m.per_class[t]
                assert got.precision == pytest.approx(p_ref, abs=1e-9)
                assert got.recall == pytest.approx(r_ref, abs=1e-9)
                assert got.f1 == pytest.approx(f_ref, abs=1e-9)
                auc_ref = brute_force_auc([s[t] for s in scores], [g is t for g in gold])
                if auc_ref is None:
                    assert got.auc is None
                else:
                    assert got.auc == pytest.approx(auc_ref, abs=1e-9)
                if any(g is t for g in gold):
                    f1s.append(f_ref)
            acc_ref = sum(1 for g, p in zip(gold, pred) if g is p) / n
            assert m.accuracy == pytest.approx(acc_ref, abs=1e-9)
            assert m.macro_f1 == pytest.approx(sum(f1s) / len(f1s), abs=1e-9)

    def test_inconsistent_inputs_rejected(self):
        gold = [EFF, EFC]
        cm = confusion_matrix([EFF, EFF], [EFF, EFF])
        with pytest.raises(ValueError, match="do not match"):
            compute_metrics(cm, None, gold)


class TestLengthBuckets:
    def test_single_bucket(self):
        gold = [EFF] * 5
        report = length_bucket_report(gold, gold, [3] * 5)
        assert report.bucket("1-4").support == 5
        assert report.total == 5

    def test_supports_partition(self):
        rng = random.Random(7)
        gold = [rng.choice(TOPIC_ORDER) for _ in range(50)]
        lengths = [rng.randint(1, 20) for _ in range(50)]
        report = length_bucket_report(gold, gold, lengths)
        assert report.total == 50

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError, match="parallel"):
            length_bucket_report([EFF], [EFF, EFC], [1, 2])

    def test_short_bucket_not_better_than_long_on_fixture(self, gold600):
        report = cross_validate(gold600, "nb", k=3, seed=7)
        short = report.length_buckets.bucket("1-4").macro_f1
        long_ = report.length_buckets.bucket("8-12").macro_f1
        assert short <= long_


class TestTopKeywords:
    def _gold_with_keywords(self, pairs):
        out = []
        for i, (word, topic) in enumerate(pairs):
            out.append(
                GoldRecord(
                    sentence_id=f"s{i}",
                    text=f"the {word} here",
                    topic=topic,
                    polarity=Polarity.NEUTRAL,
                    keyword_span=(0, 1),  # pipeline tokens: [word, "here"]
                )
            )
        return out

    def test_counting_oracle(self):
        gold = self._gold_with_keywords([("fast", EFC)] * 5 + [("speed", EFC)] * 3)
        ranking = top_keywords(gold, 2)
        assert [w for w, _ in ranking.per_topic[EFC]] == ["fast", "speed"]
        assert ranking.per_topic[EFC][0][1] == 5

    def test_tie_breaks_lexicographically(self):
        gold = self._gold_with_keywords([("zeta", EFC), ("alpha", EFC)])
        ranking = top_keywords(gold, 2)
        assert [w for w, _ in ranking.per_topic[EFC]] == ["alpha", "zeta"]

    def test_k_larger_than_distinct(self):
        gold = self._gold_with_keywords([("fast", EFC)])
        ranking = top_keywords(gold, 10)
        assert ranking.per_topic[EFC] == [("fast", 1)]

    def test_no_spans_rejected(self):
        gold = [
            GoldRecord(sentence_id="s0", text="x", topic=OTHER, polarity=Polarity.NEUTRAL)
        ]
        with pytest.raises(DataError, match="no keyword spans"):
            top_keywords(gold, 5)

    def test_fixture_seeded_words_surface(self, gold600):
        ranking = top_keywords(gold600, 5)
        efficiency = [w for w, _ in ranking.per_topic[EFC]]
        assert "speed" in efficiency
        assert "slow" in efficiency


class TestCrossValidate:
    def test_nb_on_separable_fixture(self, gold600):
        report = cross_validate(gold600, "nb", k=3, seed=7)
        assert report.pooled.macro_f1 >= 0.8
        assert report.k == 3
        assert len(report.folds) == 3
        assert sum(f.n_test for f in report.folds) == 600

    def test_order_permutation_leaves_nb_accuracy_unchanged(self, gold600):
        # permutation oracle: fold membership is id-hashed, NB is
        # order-independent, so pooled accuracy must be identical
        base = cross_validate(gold600, "nb", k=3, seed=7)
        shuffled = list(gold600)
        random.Random(31337).shuffle(shuffled)
        perm = cross_validate(shuffled, "nb", k=3, seed=7)
        assert perm.pooled.accuracy == pytest.approx(base.pooled.accuracy, abs=1e-12)
        assert perm.pooled.macro_f1 == pytest.approx(base.pooled.macro_f1, abs=1e-12)

    def test_boundary_k_equals_min_class(self):
        data = _dataset({EFF: 6, EFC: 4, RISK: 4})
        report = cross_validate(data, "nb", k=4, seed=0)
        assert len(report.folds) == 4
        assert all(f.n_test >= 1 for f in report.folds)

    def test_report_json_shape(self, gold600):
        report = cross_validate(gold600, "nb", k=3, seed=7)
        payload = report.to_json()
        for key in ("classifier", "k", "seed", "folds", "pooled", "length_buckets", "keywords"):
            assert key in payload
        assert payload["config_hash"] == ProjectConfig().config_hash()
        text = report.render_text()
        assert "pooled" in text

    def test_unknown_kind_rejected(self, gold600):
        with pytest.raises(ValueError, match="unknown classifier"):
            cross_validate(gold600, "boosted-trees", k=3)
