import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qinu.corpus import GoldRecord, Polarity, Topic
from qinu.errors import DataError
from qinu.scoring import (
    CharacteristicScore,
    PolarityLexicon,
    QinUWeights,
    build_lexicon,
    characteristic_scores,
    qinu_score,
    score_polarity,
)

EFF = Topic.EFFECTIVENESS
EFC = Topic.EFFICIENCY
RISK = Topic.FREEDOM_FROM_RISK


def _gold(text, polarity, opinion_span=None, modifier_span=None, topic=EFC, sid="s0"):
    return GoldRecord(
        sentence_id=sid,
        text=text,
        topic=topic,
        polarity=polarity,
        keyword_span=(0, 1) if topic is not Topic.OTHER else None,
        opinion_span=opinion_span,
        modifier_span=modifier_span,
    )


class TestBuildLexicon:
    def test_consistently_positive_word(self):
        gold = [
            _gold("software fast", Polarity.POSITIVE, opinion_span=(1, 2), sid=f"s{i}")
            for i in range(3)
        ]
        lex = build_lexicon(gold)
        assert lex.scores["fast"] == pytest.approx(1.0)

    def test_cancelled_word_excluded(self):
        gold = [
            _gold("works good", Polarity.POSITIVE, opinion_span=(1, 2), sid="s0"),
            _gold("hardly good", Polarity.NEGATIVE, opinion_span=(1, 2), sid="s1"),
        ]
        lex = build_lexicon(gold)
        assert "good" not in lex.scores

    def test_no_opinion_spans_rejected(self):
        gold = [_gold("software fast", Polarity.POSITIVE, sid="s0")]
        with pytest.raises(DataError, match="no opinion spans"):
            build_lexicon(gold)

    def test_scores_bounded(self):
        rng = random.Random(0)
        gold = []
        words = ["alpha", "beta", "gamma"]
        for i in range(60):
            w = rng.choice(words)
            pol = rng.choice([Polarity.POSITIVE, Polarity.NEGATIVE, Polarity.NEUTRAL])
            gold.append(_gold(f"tool {w}", pol, opinion_span=(1, 2), sid=f"s{i}"))
        lex = build_lexicon(gold)
        assert all(-1.0 <= s <= 1.0 and s != 0.0 for s in lex.scores.values())

    def test_unknown_modifier_logged_and_ignored(self, caplog):
        gold = [
            _gold(
                "software quite fast",
                Polarity.POSITIVE,
                opinion_span=(2, 3),
                modifier_span=(1, 2),
                sid="s0",
            )
        ]
        with caplog.at_level("INFO", logger="qinu.scoring"):
            lex = build_lexicon(gold)
        assert "quite" in caplog.text
        assert "quite" not in lex.intensifiers

    def test_deterministic(self):
        gold = [
            _gold("tool great", Polarity.POSITIVE, opinion_span=(1, 2), sid=f"s{i}")
            for i in range(5)
        ]
        assert build_lexicon(gold).scores == build_lexicon(gold).scores

    def test_json_roundtrip(self):
        lex = PolarityLexicon(scores={"fast": 1.0, "awful": -1.0})
        assert PolarityLexicon.from_json(lex.to_json()).scores == lex.scores


class TestScorePolarity:
    lex = PolarityLexicon(scores={"fast": 1.0, "good": 1.0, "awful": -1.0})

    def test_plain_positive(self):
        out = score_polarity(["this", "software", "is", "fast"], self.lex)
        assert out.score == pytest.approx(1.0)
        assert out.label is Polarity.POSITIVE

    def test_negation_flips(self):
        out = score_polarity(["not", "good"], self.lex)
        assert out.score == pytest.approx(-1.0)
        assert out.label is Polarity.NEGATIVE

    def test_intensifier_scales(self):
        out = score_polarity(["very", "good"], self.lex)
        assert out.score == pytest.approx(1.5)

    def test_negated_intensified(self):
        out = score_polarity(["not", "very", "good"], self.lex)
        assert out.score == pytest.approx(-1.5)

    def test_negator_outside_window_ignored(self):
        out = score_polarity(["not", "w1", "w2", "w3", "good"], self.lex)
        assert out.label is Polarity.POSITIVE

    def test_no_evidence_is_neutral(self):
        out = score_polarity(["nothing", "matches"], self.lex)
        assert out.score == 0.0
        assert out.label is Polarity.NEUTRAL

    def test_empty_lexicon_rejected(self):
        with pytest.raises(DataError, match="empty"):
            score_polarity(["fast"], PolarityLexicon(scores={}))

    @given(
        st.lists(
            st.sampled_from(["fast", "awful", "good", "not", "very", "tool", "app"]),
            min_size=0,
            max_size=8,
        )
    )
    def test_label_sign_relation(self, tokens):
        out = score_polarity(tokens, self.lex)
        if out.score > 0:
            assert out.label is Polarity.POSITIVE
        elif out.score < 0:
            assert out.label is Polarity.NEGATIVE
        else:
            assert out.label is Polarity.NEUTRAL


def _sp(label):
    score = {Polarity.POSITIVE: 1.0, Polarity.NEGATIVE: -1.0, Polarity.NEUTRAL: 0.0}[label]
    from qinu.scoring import SentencePolarity

    return SentencePolarity(label=label, score=score)


class TestCharacteristicScores:
    def test_ratio(self):
        classified = [(EFC, _sp(Polarity.POSITIVE))] * 3 + [(EFC, _sp(Polarity.NEGATIVE))]
        chars = characteristic_scores(classified)
        efc = next(c for c in chars if c.topic is EFC)
        assert efc.score == pytest.approx(0.75)

    def test_neutral_only_topic_is_undefined(self):
        chars = characteristic_scores([(EFC, _sp(Polarity.NEUTRAL))])
        efc = next(c for c in chars if c.topic is EFC)
        assert efc.score is None
        assert efc.n_neutral == 1

    def test_empty_input_all_undefined(self):
        chars = characteristic_scores([])
        assert len(chars) == 3
        assert all(c.score is None for c in chars)

    def test_other_excluded(self):
        chars = characteristic_scores([(Topic.OTHER, _sp(Polarity.POSITIVE))])
        assert all(c.n_pos + c.n_neg + c.n_neutral == 0 for c in chars)


def _chars(eff=None, efc=None, risk=None):
    vals = {EFF: eff, EFC: efc, RISK: risk}
    out = []
    for t, v in vals.items():
        if v is None:
            out.append(CharacteristicScore(t, 0, 0, 0, None))
        else:
            n_pos = round(v * 100)
            out.append(CharacteristicScore(t, n_pos, 100 - n_pos, 0, v))
    return out


class TestQinuScore:
    def test_equal_weights_mean(self):
        report = qinu_score(_chars(1.0, 0.5, 0.0))
        assert report.aggregate == pytest.approx(0.5)

    def test_all_ones_any_weights(self):
        report = qinu_score(_chars(1.0, 1.0, 1.0), QinUWeights(0.6, 0.3, 0.1))
        assert report.aggregate == pytest.approx(1.0)

    def test_invalid_weights_rejected(self):
        with pytest.raises(ValueError, match="sum to 1"):
            QinUWeights(0.5, 0.5, 0.2)
        with pytest.raises(ValueError, match="non-negative"):
            QinUWeights(1.5, -0.25, -0.25)

    def test_renormalizes_over_defined(self):
        report = qinu_score(_chars(eff=1.0, efc=None, risk=0.0), QinUWeights(0.25, 0.5, 0.25))
        assert report.aggregate == pytest.approx(0.5)

    def test_all_undefined(self):
        report = qinu_score(_chars())
        assert report.aggregate is None

    def test_aggregate_within_defined_range(self):
        rng = random.Random(1)
        for _ in range(200):
            vals = [rng.random() if rng.random() < 0.8 else None for _ in range(3)]
            if all(v is None for v in vals):
                continue
            w = [rng.random() for _ in range(3)]
            total = sum(w)
            weights = QinUWeights(*(x / total for x in w))
            report = qinu_score(_chars(*vals), weights)
            defined = [v for v in vals if v is not None]
            assert min(defined) - 1e-12 <= report.aggregate <= max(defined) + 1e-12

    def test_negative_to_positive_flip_never_decreases(self):
        rng = random.Random(2)
        for _ in range(300):
            counts = [(rng.randint(0, 10), rng.randint(1, 10), rng.randint(0, 3)) for _ in range(3)]
            chars = [
                CharacteristicScore(t, p, n, z, p / (p + n))
                for t, (p, n, z) in zip([EFF, EFC, RISK], counts)
            ]
            w = [rng.random() + 0.01 for _ in range(3)]
            total = sum(w)
            weights = QinUWeights(*(x / total for x in w))
            before = qinu_score(chars, weights)
            flip = rng.randrange(3)
            p, n, z = counts[flip]
            flipped = list(chars)
            flipped[flip] = CharacteristicScore(chars[flip].topic, p + 1, n - 1, z, None)
            pos, neg = p + 1, n - 1
            flipped[flip] = CharacteristicScore(
                chars[flip].topic, pos, neg, z, pos / (pos + neg) if pos + neg else None
            )
            after = qinu_score(flipped, weights)
            assert after.aggregate >= before.aggregate - 1e-12
            assert (flipped[flip].score or 1.0) >= (chars[flip].score or 0.0) - 1e-12

    def test_report_metadata(self):
        report = qinu_score(_chars(1.0, 0.5, 0.0), product_id="prod-1", n_other=7)
        payload = report.to_json()
        assert payload["product_id"] == "prod-1"
        assert payload["n_other_excluded"] == 7
        assert payload["not_measured"] == ["satisfaction", "context_coverage"]
        assert "effectiveness" in payload["definitions"]
        text = report.render_text()
        assert "not measured" in text
