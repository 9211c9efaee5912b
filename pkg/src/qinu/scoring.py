"""Gold-standard-induced polarity scoring and quality-in-use aggregation.

The lexicon is voted out of annotator opinion spans (+1 per positive
sentence, -1 per negative, averaged per word). Sentence polarity applies
negator/intensifier modifiers found in a 3-token window before each scored
word. Characteristic scores are positive ratios per topic; the aggregate is
their weighted mean with weights renormalized over the defined subset.
"""

import logging
from dataclasses import dataclass, field

from .corpus import CHARACTERISTIC_TOPICS, LabeledDataset, Polarity, Topic
from .errors import DataError
from .pipeline import PipelineConfig, tokenize

log = logging.getLogger(__name__)

DEFAULT_NEGATORS = frozenset({"not", "never", "no", "n't", "without"})
DEFAULT_INTENSIFIERS = {"very": 1.5, "extremely": 2.0, "slightly": 0.5}

MODIFIER_WINDOW = 3  # tokens scanned before a scored word

# ISO/IEC 25010 quality-in-use characteristic definitions, echoed into
# reports so a score is never shown without its meaning.
CHARACTERISTIC_DEFINITIONS = {
    "effectiveness": "Accuracy and completeness with which users achieve specified goals (ISO/IEC 25010).",
    "efficiency": "Resources expended in relation to the accuracy and completeness with which users achieve goals (ISO/IEC 25010).",
    "freedom_from_risk": "Degree to which a product or system mitigates the potential risk to economic status, human life, health, or the environment (ISO/IEC 25010).",
    "satisfaction": "Degree to which user needs are satisfied when a product or system is used in a specified context of use (ISO/IEC 25010).",
    "context_coverage": "Degree to which a product or system can be used with effectiveness, efficiency, freedom from risk and satisfaction in specified and unanticipated contexts of use (ISO/IEC 25010).",
}

NOT_MEASURED = ("satisfaction", "context_coverage")


@dataclass(frozen=True)
class PolarityLexicon:
    scores: dict[str, float]
    negators: frozenset[str] = DEFAULT_NEGATORS
    intensifiers: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_INTENSIFIERS))

    def to_json(self) -> dict:
        return {
            "scores": dict(sorted(self.scores.items())),
            "negators": sorted(self.negators),
            "intensifiers": dict(sorted(self.intensifiers.items())),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PolarityLexicon":
        return cls(
            scores={str(w): float(s) for w, s in obj["scores"].items()},
            negators=frozenset(obj.get("negators", DEFAULT_NEGATORS)),
            intensifiers={str(w): float(m) for w, m in obj.get("intensifiers", DEFAULT_INTENSIFIERS).items()},
        )


@dataclass(frozen=True)
class SentencePolarity:
    label: Polarity
    score: float


def build_lexicon(gold: LabeledDataset, config: PipelineConfig | None = None) -> PolarityLexicon:
    """Vote a word lexicon out of annotated opinion spans.

    Each opinion word gets +1 per positive sentence and -1 per negative one;
    the final score is the clamped mean over its occurrences, and words that
    cancel to 0 are excluded. Annotated modifier words outside the default
    negator/intensifier sets are logged and ignored.
    """
    config = config or PipelineConfig()
    votes: dict[str, float] = {}
    occurrences: dict[str, int] = {}
    saw_opinion = False
    for rec in gold:
        tokens = tokenize(rec.text, config)
        if rec.opinion_span is not None:
            saw_opinion = True
            start, end = rec.opinion_span
            for w in tokens[start:end]:
                w = w.casefold()
                occurrences[w] = occurrences.get(w, 0) + 1
                if rec.polarity is Polarity.POSITIVE:
                    votes[w] = votes.get(w, 0.0) + 1.0
                elif rec.polarity is Polarity.NEGATIVE:
                    votes[w] = votes.get(w, 0.0) - 1.0
                else:
                    votes.setdefault(w, 0.0)
        if rec.modifier_span is not None:
            start, end = rec.modifier_span
            for w in tokens[start:end]:
                w = w.casefold()
                if w not in DEFAULT_NEGATORS and w not in DEFAULT_INTENSIFIERS:
                    log.info("annotated modifier %r is not a known negator/intensifier; ignored", w)
    if not saw_opinion:
        raise DataError("gold standard contains no opinion spans; cannot build a lexicon")
    scores = {}
    for w, total in votes.items():
        s = max(-1.0, min(1.0, total / occurrences[w]))
        if s != 0.0:
            scores[w] = s
    return PolarityLexicon(scores=scores)


def score_polarity(tokens: list[str], lex: PolarityLexicon) -> SentencePolarity:
    """Signed sum of lexicon word scores with modifier handling.

    A scored word is multiplied by any intensifiers and sign-flipped by any
    negator within the 3 preceding tokens. Label follows the sign of the sum.
    """
    if not lex.scores:
        raise DataError("polarity lexicon is empty")
    total = 0.0
    for i, tok in enumerate(tokens):
        base = lex.scores.get(tok.casefold())
        if base is None:
            continue
        window = tokens[max(0, i - MODIFIER_WINDOW):i]
        value = base
        for w in window:
            w = w.casefold()
            mult = lex.intensifiers.get(w)
            if mult is not None:
                value *= mult
        if any(w.casefold() in lex.negators for w in window):
            value = -value
        total += value
    if total > 0:
        label = Polarity.POSITIVE
    elif total < 0:
        label = Polarity.NEGATIVE
    else:
        label = Polarity.NEUTRAL
    return SentencePolarity(label=label, score=total)


@dataclass(frozen=True)
class CharacteristicScore:
    topic: Topic
    n_pos: int
    n_neg: int
    n_neutral: int
    score: float | None  # n_pos / (n_pos + n_neg); None when no polar evidence

    def to_json(self) -> dict:
        return {
            "characteristic": self.topic.value,
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
            "n_neutral": self.n_neutral,
            "score": self.score,
        }


def characteristic_scores(
    classified: list[tuple[Topic, SentencePolarity]],
) -> list[CharacteristicScore]:
    """Positive ratio per characteristic; 'other' sentences are excluded and
    neutral sentences carry no valence evidence."""
    counts = {t: [0, 0, 0] for t in CHARACTERISTIC_TOPICS}
    for topic, pol in classified:
        if topic not in counts:
            continue
        if pol.label is Polarity.POSITIVE:
            counts[topic][0] += 1
        elif pol.label is Polarity.NEGATIVE:
            counts[topic][1] += 1
        else:
            counts[topic][2] += 1
    out = []
    for t in CHARACTERISTIC_TOPICS:
        n_pos, n_neg, n_neutral = counts[t]
        score = n_pos / (n_pos + n_neg) if (n_pos + n_neg) > 0 else None
        out.append(CharacteristicScore(t, n_pos, n_neg, n_neutral, score))
    return out


@dataclass(frozen=True)
class QinUWeights:
    w_effectiveness: float = 1.0 / 3.0
    w_efficiency: float = 1.0 / 3.0
    w_risk: float = 1.0 / 3.0

    def __post_init__(self):
        if min(self.w_effectiveness, self.w_efficiency, self.w_risk) < 0:
            raise ValueError("weights must be non-negative")
        if abs(self.w_effectiveness + self.w_efficiency + self.w_risk - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")

    def weight_of(self, topic: Topic) -> float:
        return {
            Topic.EFFECTIVENESS: self.w_effectiveness,
            Topic.EFFICIENCY: self.w_efficiency,
            Topic.FREEDOM_FROM_RISK: self.w_risk,
        }[topic]

    def to_json(self) -> dict:
        return {
            "effectiveness": self.w_effectiveness,
            "efficiency": self.w_efficiency,
            "freedom_from_risk": self.w_risk,
        }


@dataclass(frozen=True)
class QinUReport:
    product_id: str
    characteristics: list[CharacteristicScore]
    aggregate: float | None
    weights: QinUWeights
    n_other: int = 0

    @property
    def n_sentences(self) -> int:
        return self.n_other + sum(c.n_pos + c.n_neg + c.n_neutral for c in self.characteristics)

    def to_json(self) -> dict:
        return {
            "product_id": self.product_id,
            "characteristics": [c.to_json() for c in self.characteristics],
            "aggregate": self.aggregate,
            "weights": self.weights.to_json(),
            "n_sentences": self.n_sentences,
            "n_other_excluded": self.n_other,
            "not_measured": list(NOT_MEASURED),
            "definitions": dict(CHARACTERISTIC_DEFINITIONS),
        }

    def render_text(self) -> str:
        lines = [f"Quality-in-use report for product {self.product_id or '(unnamed)'}"]
        lines.append(f"  sentences scored: {self.n_sentences} ({self.n_other} off-topic excluded)")
        for c in self.characteristics:
            shown = f"{c.score:.3f}" if c.score is not None else "undefined (no polar sentences)"
            lines.append(
                f"  {c.topic.value:<18} {shown:<36} +{c.n_pos} / -{c.n_neg} / ={c.n_neutral}"
            )
        for name in NOT_MEASURED:
            lines.append(f"  {name:<18} not measured")
        agg = f"{self.aggregate:.3f}" if self.aggregate is not None else "undefined"
        lines.append(f"  aggregate quality-in-use: {agg}")
        return "\n".join(lines) + "\n"


def qinu_score(
    chars: list[CharacteristicScore],
    weights: QinUWeights | None = None,
    product_id: str = "",
    n_other: int = 0,
) -> QinUReport:
    """Weighted mean of the defined characteristic scores, with the weights
    renormalized over the defined subset; undefined when nothing is defined."""
    weights = weights or QinUWeights()
    defined = [c for c in chars if c.score is not None]
    total_w = sum(weights.weight_of(c.topic) for c in defined)
    if defined and total_w > 0:
        aggregate = sum(weights.weight_of(c.topic) * c.score for c in defined) / total_w
    elif defined:
        # All weight sits on undefined characteristics: fall back to the plain mean.
        aggregate = sum(c.score for c in defined) / len(defined)
    else:
        aggregate = None
    return QinUReport(
        product_id=product_id,
        characteristics=list(chars),
        aggregate=aggregate,
        weights=weights,
        n_other=n_other,
    )
