"""Deterministic fixture corpus generator.

Builds a desk-scale review corpus for one fictional software product:
60 reviews (12 per star; the balanced sampler picks exactly 50), whose
selected reviews segment into exactly 600 sentences, each with a gold
annotation. Per-topic vocabularies are seeded with the headline topic
keywords (work/features/interface/simple/easy; speed/stable/slow/load/
memory; issue/trouble/error/freeze/fix), long sentences carry strong topic
signal, and a controlled share of short 2-4 token sentences uses only
shared vocabulary so every classifier degrades on them. All output is a
pure function of the seed.
"""

import argparse
import json
import random
from dataclasses import dataclass
from pathlib import Path

from .corpus import (
    Annotation,
    GoldRecord,
    LabeledDataset,
    Polarity,
    Review,
    SegmentationConfig,
    Topic,
    segment_review,
)
from .pipeline import PipelineConfig, tokenize
from .similarity import Taxonomy

PRODUCT_ID = "swiftedit-pro"
DEFAULT_SEED = 7

TOPIC_SEED_WORDS = {
    Topic.EFFECTIVENESS: ["work", "features", "interface", "simple", "easy"],
    Topic.EFFICIENCY: ["speed", "stable", "slow", "load", "memory"],
    Topic.FREEDOM_FROM_RISK: ["issue", "trouble", "error", "freeze", "fix"],
}

TOPIC_EXTRA_WORDS = {
    Topic.EFFECTIVENESS: ["task", "goal", "accurate", "layout", "options", "workflow", "setup", "results"],
    Topic.EFFICIENCY: ["fast", "quick", "responsive", "lag", "cpu", "startup", "snappy", "resources"],
    Topic.FREEDOM_FROM_RISK: ["crash", "bug", "corrupt", "backup", "safe", "recover", "warning", "rollback"],
    Topic.OTHER: ["price", "support", "refund", "delivery", "license", "website", "billing", "account"],
}

POSITIVE_WORDS = ["great", "good", "excellent", "impressive", "smooth", "reliable", "pleasant", "helpful"]
NEGATIVE_WORDS = ["bad", "terrible", "awful", "poor", "annoying", "frustrating", "clumsy", "disappointing"]
NEUTRAL_ADJECTIVES = ["average", "typical", "standard", "unchanged", "ordinary"]
GENERIC_NOUNS = ["app", "software", "tool", "program", "product"]
SHORT_FILLERS = ["pretty", "really", "overall", "honestly"]
FEEL_VERBS = ["feels", "seems", "looks", "stays", "gets"]
INTENSIFIERS = ["very", "extremely", "slightly"]

TAILS = [
    ["after", "every", "update"],
    ["in", "daily", "use"],
    ["since", "the", "last", "release"],
    ["compared", "to", "other", "tools"],
]

# topic -> (total sentences, short sentences, neutral sentences)
TOPIC_PLAN = {
    Topic.EFFECTIVENESS: (180, 24, 18),
    Topic.EFFICIENCY: (180, 24, 18),
    Topic.FREEDOM_FROM_RISK: (140, 24, 14),
    Topic.OTHER: (100, 16, 10),
}

POSITIVE_SHARE_BY_STAR = {1: 0.12, 2: 0.28, 3: 0.50, 4: 0.72, 5: 0.90}

REVIEWS_PER_STAR = 12
SELECTED_PER_STAR = 10
SENTENCES_PER_SELECTED_REVIEW = 12


@dataclass(frozen=True)
class FixtureSentence:
    text: str
    topic: Topic
    polarity: Polarity
    keyword: str | None
    opinion: str | None
    modifiers: list[str]


@dataclass(frozen=True)
class FixtureBundle:
    reviews: list[Review]
    annotations: list[Annotation]
    gold: LabeledDataset
    selected_review_ids: list[str]


def _topic_word(rng: random.Random, topic: Topic, exclude: set[str] = frozenset()) -> str:
    seeds = TOPIC_SEED_WORDS.get(topic, [])
    extras = TOPIC_EXTRA_WORDS[topic]
    pool = seeds if (seeds and rng.random() < 0.85) else extras
    choices = [w for w in pool if w not in exclude] or [w for w in seeds + extras if w not in exclude]
    return rng.choice(choices)


def _opinion_part(rng: random.Random, polarity: Polarity) -> tuple[list[str], str, list[str]]:
    """(tokens, opinion word, modifier tokens) realizing the requested polarity."""
    modifiers = []
    tokens = []
    negated = rng.random() < 0.08
    if negated:
        tokens.append("not")
        modifiers.append("not")
    if rng.random() < 0.15:
        intens = rng.choice(INTENSIFIERS)
        tokens.append(intens)
        modifiers.append(intens)
    wants_positive = polarity is Polarity.POSITIVE
    surface_positive = wants_positive != negated
    opinion = rng.choice(POSITIVE_WORDS if surface_positive else NEGATIVE_WORDS)
    tokens.append(opinion)
    return tokens, opinion, modifiers


def _realize_long(rng: random.Random, topic: Topic, polarity: Polarity) -> FixtureSentence:
    kw = _topic_word(rng, topic)
    tw2 = _topic_word(rng, topic, exclude={kw})
    if polarity is Polarity.NEUTRAL:
        tokens = ["the", kw, "and", "the", tw2, "changed"] + rng.choice(TAILS[:3])
        return FixtureSentence(
            text=_render(rng, tokens),
            topic=topic,
            polarity=polarity,
            keyword=kw,
            opinion=None,
            modifiers=[],
        )
    op_tokens, opinion, modifiers = _opinion_part(rng, polarity)
    shape = rng.randrange(3)
    if shape == 0:
        tokens = ["the", kw, "and", "the", tw2, rng.choice(FEEL_VERBS)] + op_tokens
    elif shape == 1:
        tokens = ["i", "think", "the", kw, "and", tw2, rng.choice(FEEL_VERBS)] + op_tokens
    else:
        noun = rng.choice(GENERIC_NOUNS)
        tokens = ["this", noun, "has", kw, "and", tw2, "that", rng.choice(FEEL_VERBS)] + op_tokens
    budget = 12 - len(tokens)
    fitting = [t for t in TAILS if len(t) <= budget]
    if fitting and rng.random() >= 0.2:  # some sentences stay mid-length
        tokens = tokens + rng.choice(fitting)
    return FixtureSentence(
        text=_render(rng, tokens),
        topic=topic,
        polarity=polarity,
        keyword=kw,
        opinion=opinion,
        modifiers=modifiers,
    )


def _realize_short(rng: random.Random, topic: Topic, polarity: Polarity) -> FixtureSentence:
    """Ambiguous 2-4 token sentence built only from vocabulary shared by all
    topics: this is the controlled hard case for the length analysis."""
    noun = rng.choice(GENERIC_NOUNS)
    tokens: list[str] = []
    if rng.random() < 0.3:
        tokens.append(rng.choice(SHORT_FILLERS))
    if polarity is Polarity.NEUTRAL:
        tokens += [rng.choice(NEUTRAL_ADJECTIVES), noun]
        opinion = None
        modifiers: list[str] = []
    else:
        modifiers = []
        if rng.random() < 0.2:
            intens = rng.choice(INTENSIFIERS)
            tokens.append(intens)
            modifiers.append(intens)
        opinion = rng.choice(POSITIVE_WORDS if polarity is Polarity.POSITIVE else NEGATIVE_WORDS)
        tokens += [opinion, noun]
    return FixtureSentence(
        text=_render(rng, tokens),
        topic=topic,
        polarity=polarity,
        keyword=noun,
        opinion=opinion,
        modifiers=modifiers,
    )


def _render(rng: random.Random, tokens: list[str]) -> str:
    text = " ".join(tokens)
    terminal = "!" if rng.random() < 0.1 else "."
    return text[0].upper() + text[1:] + terminal


def _sentence_specs(rng: random.Random) -> list[tuple[Topic, bool, bool]]:
    """(topic, is_short, is_neutral) for all 600 gold sentences, shuffled."""
    specs = []
    for topic, (total, short, neutral) in TOPIC_PLAN.items():
        flags = [(True, False)] * short + [(False, False)] * (total - short)
        rng.shuffle(flags)
        # overlay neutrality independent of length
        neutral_idx = set(rng.sample(range(total), neutral))
        specs.extend(
            (topic, is_short, i in neutral_idx) for i, (is_short, _) in enumerate(flags)
        )
    rng.shuffle(specs)
    return specs


def _find_span(tokens: list[str], words: list[str]) -> tuple[int, int] | None:
    """Token span of the first contiguous occurrence of ``words``."""
    if not words:
        return None
    for i in range(len(tokens) - len(words) + 1):
        if tokens[i : i + len(words)] == words:
            return (i, i + len(words))
    return None


def generate(seed: int = DEFAULT_SEED) -> FixtureBundle:
    rng = random.Random(seed)
    specs = _sentence_specs(rng)
    pipeline = PipelineConfig()
    seg_rules = SegmentationConfig()

    reviews: list[Review] = []
    annotations: list[Annotation] = []
    gold: list[GoldRecord] = []
    selected_ids: list[str] = []
    spec_cursor = 0
    stamp = 0

    for i in range(5 * REVIEWS_PER_STAR):
        star = i // REVIEWS_PER_STAR + 1
        rank = i % REVIEWS_PER_STAR
        review_id = f"r{i + 1:03d}"
        is_selected = rank < SELECTED_PER_STAR
        p_pos = POSITIVE_SHARE_BY_STAR[star]

        sentences: list[FixtureSentence] = []
        if is_selected:
            for _ in range(SENTENCES_PER_SELECTED_REVIEW):
                topic, is_short, is_neutral = specs[spec_cursor]
                spec_cursor += 1
                if is_neutral:
                    polarity = Polarity.NEUTRAL
                else:
                    polarity = Polarity.POSITIVE if rng.random() < p_pos else Polarity.NEGATIVE
                realize = _realize_short if is_short else _realize_long
                sentences.append(realize(rng, topic, polarity))
        else:
            for _ in range(3):
                topic = rng.choice(list(TOPIC_PLAN))
                polarity = Polarity.POSITIVE if rng.random() < p_pos else Polarity.NEGATIVE
                sentences.append(_realize_long(rng, topic, polarity))

        body = " ".join(s.text for s in sentences)
        review = Review(
            review_id=review_id,
            source="fixture",
            product_id=PRODUCT_ID,
            stars=star,
            title=f"{star}-star take on {PRODUCT_ID}",
            body=body,
            date=f"2024-01-{(i % 28) + 1:02d}",
            helpfulness_votes=100 - rank,
        )
        reviews.append(review)
        if not is_selected:
            continue
        selected_ids.append(review_id)

        stored = segment_review(review, seg_rules)
        if len(stored) != len(sentences):
            raise AssertionError(
                f"fixture review {review_id} segmented into {len(stored)} sentences, "
                f"expected {len(sentences)}"
            )
        for stored_sentence, spec in zip(stored, sentences):
            if stored_sentence.text != spec.text:
                raise AssertionError(
                    f"fixture sentence mismatch in {review_id}: {stored_sentence.text!r}"
                )
            tokens = tokenize(spec.text, pipeline)
            keyword_span = (
                _find_span(tokens, [spec.keyword]) if spec.topic is not Topic.OTHER else None
            )
            opinion_span = _find_span(tokens, [spec.opinion]) if spec.opinion else None
            modifier_span = _find_span(tokens, spec.modifiers) if spec.modifiers else None
            if spec.topic is not Topic.OTHER and keyword_span is None:
                raise AssertionError(f"keyword {spec.keyword!r} lost in tokenization: {tokens}")
            stamp += 1
            ann = Annotation(
                sentence_id=stored_sentence.sentence_id,
                topic=spec.topic,
                polarity=spec.polarity,
                annotator_id="ann1",
                timestamp=f"2024-02-01T{10 + stamp // 3600:02d}:{(stamp // 60) % 60:02d}:{stamp % 60:02d}",
                keyword_span=keyword_span,
                opinion_span=opinion_span,
                modifier_span=modifier_span,
            )
            annotations.append(ann)
            gold.append(
                GoldRecord(
                    sentence_id=stored_sentence.sentence_id,
                    text=stored_sentence.text,
                    topic=spec.topic,
                    polarity=spec.polarity,
                    keyword_span=keyword_span,
                    opinion_span=opinion_span,
                    modifier_span=modifier_span,
                )
            )

    gold.sort(key=lambda r: r.sentence_id)
    return FixtureBundle(
        reviews=reviews,
        annotations=annotations,
        gold=gold,
        selected_review_ids=selected_ids,
    )


def fixture_dataset(seed: int = DEFAULT_SEED) -> LabeledDataset:
    """The 600-sentence gold standard as a ready LabeledDataset."""
    return generate(seed).gold


def fixture_taxonomy() -> Taxonomy:
    """Small taxonomy over the fixture vocabulary for the taxonomy backend."""
    synsets: list[tuple[str, list[str], str | None]] = [("quality", [], None)]
    groups = {
        Topic.EFFECTIVENESS: [
            ["work", "task", "goal"],
            ["features", "options", "functions"],
            ["interface", "layout"],
            ["simple", "easy"],
            ["accurate", "results"],
        ],
        Topic.EFFICIENCY: [
            ["speed", "fast", "quick"],
            ["slow", "lag", "sluggish"],
            ["stable", "responsive", "snappy"],
            ["load", "startup"],
            ["memory", "cpu", "resources"],
        ],
        Topic.FREEDOM_FROM_RISK: [
            ["issue", "trouble", "bug"],
            ["error", "warning"],
            ["freeze", "crash"],
            ["fix", "recover", "rollback"],
            ["backup", "safe"],
        ],
    }
    for topic, topic_groups in groups.items():
        parent = f"{topic.value}_terms"
        synsets.append((parent, [], "quality"))
        for g, words in enumerate(topic_groups):
            synsets.append((f"{parent}_{g}", words, parent))
    return Taxonomy(synsets)


def write_fixture(outdir: str | Path, seed: int = DEFAULT_SEED) -> FixtureBundle:
    """Write reviews.jsonl, gold_annotations.jsonl and taxonomy.json."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    bundle = generate(seed)
    with (outdir / "reviews.jsonl").open("w", encoding="utf-8") as f:
        for r in bundle.reviews:
            f.write(json.dumps(r.to_json(), ensure_ascii=False) + "\n")
    with (outdir / "gold_annotations.jsonl").open("w", encoding="utf-8") as f:
        for a in bundle.annotations:
            f.write(json.dumps(a.to_json(), ensure_ascii=False) + "\n")
    tax = fixture_taxonomy()
    (outdir / "taxonomy.json").write_text(
        json.dumps(
            {
                "synsets": [
                    {"id": sid, "words": tax._words[sid], "parent": tax._parent[sid]}
                    for sid in sorted(tax._parent)
                ]
            },
            ensure_ascii=False,
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return bundle


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Generate the deterministic fixture corpus.")
    parser.add_argument("outdir", help="directory for reviews.jsonl / gold_annotations.jsonl")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = parser.parse_args(argv)
    bundle = write_fixture(args.outdir, args.seed)
    print(
        f"wrote {len(bundle.reviews)} reviews, {len(bundle.annotations)} gold annotations "
        f"to {args.outdir}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
