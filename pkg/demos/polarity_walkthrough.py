#!/usr/bin/env python3
"""From annotated opinions to an aggregate quality-in-use score.

Induces the polarity lexicon from the fixture gold standard, scores a few
sentences (watch the negator flip and intensifier scaling), then rolls
classified sentences up into characteristic scores and the weighted
aggregate.
"""

from qinu.fixture import fixture_dataset
from qinu.pipeline import PipelineConfig, tokenize
from qinu.scoring import (
    QinUWeights,
    build_lexicon,
    characteristic_scores,
    qinu_score,
    score_polarity,
)

SENTENCES = [
    "this software is great",
    "this software is not great",
    "the startup feels very slow and extremely annoying",
    "the menu changed with the update",
]


def main() -> None:
    gold = fixture_dataset(seed=7)
    cfg = PipelineConfig()
    lexicon = build_lexicon(gold, cfg)
    print(f"lexicon induced from {len(gold)} gold sentences: {len(lexicon.scores)} scored words")
    sample = sorted(lexicon.scores.items(), key=lambda kv: -abs(kv[1]))[:8]
    for word, score in sample:
        print(f"  {word:<15} {score:+.3f}")

    print("\nsentence polarity (3-token negation/intensifier window):")
    for text in SENTENCES:
        out = score_polarity(tokenize(text, cfg), lexicon)
        print(f"  {out.label.value:<8} {out.score:+.3f}  {text!r}")

    print("\ncharacteristic scores from the gold topics/polarities:")
    classified = [(rec.topic, score_polarity(tokenize(rec.text, cfg), lexicon)) for rec in gold]
    chars = characteristic_scores(classified)
    report = qinu_score(chars, QinUWeights(), product_id="swiftedit-pro",
                        n_other=sum(1 for rec in gold if rec.topic.value == "other"))
    print(report.render_text())


if __name__ == "__main__":
    main()
