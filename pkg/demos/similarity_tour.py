#!/usr/bin/env python3
"""Tour of the word and sentence similarity measures.

Shows the taxonomy path/depth measure, the trigram co-occurrence
relatedness, and how the sentence measure blends semantic-vector cosine
with word order on a few review-style sentences.
"""

from qinu.fixture import fixture_dataset, fixture_taxonomy
from qinu.pipeline import PipelineConfig, tokenize
from qinu.similarity import (
    SentenceSimParams,
    build_ngram_table,
    sentence_similarity,
    word_relatedness_ngram,
    word_similarity_taxonomy,
)


def main() -> None:
    tax = fixture_taxonomy()
    print("taxonomy word similarity (exp(-alpha*l) * tanh(beta*h)):")
    for a, b in [("speed", "speed"), ("speed", "fast"), ("speed", "slow"), ("speed", "refund")]:
        print(f"  sim({a!r}, {b!r}) = {word_similarity_taxonomy(a, b, tax):.4f}")

    cfg = PipelineConfig()
    docs = [tokenize(rec.text, cfg) for rec in fixture_dataset(seed=7)]
    table = build_ngram_table(docs)
    print("\ntrigram relatedness over the fixture corpus:")
    for a, b in [("load", "load"), ("speed", "load"), ("speed", "error"), ("speed", "zzz")]:
        print(f"  rel({a!r}, {b!r}) = {word_relatedness_ngram(a, b, table):.4f}")

    pairs = [
        ("the speed and load feels great", "loading speed seems very good"),
        ("the speed and load feels great", "the refund took three weeks"),
        ("crashes with data loss", "freeze and error on startup"),
    ]
    print("\nsentence similarity (delta=0.85 semantic + 0.15 word order):")
    for backend, knowledge in [("ngram", table), ("taxonomy", tax)]:
        params = SentenceSimParams(backend=backend)
        print(f"  backend={backend}:")
        for s1, s2 in pairs:
            v = sentence_similarity(tokenize(s1, cfg), tokenize(s2, cfg), params, knowledge)
            print(f"    {v:.4f}  {s1!r} vs {s2!r}")


if __name__ == "__main__":
    main()
