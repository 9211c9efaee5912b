import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qinu.pipeline import (
    PipelineConfig,
    build_vocabulary,
    tfidf_transform,
    token_count,
    tokenize,
    vectorize_counts,
)


def cfg(stopwords=(), **kwargs):
    return PipelineConfig(stopwords=frozenset(stopwords), **kwargs)


class TestTokenize:
    def test_lowercase_strip_stopwords(self):
        assert tokenize("This software is FAST!", cfg({"this", "is"})) == ["software", "fast"]

    def test_empty_string(self):
        assert tokenize("", cfg()) == []

    def test_interior_punctuation_preserved(self):
        # edge-strip oracle: only leading/trailing punctuation goes
        assert tokenize("v2.0 won't load", cfg()) == ["v2.0", "won't", "load"]
        assert tokenize('"quoted!" (aside)', cfg()) == ["quoted", "aside"]

    def test_no_stripping_when_disabled(self):
        assert tokenize("wow!", cfg(strip_punctuation=False)) == ["wow!"]

    def test_min_token_len(self):
        assert tokenize("a bb ccc", cfg(min_token_len=2)) == ["bb", "ccc"]

    def test_pure_and_deterministic(self):
        config = PipelineConfig()
        text = "Some Text, with CASE and punct!!"
        assert tokenize(text, config) == tokenize(text, config)

    def test_token_count_ignores_stopwords_filter(self):
        config = PipelineConfig(stopwords=frozenset({"the", "is"}))
        assert token_count("the tool is fast", config) == 4
        assert len(tokenize("the tool is fast", config)) == 2

    def test_min_token_len_validation(self):
        with pytest.raises(ValueError):
            PipelineConfig(min_token_len=0)


class TestVocabulary:
    def test_counts_and_df(self):
        vocab = build_vocabulary([["fast", "fast"], ["slow"]])
        assert len(vocab) == 2
        assert vocab.document_frequency[vocab.id_of("fast")] == 1
        assert vocab.document_frequency[vocab.id_of("slow")] == 1
        assert vocab.n_documents == 2

    def test_single_empty_doc(self):
        vocab = build_vocabulary([[]])
        assert len(vocab) == 0
        assert vocab.n_documents == 1

    def test_empty_docs_list_rejected(self):
        with pytest.raises(ValueError):
            build_vocabulary([])

    def test_first_occurrence_order(self):
        vocab = build_vocabulary([["b", "a"], ["a", "c"]])
        assert vocab.terms == ["b", "a", "c"]

    def test_rebuild_is_identical(self, gold600):
        # rebuild-and-compare oracle over the 600-sentence fixture
        docs = [tokenize(r.text, PipelineConfig()) for r in gold600]
        v1 = build_vocabulary(docs)
        v2 = build_vocabulary(docs)
        assert v1 == v2

    def test_json_roundtrip(self):
        vocab = build_vocabulary([["fast", "slow"], ["fast"]])
        from qinu.pipeline import Vocabulary

        assert Vocabulary.from_json(vocab.to_json()) == vocab


class TestVectorize:
    def test_counts(self):
        vocab = build_vocabulary([["fast", "slow"]])
        v = vectorize_counts(["fast", "fast", "slow"], vocab)
        assert v.weights == {vocab.id_of("fast"): 2.0, vocab.id_of("slow"): 1.0}
        assert v.length_tokens == 3

    def test_all_oov(self):
        vocab = build_vocabulary([["fast"]])
        v = vectorize_counts(["unknown", "words"], vocab)
        assert v.weights == {}
        assert v.length_tokens == 2

    def test_empty_tokens(self):
        vocab = build_vocabulary([["fast"]])
        v = vectorize_counts([], vocab)
        assert v.weights == {}
        assert v.length_tokens == 0

    def test_total_bounded_by_length(self):
        vocab = build_vocabulary([["a", "b"]])
        v = vectorize_counts(["a", "b", "zzz"], vocab)
        assert v.total <= v.length_tokens


class TestTfidf:
    def test_ubiquitous_term_dropped(self):
        vocab = build_vocabulary([["common", "x"], ["common", "y"]])
        v = vectorize_counts(["common"], vocab)
        assert tfidf_transform(v, vocab).weights == {}

    def test_single_term_normalizes_to_one(self):
        # count=2, N=4, df=1, single component: unit after L2
        vocab = build_vocabulary([["rare"], ["a"], ["b"], ["c"]])
        v = vectorize_counts(["rare", "rare"], vocab)
        out = tfidf_transform(v, vocab)
        assert out.weights[vocab.id_of("rare")] == pytest.approx(1.0, abs=1e-12)

    def test_raw_weight_formula(self):
        # direct formula evaluation: count=1, N=4, df=2 -> ln 2
        vocab = build_vocabulary([["w", "x"], ["w", "y"], ["z"], ["q"]])
        v = vectorize_counts(["w"], vocab)
        out = tfidf_transform(v, vocab, l2_normalize=False)
        assert out.weights[vocab.id_of("w")] == pytest.approx(math.log(2), abs=1e-12)
        assert round(out.weights[vocab.id_of("w")], 4) == 0.6931

    @given(
        st.lists(
            st.lists(st.sampled_from("abcdefgh"), min_size=0, max_size=6),
            min_size=1,
            max_size=8,
        ),
        st.lists(st.sampled_from("abcdefghij"), min_size=0, max_size=8),
    )
    def test_nonnegative_and_unit_norm(self, docs, tokens):
        vocab = build_vocabulary(docs)
        out = tfidf_transform(vectorize_counts(tokens, vocab), vocab)
        assert all(w >= 0 for w in out.weights.values())
        if out.weights:
            assert out.norm() == pytest.approx(1.0, abs=1e-9)
