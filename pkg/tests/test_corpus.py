import json

import pytest

from qinu.corpus import (
    Annotation,
    Polarity,
    Review,
    SegmentationConfig,
    Topic,
    segment_review,
)
from qinu.config import ProjectConfig, init_project
from qinu.errors import ConflictError, DataError, ValidationError


def _review(review_id="r1", stars=5, body="Works great. Crashes on load.", votes=0, product="p1"):
    return Review(
        review_id=review_id,
        source="test",
        product_id=product,
        stars=stars,
        title="",
        body=body,
        helpfulness_votes=votes,
    )


def _write_jsonl(path, records):
    with path.open("w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec) + "\n")


@pytest.fixture()
def store(tmp_path):
    return init_project(tmp_path / "proj", ProjectConfig())


class TestIngest:
    def test_three_valid_records(self, store, tmp_path):
        path = tmp_path / "reviews.jsonl"
        _write_jsonl(path, [_review(f"r{i}").to_json() for i in range(3)])
        assert store.ingest_reviews(path) == 3

    def test_reingest_is_idempotent(self, store, tmp_path):
        path = tmp_path / "reviews.jsonl"
        _write_jsonl(path, [_review(f"r{i}").to_json() for i in range(3)])
        store.ingest_reviews(path)
        before = store.reviews_path.read_bytes()
        assert store.ingest_reviews(path) == 0
        assert store.reviews_path.read_bytes() == before

    def test_invalid_stars_skipped_with_warning(self, store, tmp_path, caplog):
        # line-by-line oracle: exactly the two valid lines survive
        path = tmp_path / "reviews.jsonl"
        _write_jsonl(
            path,
            [
                _review("r1").to_json(),
                _review("r2", stars=7).to_json(),
                _review("r3").to_json(),
            ],
        )
        with caplog.at_level("WARNING", logger="qinu.corpus"):
            assert store.ingest_reviews(path, strict=False) == 2
        assert len(caplog.records) == 1
        assert "stars" in caplog.records[0].message

    def test_invalid_record_aborts_when_strict(self, store, tmp_path):
        path = tmp_path / "reviews.jsonl"
        _write_jsonl(path, [_review("r1", stars=7).to_json()])
        with pytest.raises(DataError, match="stars"):
            store.ingest_reviews(path, strict=True)

    def test_unreadable_file(self, store, tmp_path):
        with pytest.raises(DataError, match="cannot read"):
            store.ingest_reviews(tmp_path / "missing.jsonl")

    def test_empty_body_rejected(self):
        with pytest.raises(ValidationError, match="body"):
            _review(body="   ").validate()


class TestSampleBalanced:
    def _fill(self, store, tmp_path, counts_per_star):
        records = []
        for star, n in counts_per_star.items():
            for i in range(n):
                records.append(
                    _review(f"r{star}_{i:02d}", stars=star, votes=100 - i, body="One. Two.").to_json()
                )
        path = tmp_path / "sampling.jsonl"
        _write_jsonl(path, records)
        store.ingest_reviews(path)

    def test_full_store_selects_fifty(self, store, tmp_path):
        self._fill(store, tmp_path, {s: 12 for s in range(1, 6)})
        assert len(store.sample_balanced(10)) == 50

    def test_partial_store_takes_min(self, store, tmp_path):
        # min(count, per_star) per star, summed: 10 + 3 = 13
        self._fill(store, tmp_path, {5: 12, 1: 3})
        assert len(store.sample_balanced(10)) == 13

    def test_per_star_zero_rejected(self, store, tmp_path):
        self._fill(store, tmp_path, {5: 1})
        with pytest.raises(ValueError, match="per_star"):
            store.sample_balanced(0)

    def test_empty_store(self, store):
        with pytest.raises(DataError, match="no reviews"):
            store.sample_balanced(10)

    def test_ranked_by_votes_then_id(self, store, tmp_path):
        records = [
            _review("rb", stars=5, votes=5, body="X.").to_json(),
            _review("ra", stars=5, votes=5, body="X.").to_json(),
            _review("rc", stars=5, votes=9, body="X.").to_json(),
        ]
        path = tmp_path / "r.jsonl"
        _write_jsonl(path, records)
        store.ingest_reviews(path)
        assert store.sample_balanced(2) == ["rc", "ra"]

    def test_selection_is_deterministic(self, store, tmp_path):
        self._fill(store, tmp_path, {s: 12 for s in range(1, 6)})
        assert store.sample_balanced(10) == store.sample_balanced(10)


class TestSegmentReview:
    def test_two_terminal_periods(self):
        sentences = segment_review(_review(body="Works great. Crashes on load."))
        assert [s.text for s in sentences] == ["Works great.", "Crashes on load."]
        assert [s.ordinal for s in sentences] == [0, 1]

    def test_abbreviation_is_not_a_boundary(self):
        # oracle: the only non-abbreviation terminator is the final period
        body = "Use the menu, e.g. File, to start."
        sentences = segment_review(_review(body=body))
        assert len(sentences) == 1
        assert sentences[0].text == body

    def test_long_fragment_flagged_for_review(self):
        body = " ".join(f"tok{i}" for i in range(80))
        sentences = segment_review(_review(body=body))
        assert len(sentences) == 1
        assert sentences[0].needs_review is True

    def test_short_fragment_not_flagged(self):
        assert segment_review(_review(body="Fine."))[0].needs_review is False

    def test_interior_punctuation_not_a_boundary(self):
        sentences = segment_review(_review(body="v2.0 won't load"))
        assert len(sentences) == 1

    @pytest.mark.parametrize(
        "body",
        [
            "Works great. Crashes on load.",
            "One! Two? Three...",
            "  Leading spaces. And trailing.   ",
            'He said "done." Then left.',
            "No terminal punctuation at all",
        ],
    )
    def test_spans_partition_the_body(self, body):
        review = _review(body=body)
        sentences = segment_review(review)
        assert sentences[0].span_start == 0
        assert sentences[-1].span_end == len(body)
        for prev, nxt in zip(sentences, sentences[1:]):
            assert prev.span_end == nxt.span_start
        for s in sentences:
            assert s.text == body[s.span_start:s.span_end].strip()

    def test_max_tokens_configurable(self):
        rules = SegmentationConfig(max_tokens=3)
        assert segment_review(_review(body="one two three four."), rules)[0].needs_review


class TestSplitSentence:
    def _segmented(self, store, tmp_path, body="ABCDEFGHIJ KLMNOPQRST"):
        path = tmp_path / "one.jsonl"
        _write_jsonl(path, [_review("r1", body=body).to_json()])
        store.ingest_reviews(path)
        store.segment(review_ids=["r1"])
        return store.sentences_of("r1")[0]

    def test_split_partitions_the_original(self, store, tmp_path):
        parent = self._segmented(store, tmp_path)  # 21 chars, single sentence
        left, right = store.split_sentence(parent.sentence_id, 10)
        assert (left.span_start, left.span_end) == (parent.span_start, parent.span_start + 10)
        assert (right.span_start, right.span_end) == (parent.span_start + 10, parent.span_end)
        assert left.origin == right.origin == "manual_split"
        assert [s.sentence_id for s in store.sentences_of("r1")] == [
            left.sentence_id,
            right.sentence_id,
        ]
        store.check_invariants()

    def test_split_at_boundary_rejected(self, store, tmp_path):
        parent = self._segmented(store, tmp_path)
        with pytest.raises(ValidationError, match="strictly inside"):
            store.split_sentence(parent.sentence_id, 0)

    def test_split_annotated_sentence_rejected(self, store, tmp_path):
        parent = self._segmented(store, tmp_path)
        store.record_annotation(
            Annotation(
                sentence_id=parent.sentence_id,
                topic=Topic.OTHER,
                polarity=Polarity.NEUTRAL,
                annotator_id="a1",
                timestamp="2024-01-01T00:00:00Z",
            )
        )
        with pytest.raises(ConflictError, match="already annotated"):
            store.split_sentence(parent.sentence_id, 10)

    def test_whitespace_half_rejected(self, store, tmp_path):
        parent = self._segmented(store, tmp_path, body="ABCDEFGHIJ    ")
        # offset 12 leaves a whitespace-only right half
        with pytest.raises(ValidationError, match="non-empty"):
            store.split_sentence(parent.sentence_id, 12)

    def test_following_ordinals_shift(self, store, tmp_path):
        path = tmp_path / "two.jsonl"
        _write_jsonl(path, [_review("r1", body="ABCDEFGHIJ KLMNOPQRST. Second one here.").to_json()])
        store.ingest_reviews(path)
        store.segment(review_ids=["r1"])
        first, second = store.sentences_of("r1")
        store.split_sentence(first.sentence_id, 10)
        ordered = store.sentences_of("r1")
        assert [s.ordinal for s in ordered] == [0, 1, 2]
        assert ordered[2].sentence_id == second.sentence_id
        store.check_invariants()

    def test_split_survives_reload(self, store, tmp_path):
        parent = self._segmented(store, tmp_path)
        store.split_sentence(parent.sentence_id, 10)
        from qinu.corpus import ProjectStore

        reloaded = ProjectStore(store.root, store.pipeline_config, store.segmentation_config)
        assert [s.sentence_id for s in reloaded.sentences_of("r1")] == [
            s.sentence_id for s in store.sentences_of("r1")
        ]
        reloaded.check_invariants()


class TestAnnotations:
    def _fast_sentence(self, store, tmp_path):
        path = tmp_path / "fast.jsonl"
        _write_jsonl(path, [_review("r1", body="this software is fast").to_json()])
        store.ingest_reviews(path)
        store.segment(review_ids=["r1"])
        return store.sentences_of("r1")[0]

    def test_fast_keyword_annotation(self, store, tmp_path):
        # pipeline tokens: ["software", "fast"] ("this"/"is" are stopwords)
        s = self._fast_sentence(store, tmp_path)
        a = Annotation(
            sentence_id=s.sentence_id,
            topic=Topic.EFFICIENCY,
            polarity=Polarity.POSITIVE,
            annotator_id="ann1",
            timestamp="2024-01-01T00:00:00Z",
            keyword_span=(1, 2),
            opinion_span=(1, 2),
        )
        stored = store.record_annotation(a)
        assert stored.topic is Topic.EFFICIENCY
        gold = store.export_gold()
        assert gold[0].keyword_span == (1, 2)

    def test_other_with_keyword_span_rejected(self, store, tmp_path):
        s = self._fast_sentence(store, tmp_path)
        with pytest.raises(ValidationError, match="keyword_span"):
            store.record_annotation(
                Annotation(
                    sentence_id=s.sentence_id,
                    topic=Topic.OTHER,
                    polarity=Polarity.NEUTRAL,
                    annotator_id="ann1",
                    timestamp="2024-01-01T00:00:00Z",
                    keyword_span=(0, 1),
                )
            )

    def test_span_out_of_token_range_rejected(self, store, tmp_path):
        s = self._fast_sentence(store, tmp_path)
        with pytest.raises(ValidationError, match="out of token range"):
            store.record_annotation(
                Annotation(
                    sentence_id=s.sentence_id,
                    topic=Topic.EFFICIENCY,
                    polarity=Polarity.POSITIVE,
                    annotator_id="ann1",
                    timestamp="2024-01-01T00:00:00Z",
                    keyword_span=(5, 6),
                )
            )

    def test_unknown_sentence_rejected(self, store):
        with pytest.raises(DataError, match="unknown sentence"):
            store.record_annotation(
                Annotation(
                    sentence_id="ghost",
                    topic=Topic.OTHER,
                    polarity=Polarity.NEUTRAL,
                    annotator_id="ann1",
                    timestamp="2024-01-01T00:00:00Z",
                )
            )

    def test_reannotation_supersedes(self, store, tmp_path):
        # supersede-by-timestamp oracle: the later record wins in export
        s = self._fast_sentence(store, tmp_path)
        for ts, topic in [
            ("2024-01-01T00:00:00Z", Topic.EFFICIENCY),
            ("2024-01-02T00:00:00Z", Topic.EFFECTIVENESS),
        ]:
            store.record_annotation(
                Annotation(
                    sentence_id=s.sentence_id,
                    topic=topic,
                    polarity=Polarity.POSITIVE,
                    annotator_id="ann1",
                    timestamp=ts,
                    keyword_span=(0, 1),
                )
            )
        gold = store.export_gold()
        assert len(gold) == 1
        assert gold[0].topic is Topic.EFFECTIVENESS


class TestExportGold:
    def _two_sentence_store(self, store, tmp_path):
        path = tmp_path / "g.jsonl"
        _write_jsonl(path, [_review("r1", body="Fast tool. Crashes daily.").to_json()])
        store.ingest_reviews(path)
        store.segment(review_ids=["r1"])
        return store.sentences_of("r1")

    def test_empty_annotation_store(self, store, tmp_path):
        self._two_sentence_store(store, tmp_path)
        with pytest.raises(DataError, match="no annotations"):
            store.export_gold()

    def test_tied_annotators_drop_sentence(self, store, tmp_path, caplog):
        # majority-vote oracle: a 1-1 tie yields no gold record
        s1, s2 = self._two_sentence_store(store, tmp_path)
        for annotator, topic in [("a1", Topic.EFFICIENCY), ("a2", Topic.EFFECTIVENESS)]:
            store.record_annotation(
                Annotation(
                    sentence_id=s1.sentence_id,
                    topic=topic,
                    polarity=Polarity.POSITIVE,
                    annotator_id=annotator,
                    timestamp="2024-01-01T00:00:00Z",
                    keyword_span=(0, 1),
                )
            )
        store.record_annotation(
            Annotation(
                sentence_id=s2.sentence_id,
                topic=Topic.FREEDOM_FROM_RISK,
                polarity=Polarity.NEGATIVE,
                annotator_id="a1",
                timestamp="2024-01-01T00:00:00Z",
                keyword_span=(0, 1),
            )
        )
        with caplog.at_level("WARNING", logger="qinu.corpus"):
            gold = store.export_gold()
        assert [g.sentence_id for g in gold] == [s2.sentence_id]
        assert "dropped 1" in caplog.text

    def test_majority_wins(self, store, tmp_path):
        s1, _ = self._two_sentence_store(store, tmp_path)
        votes = [("a1", Topic.EFFICIENCY), ("a2", Topic.EFFICIENCY), ("a3", Topic.OTHER)]
        for annotator, topic in votes:
            store.record_annotation(
                Annotation(
                    sentence_id=s1.sentence_id,
                    topic=topic,
                    polarity=Polarity.POSITIVE,
                    annotator_id=annotator,
                    timestamp="2024-01-01T00:00:00Z",
                    keyword_span=(0, 1) if topic is not Topic.OTHER else None,
                )
            )
        gold = store.export_gold()
        assert gold[0].topic is Topic.EFFICIENCY

    def test_export_is_deterministic_and_sorted(self, project):
        gold1 = project.export_gold()
        gold2 = project.export_gold()
        assert gold1 == gold2
        assert [g.sentence_id for g in gold1] == sorted(g.sentence_id for g in gold1)

    def test_six_hundred_records(self, project):
        assert len(project.export_gold()) == 600
