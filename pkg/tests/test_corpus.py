import pytest

from bioinvert.corpus import (
    BatchStatus,
    LabelSource,
    Verdict,
    audit_size,
    build_review_batches,
    classify,
    expected_batch_count,
    generate_samples,
    record_verdict,
    review_loop_step,
    run_review_loop,
    segment,
    with_labels,
)
from bioinvert.errors import (
    EmptyDocumentError,
    InsufficientCorpusError,
    MaxRoundsExceededError,
)
from bioinvert.frames import Dimension
from bioinvert.lexicon import FixedLabelClassifier, LexiconClassifier
from bioinvert.llm import MockLlmClient


class TestSegment:
    def test_two_terminals(self):
        records = segment("A swims. B crawls.", "d")
        assert [r.text for r in records] == ["A swims.", "B crawls."]
        assert [r.id for r in records] == ["d:0000", "d:0001"]

    def test_bracketed_abbreviation_does_not_split(self):
        records = segment("It shrinks (approx. 63%) fast.", "d")
        assert len(records) == 1
        assert records[0].text == "It shrinks (approx. 63%) fast."

    def test_empty_document(self):
        with pytest.raises(EmptyDocumentError):
            segment("   \n ", "d")

    def test_question_and_exclamation(self):
        records = segment("Why swim? Crawl! Then rest.", "d")
        assert [r.text for r in records] == ["Why swim?", "Crawl!", "Then rest."]

    def test_cjk_terminals(self):
        records = segment("它游泳。它爬行。", "d")
        assert len(records) == 2

    def test_unterminated_tail_kept(self):
        records = segment("First sentence. And a tail without a stop", "d")
        assert records[-1].text == "And a tail without a stop"

    @pytest.mark.parametrize(
        "document",
        [
            "A swims. B crawls.",
            "  Leading space. (Nested. Stops.) After.",
            "One\nacross lines. Two.",
            "Tail without terminator",
        ],
    )
    def test_spans_cover_document(self, document):
        records = segment(document, "d")
        # Concatenating span slices with the inter-span whitespace
        # reproduces the input exactly.
        rebuilt = []
        cursor = 0
        for r in records:
            start, end = r.span
            rebuilt.append(document[cursor:start])
            assert document[cursor:start].strip() == ""
            rebuilt.append(document[start:end])
            assert document[start:end] == r.text
            cursor = end
        rebuilt.append(document[cursor:])
        assert document[cursor:].strip() == ""
        assert "".join(rebuilt) == document

    def test_golden_corpus_resegments_to_thirty(self, golden_corpus):
        # The committed mini-corpus doubles as the hand-segmented oracle.
        joined = " ".join(entry["text"] for entry in golden_corpus)
        records = segment(joined, "golden")
        assert [r.text for r in records] == [e["text"] for e in golden_corpus]


class TestClassify:
    def _sentence(self, text):
        return segment(text, "t")[0]

    def test_characteristic_example(self):
        labeled = classify(self._sentence("The mantle acts as an elastic energy storage structure."), LexiconClassifier())
        assert Dimension.CHARACTERISTIC in labeled.labels
        assert labeled.label_source is LabelSource.LEXICON

    def test_no_hits_means_empty(self):
        labeled = classify(self._sentence("Zzz qqq www."), LexiconClassifier())
        assert labeled.labels == frozenset()
        assert all(score == 0.0 for score in labeled.scores.values())

    def test_threshold_monotonicity(self):
        sentence = self._sentence("Annular muscle groups squeeze the elastic chamber in sequence.")
        low = classify(sentence, LexiconClassifier(), threshold=0.5)
        high = classify(sentence, LexiconClassifier(), threshold=0.9)
        assert high.labels <= low.labels

    def test_scores_cover_all_dimensions_in_unit_interval(self, golden_corpus):
        clf = LexiconClassifier()
        for entry in golden_corpus:
            labeled = classify(self._sentence(entry["text"]), clf)
            assert set(labeled.scores) == set(Dimension)
            assert all(0.0 <= s <= 1.0 for s in labeled.scores.values())

    def test_bad_threshold_rejected(self):
        with pytest.raises(ValueError):
            classify(self._sentence("A swims."), LexiconClassifier(), threshold=1.0)


def _labeled_corpus(n, prefix="s"):
    clf = LexiconClassifier()
    doc = " ".join(f"Sentence number {i} stores elastic energy." for i in range(n))
    return [classify(r, clf) for r in segment(doc, prefix)]


class TestGenerateSamples:
    def test_ratio_8_2(self):
        reviewed = _labeled_corpus(120)
        sample_set = generate_samples(reviewed, 100, 0.8, seed=7, paraphraser=MockLlmClient().paraphrase)
        assert len(sample_set.real) == 80
        assert len(sample_set.augmented) == 20
        assert abs(len(sample_set.real) / 100 - 0.8) <= 1 / 100

    def test_degenerate_ratio_never_calls_paraphraser(self):
        reviewed = _labeled_corpus(10)
        calls = []

        def paraphraser(text):
            calls.append(text)
            return text

        sample_set = generate_samples(reviewed, 10, 1.0, seed=1, paraphraser=paraphraser)
        assert len(sample_set.real) == 10
        assert sample_set.augmented == ()
        assert calls == []

    def test_same_seed_is_bit_reproducible(self):
        reviewed = _labeled_corpus(50)
        a = generate_samples(reviewed, 40, 0.8, seed=99, paraphraser=MockLlmClient().paraphrase)
        b = generate_samples(reviewed, 40, 0.8, seed=99, paraphraser=MockLlmClient().paraphrase)
        assert [s.sentence.id for s in a.real] == [s.sentence.id for s in b.real]
        assert [(x.origin_id, x.paraphrase) for x in a.augmented] == [
            (x.origin_id, x.paraphrase) for x in b.augmented
        ]

    def test_labels_inherited(self):
        reviewed = _labeled_corpus(20)
        sample_set = generate_samples(reviewed, 20, 0.5, seed=3, paraphraser=MockLlmClient().paraphrase)
        by_id = {item.sentence.id: item.labels for item in reviewed}
        for augmented in sample_set.augmented:
            assert augmented.labels == by_id[augmented.origin_id]

    def test_insufficient_corpus(self):
        with pytest.raises(InsufficientCorpusError):
            generate_samples(_labeled_corpus(5), 100, 0.8, seed=1, paraphraser=MockLlmClient().paraphrase)


class TestReviewBatches:
    def test_batching_and_audit_sizes(self):
        labeled = _labeled_corpus(250)
        batches = build_review_batches(labeled, seed=5)
        assert len(batches) == expected_batch_count(250) == 3
        assert [len(b.items) for b in batches] == [100, 100, 50]
        assert [len(b.audit_sample) for b in batches] == [3, 3, 2]
        for batch in batches:
            item_ids = {i.sentence.id for i in batch.items}
            assert set(batch.audit_sample) <= item_ids
            assert batch.status is BatchStatus.OPEN

    def test_min_audit_floor(self):
        batches = build_review_batches(_labeled_corpus(1), seed=5)
        assert len(batches) == 1
        assert len(batches[0].audit_sample) == 1
        assert audit_size(1) == 1

    def test_fail_verdict_marks_dirty(self):
        batches = build_review_batches(_labeled_corpus(10), seed=5)
        batch = batches[0]
        record_verdict(batch, batch.audit_sample[0], Verdict.FAIL)
        assert batch.status is BatchStatus.DIRTY

    def test_all_pass_marks_clean(self):
        batches = build_review_batches(_labeled_corpus(10), seed=5)
        batch = batches[0]
        for item_id in batch.audit_sample:
            record_verdict(batch, item_id, Verdict.PASS)
        assert batch.status is BatchStatus.CLEAN

    def test_verdict_outside_audit_rejected(self):
        batches = build_review_batches(_labeled_corpus(10), seed=5)
        with pytest.raises(ValueError):
            record_verdict(batches[0], "not-an-audit-id", Verdict.PASS)


class TestReviewLoop:
    def test_all_clean_is_fixed_point(self):
        batches = build_review_batches(_labeled_corpus(10), seed=5)
        for item_id in batches[0].audit_sample:
            record_verdict(batches[0], item_id, Verdict.PASS)

        calls = []

        class Spy(LexiconClassifier):
            def score(self, text):
                calls.append(text)
                return super().score(text)

        _, done = review_loop_step(batches, Spy(), seed=5)
        assert done
        assert calls == []

    def test_human_correction_cleans_next_step(self):
        labeled = _labeled_corpus(10)
        batches = build_review_batches(labeled, seed=5)
        batch = batches[0]
        record_verdict(batch, batch.audit_sample[0], Verdict.FAIL)
        assert batch.status is BatchStatus.DIRTY

        corrected = FixedLabelClassifier(
            {item.sentence.text: frozenset({Dimension.FUNCTION}) for item in batch.items}
        )
        old_sample = batch.audit_sample
        _, done = review_loop_step(batches, corrected, seed=5)
        assert batch.status is BatchStatus.CLEAN
        assert done
        assert batch.audit_sample != old_sample  # fresh audit after relabel
        assert all(item.label_source is LabelSource.HUMAN for item in batch.items)

    def test_constant_relabeler_hits_round_guard(self):
        labeled = _labeled_corpus(10)
        batches = build_review_batches(labeled, seed=5)
        batch = batches[0]
        # Standing Fail on an item the machine relabeler will never change.
        record_verdict(batch, batch.audit_sample[0], Verdict.FAIL)
        with pytest.raises(MaxRoundsExceededError) as exc:
            run_review_loop(batches, LexiconClassifier(), seed=5, max_rounds=5)
        assert exc.value.details["dirty"] == [1]

    def test_with_labels_helper_respects_threshold_invariant(self):
        item = _labeled_corpus(1)[0]
        pinned = with_labels(item, frozenset({Dimension.ENVIRONMENT}), LabelSource.HUMAN)
        assert pinned.labels == frozenset({Dimension.ENVIRONMENT})
        assert pinned.scores[Dimension.ENVIRONMENT] == 1.0
        assert pinned.scores[Dimension.FUNCTION] == 0.0
