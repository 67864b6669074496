"""Corpus pipeline: segmentation, multi-label classification, sample
generation, and the batch-of-100 / 3%-audit review procedure.

All randomized steps take an explicit seed and are bit-reproducible for a
fixed (seed, input) pair; per-purpose RNG streams are derived from string
seeds so independent steps never share state.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field, replace
from typing import Callable, Protocol

from .errors import EmptyDocumentError, InsufficientCorpusError, MaxRoundsExceededError
from .frames import Dimension

BATCH_SIZE = 100
AUDIT_FRACTION = 0.03
DEFAULT_THRESHOLD = 0.5


class LabelSource(enum.Enum):
    LEXICON = "Lexicon"
    LLM = "LLM"
    HUMAN = "Human"


class Verdict(enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"


class BatchStatus(enum.Enum):
    OPEN = "Open"
    CLEAN = "Clean"
    DIRTY = "Dirty"


@dataclass(frozen=True)
class SentenceRecord:
    id: str
    doc_id: str
    text: str
    span: tuple[int, int]


@dataclass(frozen=True)
class LabeledSentence:
    sentence: SentenceRecord
    scores: dict[Dimension, float]
    labels: frozenset[Dimension]
    label_source: LabelSource

    def __post_init__(self):
        assert set(self.scores) == set(Dimension), "scores must cover all four dimensions"


@dataclass(frozen=True)
class AugmentedSample:
    origin_id: str
    paraphrase: str
    labels: frozenset[Dimension]


@dataclass(frozen=True)
class SampleSet:
    real: tuple[LabeledSentence, ...]
    augmented: tuple[AugmentedSample, ...]
    target_size: int
    ratio_real: float


@dataclass
class ReviewBatch:
    batch_no: int
    items: list[LabeledSentence]
    audit_sample: tuple[str, ...]
    verdicts: dict[str, Verdict] = field(default_factory=dict)
    status: BatchStatus = BatchStatus.OPEN
    rounds: int = 0


class Classifier(Protocol):
    """Scores one sentence on all four dimensions; must be thread-safe."""

    source: LabelSource

    def score(self, text: str) -> dict[Dimension, float]: ...


# ---------------------------------------------------------------------------
# Segmentation
# ---------------------------------------------------------------------------

_TERMINALS = ".!?。！？"
_OPEN_BRACKETS = "([{（【"
_CLOSE_BRACKETS = ")]}）】"
_TRAILING_QUOTES = "\"'”’"


def segment(document: str, doc_id: str) -> list[SentenceRecord]:
    """Split on sentence-terminal punctuation outside bracketed spans.

    Spans cover every non-whitespace character: joining the span slices with
    the inter-span whitespace reproduces the document exactly.
    """
    if not document.strip():
        raise EmptyDocumentError(f"document {doc_id!r} is empty")

    records: list[SentenceRecord] = []
    n = len(document)
    pos = 0

    def emit(start: int, end: int) -> None:
        text = document[start:end]
        if text.strip():
            records.append(
                SentenceRecord(
                    id=f"{doc_id}:{len(records):04d}", doc_id=doc_id, text=text, span=(start, end)
                )
            )

    while pos < n:
        while pos < n and document[pos].isspace():
            pos += 1
        if pos >= n:
            break
        start = pos
        depth = 0
        end = None
        while pos < n:
            ch = document[pos]
            if ch in _OPEN_BRACKETS:
                depth += 1
            elif ch in _CLOSE_BRACKETS and depth > 0:
                depth -= 1
            elif ch in _TERMINALS and depth == 0:
                pos += 1
                while pos < n and document[pos] in _TERMINALS + _TRAILING_QUOTES:
                    pos += 1
                end = pos
                break
            pos += 1
        if end is None:
            # Unterminated tail: trim trailing whitespace out of the span.
            end = n
            while end > start and document[end - 1].isspace():
                end -= 1
        emit(start, end)
    return records


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def classify(sentence: SentenceRecord, classifier: Classifier, threshold: float = DEFAULT_THRESHOLD) -> LabeledSentence:
    """Score all four dimensions and threshold into the label set."""
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    scores = classifier.score(sentence.text)
    labels = frozenset(d for d in Dimension if scores[d] >= threshold)
    return LabeledSentence(sentence=sentence, scores=scores, labels=labels, label_source=classifier.source)


def relabel(item: LabeledSentence, classifier: Classifier, threshold: float = DEFAULT_THRESHOLD) -> LabeledSentence:
    return classify(item.sentence, classifier, threshold)


# ---------------------------------------------------------------------------
# Sample generation (8:2 real/augmented by default at call sites)
# ---------------------------------------------------------------------------


def generate_samples(
    reviewed: list[LabeledSentence],
    target_size: int,
    ratio_real: float,
    seed: int,
    paraphraser: Callable[[str], str],
) -> SampleSet:
    """Draw real samples without replacement, paraphrase the remainder.

    Augmented samples inherit the reviewed labels of their origin; no
    negative samples are created. Fully reproducible for a fixed seed.
    """
    if not 0.0 <= ratio_real <= 1.0:
        raise ValueError(f"ratio_real must be in [0, 1], got {ratio_real}")
    n_real = round(target_size * ratio_real)
    if len(reviewed) < n_real:
        raise InsufficientCorpusError(
            f"need {n_real} reviewed sentences, have {len(reviewed)}"
        )
    rng = random.Random(f"{seed}:samples")
    real = tuple(rng.sample(reviewed, n_real))
    augmented = []
    for _ in range(target_size - n_real):
        origin = rng.choice(reviewed)
        augmented.append(
            AugmentedSample(
                origin_id=origin.sentence.id,
                paraphrase=paraphraser(origin.sentence.text),
                labels=origin.labels,
            )
        )
    return SampleSet(real=real, augmented=tuple(augmented), target_size=target_size, ratio_real=ratio_real)


# ---------------------------------------------------------------------------
# Review batches
# ---------------------------------------------------------------------------


def audit_size(n_items: int) -> int:
    return max(1, round(AUDIT_FRACTION * n_items))


def _draw_audit(items: list[LabeledSentence], seed: int, batch_no: int, round_no: int,
                avoid: tuple[str, ...] = ()) -> tuple[str, ...]:
    ids = [item.sentence.id for item in items]
    k = audit_size(len(ids))
    rng = random.Random(f"{seed}:audit:{batch_no}:{round_no}")
    sample = tuple(sorted(rng.sample(ids, k)))
    # Re-audits must not reuse the previous sample when an alternative exists.
    attempts = 0
    while avoid and sample == avoid and k < len(ids) and attempts < 100:
        sample = tuple(sorted(rng.sample(ids, k)))
        attempts += 1
    return sample


def build_review_batches(labeled: list[LabeledSentence], seed: int) -> list[ReviewBatch]:
    """Consecutive batches of 100 (last may be short), each with a seeded
    audit sample of max(1, round(3% of batch size)) items."""
    if not labeled:
        raise ValueError("labeled sentences must be non-empty")
    batches = []
    for i in range(0, len(labeled), BATCH_SIZE):
        items = list(labeled[i : i + BATCH_SIZE])
        batch_no = i // BATCH_SIZE + 1
        batches.append(
            ReviewBatch(
                batch_no=batch_no,
                items=items,
                audit_sample=_draw_audit(items, seed, batch_no, 0),
            )
        )
    return batches


def record_verdict(batch: ReviewBatch, item_id: str, verdict: Verdict) -> ReviewBatch:
    if item_id not in batch.audit_sample:
        raise ValueError(f"{item_id!r} is not in the audit sample of batch {batch.batch_no}")
    batch.verdicts[item_id] = verdict
    batch.status = _batch_status(batch)
    return batch


def _batch_status(batch: ReviewBatch) -> BatchStatus:
    audited = [batch.verdicts.get(i) for i in batch.audit_sample]
    if any(v == Verdict.FAIL for v in audited):
        return BatchStatus.DIRTY
    if all(v == Verdict.PASS for v in audited):
        return BatchStatus.CLEAN
    return BatchStatus.OPEN


def review_loop_step(
    batches: list[ReviewBatch],
    relabeler: Classifier,
    seed: int,
    threshold: float = DEFAULT_THRESHOLD,
) -> tuple[list[ReviewBatch], bool]:
    """One review round: relabel Dirty batches in full and re-audit them.

    A verdict is tied to the labeling it judged: when relabeling changes an
    item's labels, its standing verdict is dropped. A relabeler acting as the
    human expert (label_source Human) counts as having just reviewed every
    item it touched, so those items are marked Pass; machine relabelers leave
    fresh audit items unverdicted (batch goes back to Open for human review).
    Returns the batches and a flag that is true iff every batch is Clean.
    """
    for batch in batches:
        if batch.status is not BatchStatus.DIRTY:
            continue
        new_items = []
        for item in batch.items:
            updated = relabel(item, relabeler, threshold)
            if updated.labels != item.labels:
                batch.verdicts.pop(item.sentence.id, None)
            if relabeler.source is LabelSource.HUMAN:
                batch.verdicts[item.sentence.id] = Verdict.PASS
            new_items.append(updated)
        batch.items = new_items
        batch.rounds += 1
        batch.audit_sample = _draw_audit(
            batch.items, seed, batch.batch_no, batch.rounds, avoid=batch.audit_sample
        )
        batch.verdicts = {
            k: v for k, v in batch.verdicts.items() if k in {i.sentence.id for i in batch.items}
        }
        batch.status = _batch_status(batch)
    return batches, all(b.status is BatchStatus.CLEAN for b in batches)


def run_review_loop(
    batches: list[ReviewBatch],
    relabeler: Classifier,
    seed: int,
    max_rounds: int = 10,
    threshold: float = DEFAULT_THRESHOLD,
) -> tuple[list[ReviewBatch], int]:
    """Iterate review steps to the all-Clean fixed point, with a guard."""
    for round_no in range(1, max_rounds + 1):
        batches, done = review_loop_step(batches, relabeler, seed, threshold)
        if done:
            return batches, round_no
    raise MaxRoundsExceededError(
        f"review loop did not converge within {max_rounds} rounds",
        dirty=[b.batch_no for b in batches if b.status is not BatchStatus.CLEAN],
    )


def expected_batch_count(n_sentences: int) -> int:
    return math.ceil(n_sentences / BATCH_SIZE)


# ---------------------------------------------------------------------------
# Line-delimited record formats (External Interfaces)
# ---------------------------------------------------------------------------


def labeled_to_record(item: LabeledSentence) -> dict:
    return {
        "id": item.sentence.id,
        "text": item.sentence.text,
        "labels": sorted(d.value for d in item.labels),
        "scores": {d.value: item.scores[d] for d in Dimension},
        "source": item.label_source.value,
        "doc_id": item.sentence.doc_id,
        "span": list(item.sentence.span),
    }


def labeled_from_record(record: dict) -> LabeledSentence:
    sentence = SentenceRecord(
        id=record["id"],
        doc_id=record.get("doc_id", ""),
        text=record["text"],
        span=tuple(record.get("span", (0, len(record["text"])))),
    )
    scores = {d: float(record["scores"][d.value]) for d in Dimension}
    return LabeledSentence(
        sentence=sentence,
        scores=scores,
        labels=frozenset(Dimension(v) for v in record["labels"]),
        label_source=LabelSource(record["source"]),
    )


def with_labels(item: LabeledSentence, labels: frozenset[Dimension], source: LabelSource) -> LabeledSentence:
    """Helper for human corrections: pin labels and adjust scores to match."""
    scores = {d: (1.0 if d in labels else 0.0) for d in Dimension}
    return replace(item, scores=scores, labels=labels, label_source=source)


def write_labeled_jsonl(items: list[LabeledSentence]) -> str:
    """Line-delimited labeled export, one record per sentence."""
    import json

    return "".join(json.dumps(labeled_to_record(i), sort_keys=True, ensure_ascii=False) + "\n" for i in items)


def read_labeled_jsonl(text: str) -> list[LabeledSentence]:
    import json

    return [labeled_from_record(json.loads(line)) for line in text.splitlines() if line.strip()]
