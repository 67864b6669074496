"""
Corpus pipeline: segment, label, batch, review, sample
======================================================

Sentences are segmented on terminal punctuation (bracketed spans are
protected), labeled on the four dimensions by the lexicon baseline, grouped
into review batches of 100 with a 3% audit sample, and expanded into a
training sample set at a fixed real/augmented ratio.
"""

from importlib import resources

from bioinvert import (
    LexiconClassifier,
    MockLlmClient,
    Verdict,
    build_review_batches,
    classify,
    generate_samples,
    segment,
)
from bioinvert.corpus import record_verdict

text = resources.files("bioinvert.fixtures").joinpath("demo-corpus/squid.txt").read_text("utf-8")

records = segment(text, "squid")
print(f"segmented {len(records)} sentences; the bracket rule keeps e.g. '(approx. 63%)' together")
for r in records[:3]:
    print("  ", r.id, "->", " ".join(r.text.split())[:70])

# Multi-label scores: any subset of {Function, Behavior, Characteristic,
# Environment}; a score >= threshold puts the dimension in the label set.
classifier = LexiconClassifier()
labeled = [classify(r, classifier, threshold=0.5) for r in records]
for item in labeled:
    names = sorted(d.value for d in item.labels)
    print(f"  {item.sentence.id}: {names}")

# Review batches: 100 per batch, audit = max(1, round(3%)). Recording a
# Fail verdict marks the batch Dirty; all-Pass marks it Clean.
batches = build_review_batches(labeled, seed=42)
batch = batches[0]
print(f"\nbatch {batch.batch_no}: {len(batch.items)} items, audit sample {list(batch.audit_sample)}")
record_verdict(batch, batch.audit_sample[0], Verdict.PASS)
print("status after one Pass:", batch.status.value)

# Sample generation: real samples drawn without replacement, the remainder
# paraphrased by the (mock) completion backend with labels copied over.
samples = generate_samples(labeled, target_size=5, ratio_real=0.8, seed=42,
                           paraphraser=MockLlmClient().paraphrase)
print(f"\nsample set: {len(samples.real)} real + {len(samples.augmented)} augmented")
for augmented in samples.augmented[:2]:
    print("  paraphrase of", augmented.origin_id, "->", " ".join(augmented.paraphrase.split())[:70])
