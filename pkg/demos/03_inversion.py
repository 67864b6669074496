"""
Strategy inversion: frames from text, then engineering vocabulary
=================================================================

Labeled sentences become a knowledge frame (functions classified into
action / flow / state variants, behavior steps in source order,
characteristics as head + attributives). The inversion transform then
replaces biological nouns with engineering nouns (longest match first,
whole words), runs logical correction against the knowledge base, and
lists every biological noun it could not resolve.
"""

from importlib import resources

from bioinvert import (
    LlmClassifier,
    MockLlmClient,
    build_frame,
    classify,
    demo_kb,
    gerundize,
    invert,
    segment,
    validate_frame,
)

# Gerund normalization is a rule table over a closed verb lexicon.
for phrase in ("generate directional flow", "driving flexible structure", "shrink driver"):
    print(f"  gerundize({phrase!r}) -> {gerundize(phrase)!r}")

# Build a frame from the squid document, labeling with the mock backend.
text = resources.files("bioinvert.fixtures").joinpath("demo-corpus/squid.txt").read_text("utf-8")
classifier = LlmClassifier(MockLlmClient())
labeled = [classify(r, classifier) for r in segment(text, "squid")]
frame = build_frame(labeled)

print("\nbehavior summary:", frame.behavior.summary)
print("functions:")
for phrase in frame.function_phrases():
    print("  -", phrase)
print("characteristics:", frame.characteristic_phrases())
print("validates:", validate_frame(frame) == [])

# Invert with the shipped soft-robotics knowledge base. Substitutions are
# recorded per slot; unresolved biological nouns are listed, never kept
# silently.
kb = demo_kb()
result = invert(frame, kb, corrector=MockLlmClient())
print("\nsubstitutions:")
for s in result.substitutions:
    print(f"  {s.slot}: {s.bio_term} -> {s.eng_term}")
print("corrections:", [(c.slot, c.before, c.after) for c in result.corrections])
print("unresolved bio nouns:", list(result.unresolved))
print("engineering frame characteristics:", result.engineering_frame.characteristic_phrases())
