"""
Knowledge frames: build, validate, compose, serialize
=====================================================

A strategy frame packs one behavior, a list of functions, a list of
characteristics, and an optional environment into a single record. This
script builds one by hand, shows what validation catches, composes a frame
from elementary fragments, and round-trips it through the document format.
"""

import json

from bioinvert import (
    ActionDescription,
    Behavior,
    Characteristic,
    ElementaryStrategy,
    EnvironmentDesc,
    FrameFragment,
    Provenance,
    StateTransition,
    StrategyFrame,
    compose,
    parse_frame,
    serialize_frame,
    validate_frame,
)

# A small frame: a jet-propulsion sketch. Function phrases are stored in
# gerund form ("providing ...", "shrinking ...").
frame = StrategyFrame(
    id="sketch-jet",
    behavior=Behavior("Provide underwater thrust"),
    functions=(
        ActionDescription("ejecting", "water through a nozzle"),
        StateTransition(object="elastic chamber", change_verb="shrinking"),
    ),
    characteristics=(
        Characteristic("chamber", ("elastic",)),
        Characteristic("nozzle", ("rigid-support",)),
    ),
    environment=EnvironmentDesc("water", ("open",)),
    provenance=Provenance(source_doc="sketchbook"),
)

print("validation of a clean frame:", validate_frame(frame))

# Now break it: drop the characteristics and de-gerund a function.
broken = StrategyFrame(
    id="sketch-broken",
    behavior=frame.behavior,
    functions=(ActionDescription("eject", "water"),),
    characteristics=(),
    provenance=Provenance(),
)
for issue in validate_frame(broken):
    print(f"  violation {issue.code:22s} at {issue.path}: {issue.message}")

# Frames compose from elementary strategies: slot-wise union with duplicate
# phrases removed. The environment comes from the first part that has one;
# two different environments raise CONFLICTING_ENVIRONMENT.
part_a = ElementaryStrategy(
    id="S_e^1",
    sentences=("doc:0001",),
    frame_fragment=FrameFragment(
        behavior=Behavior("Provide underwater thrust"),
        functions=(ActionDescription("ejecting", "water through a nozzle"),),
        characteristics=(Characteristic("chamber", ("elastic",)),),
    ),
)
part_b = ElementaryStrategy(
    id="S_e^2",
    sentences=("doc:0002",),
    frame_fragment=FrameFragment(
        functions=(
            ActionDescription("ejecting", "water through a nozzle"),  # duplicate, unioned away
            ActionDescription("recovering", "shape by elastic energy"),
        ),
        characteristics=(Characteristic("nozzle", ("rigid-support",)),),
    ),
)
composed = compose([part_a, part_b])
print("\ncomposed id:", composed.id)
print("composed functions:", composed.function_phrases())
print("composed provenance:", composed.provenance.elementary_ids)

# The document format is plain JSON with a schema version key; unknown
# fields are rejected with their path.
document = serialize_frame(composed)
print("\nserialized keys:", sorted(document))
assert parse_frame(document) == composed
print("roundtrip: OK")

print("\nfull document:")
print(json.dumps(document, indent=2)[:400], "...")
