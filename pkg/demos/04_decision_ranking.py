"""
Decision core: G1 weights, VIKOR ranking, similarity clusters
=============================================================

The designer orders the six indicators and gives adjacent importance
ratios; the G1 recurrence turns that into weights without a consistency
test. VIKOR then ranks alternatives by compromise index Q (ascending) and
applies the acceptable-advantage / acceptable-stability conditions. Top
strategies cluster by weighted token overlap into composite candidates.
"""

from bioinvert import (
    CriteriaSet,
    Criterion,
    DecisionMatrix,
    G1Judgment,
    cluster_top,
    default_criteria,
    g1_weights,
    vikor,
)

# G1: order criteria most to least important; r_k = w_{k-1} / w_k.
judgment = G1Judgment(order=("safety", "cost", "speed"), ratios=(1.2, 1.4))
weights = g1_weights(judgment)
print("G1 weights:", {k: round(v, 4) for k, v in weights.items()})
print("  ratio check: w(safety)/w(cost) =", round(weights["safety"] / weights["cost"], 10))

# VIKOR on a tiny matrix. Alternative a dominates, c is the anti-ideal.
criteria = CriteriaSet((Criterion("safety", "Safety"), Criterion("cost", "Cost tolerance"),
                        Criterion("speed", "Speed")))
matrix = DecisionMatrix(
    alternatives=("a", "b", "c"),
    criteria=criteria,
    scores=((1.0, 0.9, 0.8), (0.6, 0.8, 0.5), (0.2, 0.1, 0.3)),
)
result = vikor(matrix, weights, v=0.5)
print("\nVIKOR:")
for alt in result.ranking:
    print(f"  {alt}: S={result.S[alt]:.4f} R={result.R[alt]:.4f} Q={result.Q[alt]:.4f}")
print("compromise set:", result.compromise_set,
      "| advantage:", result.acceptable_advantage,
      "| stability:", result.acceptable_stability,
      "| DQ:", result.dq)

# The shipped default criteria set: four content-scored indicators plus two
# designer-scored ones (reliability, economic tolerance).
print("\ndefault indicators:")
for criterion in default_criteria():
    print(f"  {criterion.id:28s} {criterion.scoring.value}")

# Clustering the ranked golden frames: near-duplicates merge, strategies
# with disjoint vocabulary stay apart.
import json  # noqa: E402
from importlib import resources  # noqa: E402

from bioinvert import parse_frame  # noqa: E402

frames = {}
for name in ("tail-swing", "jet-propulsion", "crawling"):
    raw = resources.files("bioinvert.fixtures").joinpath(f"frames/{name}.json").read_text("utf-8")
    frame = parse_frame(json.loads(raw))
    frames[frame.id] = frame
ids = tuple(frames)
fake_ranking = vikor(
    DecisionMatrix(
        alternatives=ids,
        criteria=CriteriaSet((Criterion("x", "x"),)),
        scores=tuple((float(i),) for i in range(len(ids))),
    ),
    {"x": 1.0},
)
report = cluster_top(fake_ranking, frames, k=len(ids), threshold=0.5)
print("\nclusters at threshold 0.5:", [list(c) for c in report.clusters])
print("pairwise similarity row 0:", [round(x, 3) for x in report.similarity[0]])
