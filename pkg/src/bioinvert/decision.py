"""Hybrid multi-criteria decision core: ordinal (G1) weighting, VIKOR
compromise ranking, auto-scoring of screened strategies, and similarity
clustering of the top-ranked strategies into composite candidates.

VIKOR follows the standard ideal-point formulation: per-criterion regret
d_ij = w_j (f*_j - f_ij) / (f*_j - f-_j) with cost criteria flipped, group
utility S_i = sum_j d_ij, individual regret R_i = max_j d_ij, and compromise
index Q_i = v (S_i - S*)/(S- - S*) + (1 - v)(R_i - R*)/(R- - R*). Degenerate
criteria (f*_j == f-_j) contribute zero regret and are reported as warnings,
not errors: screened shortlists often tie on a criterion and the method must
still rank.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadRatioError,
    KOutOfRangeError,
    LengthMismatchError,
    MissingManualScoreError,
    NoAlternativesError,
    NoDiscriminationError,
)
from .frames import DesignProblem, ElementaryStrategy, EnvironmentDesc, FrameFragment, StrategyFrame, compose
from .gerund import gerund_of
from .inversion import InversionResult, _base_verb_index
from .text import content_tokens, contains_whole_word, jaccard

RATIO_MIN = 1.0
RATIO_MAX = 1.8
DEFAULT_V = 0.5


class Direction(enum.Enum):
    BENEFIT = "Benefit"
    COST = "Cost"


class Scoring(enum.Enum):
    AUTO = "Auto"
    MANUAL = "Manual"


@dataclass(frozen=True)
class Criterion:
    id: str
    name: str
    direction: Direction = Direction.BENEFIT
    scoring: Scoring = Scoring.AUTO


@dataclass(frozen=True)
class CriteriaSet:
    criteria: tuple[Criterion, ...]

    def __post_init__(self):
        ids = [c.id for c in self.criteria]
        if len(set(ids)) != len(ids):
            raise ValueError("criterion ids must be unique")

    def ids(self) -> list[str]:
        return [c.id for c in self.criteria]

    def __iter__(self):
        return iter(self.criteria)

    def __len__(self):
        return len(self.criteria)


def default_criteria() -> CriteriaSet:
    """The six decision indicators; all benefit-direction.

    Reliability and economic tolerance are designer-scored; the other four
    are computed from the strategy content.
    """
    return CriteriaSet(
        (
            Criterion("functional_compliance", "Functional compliance", Direction.BENEFIT, Scoring.AUTO),
            Criterion("behavioral_alignment", "Behavioral alignment", Direction.BENEFIT, Scoring.AUTO),
            Criterion("characteristic_consistency", "Characteristic consistency", Direction.BENEFIT, Scoring.AUTO),
            Criterion("environmental_migration", "Environmental migration potential", Direction.BENEFIT, Scoring.AUTO),
            Criterion("reliability", "Reliability", Direction.BENEFIT, Scoring.MANUAL),
            Criterion("economic_tolerance", "Economic tolerance", Direction.BENEFIT, Scoring.MANUAL),
        )
    )


# ---------------------------------------------------------------------------
# G1 ordinal weighting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class G1Judgment:
    """Criteria ordered most to least important, plus adjacent importance
    ratios r_k = w_{k-1} / w_k for k = 2..m."""

    order: tuple[str, ...]
    ratios: tuple[float, ...]


def g1_weights(judgment: G1Judgment) -> dict[str, float]:
    """Order-relation recurrence: w_m = (1 + sum_k prod_{j>=k} r_j)^-1,
    then w_{k-1} = r_k w_k. No consistency test is required.

    The returned dict preserves the judgment order, so values are
    nonincreasing along it; ratios are recovered exactly.
    """
    m = len(judgment.order)
    if m == 0:
        raise LengthMismatchError("judgment order is empty")
    if len(judgment.ratios) != m - 1:
        raise LengthMismatchError(
            f"expected {m - 1} ratios for {m} criteria, got {len(judgment.ratios)}"
        )
    for r in judgment.ratios:
        if not (RATIO_MIN <= r <= RATIO_MAX):
            raise BadRatioError(f"ratio {r} outside [{RATIO_MIN}, {RATIO_MAX}]")

    # suffix_products[k] = prod_{j=k..m} r_j with ratios indexed from k=2.
    total = 1.0
    product = 1.0
    for r in reversed(judgment.ratios):
        product *= r
        total += product
    w_last = 1.0 / total
    weights = [w_last]
    for r in reversed(judgment.ratios):
        weights.append(r * weights[-1])
    weights.reverse()
    return dict(zip(judgment.order, weights))


# ---------------------------------------------------------------------------
# VIKOR
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecisionMatrix:
    alternatives: tuple[str, ...]
    criteria: CriteriaSet
    scores: tuple[tuple[float, ...], ...]  # row per alternative

    def __post_init__(self):
        if not self.alternatives:
            raise NoAlternativesError("decision matrix has no alternatives")
        if len(set(self.alternatives)) != len(self.alternatives):
            raise ValueError("alternative ids must be unique")
        n_crit = len(self.criteria)
        for alt, row in zip(self.alternatives, self.scores):
            if len(row) != n_crit:
                raise ValueError(f"row for {alt!r} has {len(row)} cells, expected {n_crit}")
            if any(x != x for x in row):  # NaN check
                raise ValueError(f"row for {alt!r} has missing cells")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.scores, dtype=float)


@dataclass(frozen=True)
class VikorResult:
    alternatives: tuple[str, ...]
    S: dict[str, float]
    R: dict[str, float]
    Q: dict[str, float]
    v: float
    ranking: tuple[str, ...]
    compromise_set: tuple[str, ...]
    acceptable_advantage: bool | None
    acceptable_stability: bool | None
    dq: float | None
    warnings: tuple[str, ...] = ()

    def to_report(self) -> dict:
        return {
            "alternatives": list(self.alternatives),
            "S": self.S,
            "R": self.R,
            "Q": self.Q,
            "v": self.v,
            "ranking": list(self.ranking),
            "compromise_set": list(self.compromise_set),
            "conditions": {
                "acceptable_advantage": self.acceptable_advantage,
                "acceptable_stability": self.acceptable_stability,
                "dq": self.dq,
            },
            "warnings": list(self.warnings),
        }


_EPS = 1e-12


def vikor(matrix: DecisionMatrix, weights: dict[str, float], v: float = DEFAULT_V) -> VikorResult:
    """Compromise ranking by Q ascending, ties broken by S, then R, then id.

    The compromise set applies the two standard acceptance conditions:
    acceptable advantage Q(2nd) - Q(1st) >= DQ = 1/(n-1), and acceptable
    stability (the Q-winner also leads by S or by R). When advantage fails
    the set extends to every alternative with Q - Q(1st) < DQ; when only
    stability fails it is {1st, 2nd}.
    """
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"v must be in [0, 1], got {v}")
    ids = matrix.criteria.ids()
    missing = [c for c in ids if c not in weights]
    if missing:
        raise LengthMismatchError(f"weights missing criteria: {', '.join(missing)}")

    alts = matrix.alternatives
    f = matrix.as_array()
    w = np.array([weights[c] for c in ids], dtype=float)
    benefit = np.array([c.direction is Direction.BENEFIT for c in matrix.criteria], dtype=bool)

    f_star = np.where(benefit, f.max(axis=0), f.min(axis=0))
    f_minus = np.where(benefit, f.min(axis=0), f.max(axis=0))
    spread = f_star - f_minus
    degenerate = spread == 0.0

    warnings = [f"DEGENERATE_CRITERION:{ids[j]}" for j in range(len(ids)) if degenerate[j]]

    if len(alts) == 1:
        only = alts[0]
        return VikorResult(
            alternatives=alts,
            S={only: 0.0},
            R={only: 0.0},
            Q={only: 0.0},
            v=v,
            ranking=(only,),
            compromise_set=(only,),
            acceptable_advantage=None,
            acceptable_stability=None,
            dq=None,
            warnings=tuple(warnings) + ("SINGLE_ALTERNATIVE",),
        )
    if degenerate.all():
        raise NoDiscriminationError("every criterion is degenerate (f* == f-)")

    safe_spread = np.where(degenerate, 1.0, spread)
    d = w * (f_star - f) / safe_spread
    d[:, degenerate] = 0.0

    S = d.sum(axis=1)
    R = d.max(axis=1)

    # Ranges below _EPS count as degenerate: S and R live in [0, 1], and a
    # mathematically tied vector can pick up 1-ulp noise that the range
    # normalization would otherwise amplify to full scale.
    s_star, s_minus = S.min(), S.max()
    r_star, r_minus = R.min(), R.max()
    if s_minus - s_star <= _EPS:
        s_term = np.zeros(len(alts))
        warnings.append("DEGENERATE_S_RANGE")
    else:
        s_term = v * (S - s_star) / (s_minus - s_star)
    if r_minus - r_star <= _EPS:
        r_term = np.zeros(len(alts))
        warnings.append("DEGENERATE_R_RANGE")
    else:
        r_term = (1.0 - v) * (R - r_star) / (r_minus - r_star)
    Q = s_term + r_term

    order = sorted(range(len(alts)), key=lambda i: (Q[i], S[i], R[i], alts[i]))
    ranking = tuple(alts[i] for i in order)

    dq = 1.0 / (len(alts) - 1)
    first, second = order[0], order[1]
    advantage = Q[second] - Q[first] >= dq - _EPS
    stability = (S[first] <= s_star + _EPS) or (R[first] <= r_star + _EPS)
    if advantage and stability:
        compromise = (alts[first],)
    elif not advantage:
        compromise = tuple(alts[i] for i in order if Q[i] - Q[first] < dq - _EPS)
    else:
        compromise = (alts[first], alts[second])

    return VikorResult(
        alternatives=alts,
        S={a: float(S[i]) for i, a in enumerate(alts)},
        R={a: float(R[i]) for i, a in enumerate(alts)},
        Q={a: float(Q[i]) for i, a in enumerate(alts)},
        v=v,
        ranking=ranking,
        compromise_set=compromise,
        acceptable_advantage=bool(advantage),
        acceptable_stability=bool(stability),
        dq=dq,
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# Auto-scored criteria
# ---------------------------------------------------------------------------


def _verb_set(texts: list[str]) -> set[str]:
    index = _base_verb_index()
    verbs = set()
    for text in texts:
        for tok in content_tokens(text):
            base = index.get(tok)
            if base is not None:
                verbs.add(gerund_of(base))
    return verbs


def score_auto_criteria(
    result: InversionResult,
    problem: DesignProblem,
    target_env: EnvironmentDesc | None = None,
) -> dict[str, float]:
    """The four content-derived scores, each in [0, 1].

    Functional compliance: token-set overlap between the requirement
    elements and the frame's function phrases. Behavioral alignment: overlap
    between requirement verbs and behavior-step verbs (gerund-folded).
    Characteristic consistency: fraction of characteristics free of
    unresolved biological nouns. Environmental migration: overlap between
    the frame environment and the target environment, 1.0 when the frame is
    environment-unconstrained.
    """
    frame = result.engineering_frame
    req_tokens: set[str] = set()
    for element in problem.requirement_elements:
        req_tokens |= content_tokens(element)
    fn_tokens: set[str] = set()
    for phrase in frame.function_phrases():
        fn_tokens |= content_tokens(phrase)
    functional = jaccard(req_tokens, fn_tokens)

    req_verbs = _verb_set(list(problem.requirement_elements))
    step_verbs = _verb_set([s.phrase() for s in frame.behavior.steps] + [frame.behavior.summary])
    behavioral = jaccard(req_verbs, step_verbs)

    chars = frame.characteristic_phrases()
    if chars:
        clean = sum(
            1 for phrase in chars if not any(contains_whole_word(phrase, t) for t in result.unresolved)
        )
        consistency = clean / len(chars)
    else:
        consistency = 0.0

    if frame.environment is None or target_env is None:
        migration = 1.0
    else:
        migration = jaccard(
            content_tokens(frame.environment.phrase()), content_tokens(target_env.phrase())
        )

    return {
        "functional_compliance": functional,
        "behavioral_alignment": behavioral,
        "characteristic_consistency": consistency,
        "environmental_migration": migration,
    }


@dataclass(frozen=True)
class DecisionRun:
    """Full audit trail of one ranking: matrix, weights, and the result."""

    matrix: DecisionMatrix
    weights: dict[str, float]
    result: VikorResult
    judgment: G1Judgment
    v: float

    def to_report(self) -> dict:
        return {
            "matrix": {
                "alternatives": list(self.matrix.alternatives),
                "criteria": self.matrix.criteria.ids(),
                "scores": [list(row) for row in self.matrix.scores],
            },
            "weights": self.weights,
            "judgment": {"order": list(self.judgment.order), "ratios": list(self.judgment.ratios)},
            "v": self.v,
            "vikor": self.result.to_report(),
        }


def rank_strategies(
    kept: list[InversionResult],
    judgment: G1Judgment,
    manual_scores: dict[str, dict[str, float]],
    problem: DesignProblem,
    target_env: EnvironmentDesc | None = None,
    v: float = DEFAULT_V,
    criteria: CriteriaSet | None = None,
) -> DecisionRun:
    """Score, weight, and rank the screened strategies, keeping the trail."""
    if not kept:
        raise NoAlternativesError("no strategies survived screening")
    criteria = criteria or default_criteria()
    if set(judgment.order) != set(criteria.ids()):
        raise LengthMismatchError("judgment order must be a permutation of the criteria ids")

    rows = []
    for result in kept:
        auto = score_auto_criteria(result, problem, target_env)
        row = []
        for criterion in criteria:
            if criterion.scoring is Scoring.AUTO:
                row.append(auto[criterion.id])
            else:
                supplied = manual_scores.get(result.id, {})
                if criterion.id not in supplied:
                    raise MissingManualScoreError(result.id, criterion.id)
                row.append(float(supplied[criterion.id]))
        rows.append(tuple(row))

    matrix = DecisionMatrix(
        alternatives=tuple(r.id for r in kept), criteria=criteria, scores=tuple(rows)
    )
    weights = g1_weights(judgment)
    result = vikor(matrix, weights, v)
    return DecisionRun(matrix=matrix, weights=weights, result=result, judgment=judgment, v=v)


# ---------------------------------------------------------------------------
# Similarity clustering of top strategies
# ---------------------------------------------------------------------------

_SIMILARITY_WEIGHTS = (0.4, 0.3, 0.3)  # functions, behavior, characteristics


def frame_similarity(a: StrategyFrame, b: StrategyFrame) -> float:
    """Weighted token-set overlap over functions, behavior, characteristics."""
    w_f, w_b, w_c = _SIMILARITY_WEIGHTS

    def tokens(phrases: list[str]) -> set[str]:
        out: set[str] = set()
        for p in phrases:
            out |= content_tokens(p)
        return out

    fn = jaccard(tokens(a.function_phrases()), tokens(b.function_phrases()))
    beh = jaccard(
        tokens([a.behavior.summary] + [s.phrase() for s in a.behavior.steps]),
        tokens([b.behavior.summary] + [s.phrase() for s in b.behavior.steps]),
    )
    ch = jaccard(tokens(a.characteristic_phrases()), tokens(b.characteristic_phrases()))
    return w_f * fn + w_b * beh + w_c * ch


@dataclass(frozen=True)
class ClusterReport:
    members: tuple[str, ...]
    clusters: tuple[tuple[str, ...], ...]
    similarity: tuple[tuple[float, ...], ...]
    threshold: float
    composites: tuple[StrategyFrame, ...] = ()
    conflicts: tuple[str, ...] = ()

    def to_report(self) -> dict:
        from .frames import serialize_frame

        return {
            "members": list(self.members),
            "clusters": [list(c) for c in self.clusters],
            "similarity": [list(row) for row in self.similarity],
            "threshold": self.threshold,
            "composites": [serialize_frame(f) for f in self.composites],
            "conflicts": list(self.conflicts),
        }


def cluster_top(
    result: VikorResult,
    frames: dict[str, StrategyFrame],
    k: int,
    threshold: float,
) -> ClusterReport:
    """Average-linkage agglomerative merge of the top-k ranked strategies.

    Merging continues while the best cluster-pair average similarity is at
    least the threshold. Clusters with two or more members become composite
    candidates via the frame composition operator; environment conflicts are
    reported instead of composed.
    """
    if not 1 <= k <= len(result.ranking):
        raise KOutOfRangeError(f"k={k} outside [1, {len(result.ranking)}]")
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")

    members = result.ranking[:k]
    n = len(members)
    sim = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                sim[i][j] = 1.0
            elif j > i:
                sim[i][j] = frame_similarity(frames[members[i]], frames[members[j]])
            else:
                sim[i][j] = sim[j][i]

    clusters: list[list[int]] = [[i] for i in range(n)]

    def average(a: list[int], b: list[int]) -> float:
        return sum(sim[i][j] for i in a for j in b) / (len(a) * len(b))

    while len(clusters) > 1:
        best = None
        best_sim = -1.0
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                s = average(clusters[i], clusters[j])
                if s > best_sim + _EPS:
                    best_sim = s
                    best = (i, j)
        if best is None or best_sim < threshold:
            break
        i, j = best
        clusters[i] = clusters[i] + clusters[j]
        del clusters[j]

    cluster_ids = tuple(tuple(members[i] for i in sorted(c)) for c in clusters)

    composites: list[StrategyFrame] = []
    conflicts: list[str] = []
    for group in cluster_ids:
        if len(group) < 2:
            continue
        parts = [
            ElementaryStrategy(
                id=fid,
                frame_fragment=FrameFragment(
                    behavior=frames[fid].behavior,
                    functions=frames[fid].functions,
                    characteristics=frames[fid].characteristics,
                    environment=frames[fid].environment,
                ),
            )
            for fid in group
        ]
        try:
            composites.append(compose(parts, frame_id="composite:" + "+".join(group)))
        except Exception as exc:  # CONFLICTING_ENVIRONMENT: designer resolves
            conflicts.append(f"{'+'.join(group)}: {exc}")

    return ClusterReport(
        members=members,
        clusters=cluster_ids,
        similarity=tuple(tuple(row) for row in sim),
        threshold=threshold,
        composites=tuple(composites),
        conflicts=tuple(conflicts),
    )


# ---------------------------------------------------------------------------
# Delimited-table import/export
# ---------------------------------------------------------------------------


def matrix_to_csv(matrix: DecisionMatrix) -> str:
    lines = ["alternative," + ",".join(matrix.criteria.ids())]
    for alt, row in zip(matrix.alternatives, matrix.scores):
        lines.append(alt + "," + ",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def matrix_from_csv(text: str, criteria: CriteriaSet | None = None) -> DecisionMatrix:
    rows = [line.split(",") for line in text.strip().splitlines() if line.strip()]
    header = rows[0]
    ids = header[1:]
    criteria = criteria or CriteriaSet(tuple(Criterion(c, c) for c in ids))
    if criteria.ids() != ids:
        raise ValueError("header criteria do not match the provided criteria set")
    alternatives = tuple(r[0] for r in rows[1:])
    scores = tuple(tuple(float(x) for x in r[1:]) for r in rows[1:])
    return DecisionMatrix(alternatives=alternatives, criteria=criteria, scores=scores)
