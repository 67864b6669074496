"""Strategy-inversion workbench.

Converts biological-strategy texts into standardized knowledge frames
(functions, one behavior, characteristics, in an environment), maps them
onto engineering vocabulary, and ranks the candidates with ordinal (G1)
weighting plus VIKOR compromise ranking, keeping a designer in the loop at
every verification point.
"""

from .corpus import (
    BatchStatus,
    LabeledSentence,
    LabelSource,
    ReviewBatch,
    SentenceRecord,
    Verdict,
    build_review_batches,
    classify,
    generate_samples,
    review_loop_step,
    run_review_loop,
    segment,
)
from .decision import (
    ClusterReport,
    CriteriaSet,
    Criterion,
    DecisionMatrix,
    DecisionRun,
    Direction,
    G1Judgment,
    Scoring,
    VikorResult,
    cluster_top,
    default_criteria,
    frame_similarity,
    g1_weights,
    rank_strategies,
    score_auto_criteria,
    vikor,
)
from .frames import (
    ActionDescription,
    Behavior,
    BehaviorExpr,
    CausalRelation,
    Characteristic,
    DesignProblem,
    Dimension,
    ElementaryStrategy,
    EnvironmentDesc,
    FlowKind,
    FlowTransformation,
    FrameFragment,
    Level,
    Provenance,
    StateTransition,
    StrategyFrame,
    ValidationIssue,
    compose,
    parse_frame,
    parse_frames,
    serialize_frame,
    validate_frame,
)
from .gerund import gerundize
from .inversion import (
    EngineeringKB,
    InversionResult,
    ScreenDecision,
    ScreenVerdict,
    TermMapping,
    build_frame,
    demo_kb,
    invert,
    load_kb,
    screen,
)
from .lexicon import FixedLabelClassifier, LexiconClassifier
from .llm import (
    CorrectedFrame,
    HttpLlmClient,
    LlmClassifier,
    LlmResponse,
    LlmTask,
    MockLlmClient,
    RetryPolicy,
    TaskKind,
    correct_frame,
)

__version__ = "0.1.0"
