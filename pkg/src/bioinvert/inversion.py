"""Frame construction from labeled sentences and the biology-to-engineering
substitution transform.

Pass 1 replaces biological nouns with engineering nouns (longest match
first, whole words only); pass 2 delegates logical correction to the
completion backend against the knowledge base. Unresolved biological nouns
are always listed, never silently kept.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources

from . import llm
from .corpus import LabeledSentence
from .errors import (
    AuthError,
    KbEmptyError,
    MissingDimensionError,
    MissingVerdictError,
    RateLimitedError,
    SchemaRejectedError,
    TransportError,
)
from .frames import (
    ActionDescription,
    Behavior,
    BehaviorExpr,
    CausalRelation,
    Characteristic,
    Dimension,
    EnvironmentDesc,
    FlowKind,
    FlowTransformation,
    Provenance,
    StateTransition,
    StrategyFrame,
    FunctionExpr,
    set_slot,
    slot_phrases,
    split_noun_phrase,
)
# gerundize is re-exported here: normalization is part of this module's
# public surface, while the shared rule table also backs frame validation.
from .gerund import gerundize, gerund_of, state_verbs, transform_verbs, verb_lexicon  # noqa: F401
from .lexicon import _environment_pattern, _past, _rules, _third_person, _tables
from .text import STOPWORDS, content_tokens, phrase_key, replace_longest_first, word_tokens


@dataclass(frozen=True)
class TermMapping:
    bio_term: str
    eng_term: str
    domain_tags: tuple[str, ...] = ()
    bidirectional: bool = False

    def __post_init__(self):
        if phrase_key(self.bio_term) == phrase_key(self.eng_term):
            raise ValueError(f"mapping {self.bio_term!r} maps to itself")


@dataclass(frozen=True)
class CompatibilityRule:
    pair: tuple[str, str]
    verdict: str  # "allowed" | "disallowed"
    rationale: str


@dataclass(frozen=True)
class EngineeringKB:
    mappings: tuple[TermMapping, ...]
    compatibility_rules: tuple[CompatibilityRule, ...] = ()
    vocabulary: frozenset[str] = frozenset()

    def __post_init__(self):
        seen = set()
        for m in self.mappings:
            key = phrase_key(m.bio_term)
            if key in seen:
                raise ValueError(f"duplicate bio term {m.bio_term!r}")
            seen.add(key)
        vocab = set(self.vocabulary) | {m.eng_term for m in self.mappings}
        object.__setattr__(self, "vocabulary", frozenset(vocab))
        for rule in self.compatibility_rules:
            for term in rule.pair:
                if term not in self.vocabulary:
                    raise ValueError(f"rule references unknown term {term!r}")

    def vocab_tokens(self) -> frozenset[str]:
        tokens: set[str] = set()
        for entry in self.vocabulary:
            tokens.update(word_tokens(entry))
        return frozenset(tokens)


def load_kb(doc: dict) -> EngineeringKB:
    mappings = tuple(
        TermMapping(
            bio_term=m["bio_term"],
            eng_term=m["eng_term"],
            domain_tags=tuple(m.get("domain_tags", ())),
            bidirectional=bool(m.get("bidirectional", False)),
        )
        for m in doc.get("mappings", [])
    )
    rules = tuple(
        CompatibilityRule(pair=(r["pair"][0], r["pair"][1]), verdict=r["verdict"], rationale=r.get("rationale", ""))
        for r in doc.get("rules", [])
    )
    return EngineeringKB(mappings=mappings, compatibility_rules=rules, vocabulary=frozenset(doc.get("vocabulary", ())))


def kb_to_doc(kb: EngineeringKB) -> dict:
    return {
        "mappings": [
            {
                "bio_term": m.bio_term,
                "eng_term": m.eng_term,
                "domain_tags": list(m.domain_tags),
                "bidirectional": m.bidirectional,
            }
            for m in kb.mappings
        ],
        "vocabulary": sorted(kb.vocabulary),
        "rules": [
            {"pair": list(r.pair), "verdict": r.verdict, "rationale": r.rationale}
            for r in kb.compatibility_rules
        ],
    }


@lru_cache(maxsize=1)
def demo_kb() -> EngineeringKB:
    """The underwater-soft-robotics knowledge base shipped with the package."""
    raw = resources.files("bioinvert.fixtures").joinpath("kb-soft-robot.json").read_text("utf-8")
    return load_kb(json.loads(raw))


# ---------------------------------------------------------------------------
# Frame construction from labeled sentences
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _base_verb_index() -> dict[str, str]:
    """Surface form -> base verb, for every verb the lexicon knows."""
    doubling = set(_tables()["double_final_consonant"])
    index: dict[str, str] = {}
    for verb in sorted(verb_lexicon()):
        for form in (verb, _third_person(verb), _past(verb, doubling), gerund_of(verb)):
            index.setdefault(form, verb)
    return index


_CLAUSE_BREAK = re.compile(r"[,;:]|\b(?:because|so that|when|while|therefore|thus|thereby|causing|leading to|in order to)\b", re.IGNORECASE)
_CAUSAL_SPLIT = re.compile(r"\b(because|so that|therefore|thus|thereby|causing|leading to|in order to)\b", re.IGNORECASE)


def _find_main_verb(tokens: list[str]) -> tuple[int, str] | None:
    index = _base_verb_index()
    for i, tok in enumerate(tokens):
        base = index.get(tok)
        if base is not None:
            return i, base
    return None


def _object_after(text: str, verb_surface: str) -> str:
    m = re.search(r"(?<!\w)" + re.escape(verb_surface) + r"(?!\w)", text, re.IGNORECASE)
    tail = text[m.end():] if m else text
    tail = _CLAUSE_BREAK.split(tail)[0]
    words = tail.strip(" .!?").split()
    return " ".join(words[:8]).strip()


def _subject_before(tokens: list[str], verb_index: int) -> str:
    subject = [t for t in tokens[:verb_index] if t not in STOPWORDS]
    return " ".join(subject[-4:])


def extract_function(text: str) -> FunctionExpr | None:
    """Classify one sentence into a function-expression variant.

    Transform verbs become flow transformations, state-change verbs become
    state transitions, any other lexicon verb an action description. Returns
    None when no known verb occurs.
    """
    tokens = word_tokens(text)
    found = _find_main_verb(tokens)
    if found is None:
        return None
    verb_index, base = found
    surface = tokens[verb_index]

    if base in transform_verbs():
        m = re.search(
            r"(?<!\w)" + re.escape(surface) + r"(?!\w)(?P<input>.*?)\b(?:into|to|toward|towards)\b(?P<output>.+)",
            text,
            re.IGNORECASE,
        )
        if m:
            input_obj = " ".join(word_tokens(_CLAUSE_BREAK.split(m.group("input"))[0])) or _subject_before(tokens, verb_index)
            output_obj = " ".join(word_tokens(_CLAUSE_BREAK.split(m.group("output"))[0]))
            if input_obj and output_obj:
                joined = input_obj + " " + output_obj
                if "energy" in joined:
                    kind = FlowKind.ENERGY
                elif "signal" in joined:
                    kind = FlowKind.SIGNAL
                else:
                    kind = FlowKind.MATERIAL
                return FlowTransformation(kind, input_obj, output_obj)

    if base in state_verbs():
        obj = _subject_before(tokens, verb_index) or _object_after(text, surface)
        if obj:
            return StateTransition(object=obj, change_verb=gerund_of(base))

    obj = _object_after(text, surface) or _subject_before(tokens, verb_index)
    if not obj:
        obj = "the system"
    return ActionDescription(verb=gerund_of(base), object=obj)


def extract_noun_phrase(text: str) -> tuple[str, tuple[str, ...]]:
    """Head + attributives via the attributive-adjacency rulebook pattern."""
    adjectives = {a.lower() for a in _rules()["attributive_adjectives"]}
    tokens = word_tokens(text)
    for i, tok in enumerate(tokens):
        if tok in adjectives and i + 1 < len(tokens):
            j = i
            while j < len(tokens) and tokens[j] in adjectives:
                j += 1
            if j < len(tokens):
                return tokens[j], tuple(tokens[i:j])
    content = [t for t in tokens if t in content_tokens(text)]
    return (content[-1] if content else "item"), ()


@lru_cache(maxsize=1)
def _summary_rules() -> list[dict]:
    raw = resources.files("bioinvert.data").joinpath("summary-rules.json").read_text("utf-8")
    return json.loads(raw)


class RuleSummarizer:
    """Keyword-table behavior summarizer; the rule backend for build_frame."""

    def summarize(self, sentences: list[LabeledSentence], steps: tuple[FunctionExpr, ...]) -> str:
        corpus = " ".join(s.sentence.text.lower() for s in sentences)
        best_summary = ""
        best_count = 0
        for rule in _summary_rules():
            count = sum(corpus.count(kw) for kw in rule["keywords"])
            if count > best_count:
                best_count = count
                best_summary = rule["summary"]
        if best_summary:
            return best_summary
        if steps:
            return steps[0].phrase()
        return "Unnamed behavior"


def build_frame(
    sentences: list[LabeledSentence],
    summarizer: RuleSummarizer | None = None,
    frame_id: str | None = None,
) -> StrategyFrame:
    """Assemble a frame from labeled sentences, preserving source order.

    Requires at least one Function- and one Characteristic-labeled sentence;
    the output validates under the frame schema.
    """
    missing = [
        d
        for d in (Dimension.FUNCTION, Dimension.CHARACTERISTIC)
        if not any(d in s.labels for s in sentences)
    ]
    if missing:
        raise MissingDimensionError(missing)
    summarizer = summarizer or RuleSummarizer()

    functions: list[FunctionExpr] = []
    fn_keys: set[str] = set()
    for s in sentences:
        if Dimension.FUNCTION in s.labels:
            fn = extract_function(s.sentence.text)
            if fn is not None and phrase_key(fn.phrase()) not in fn_keys:
                fn_keys.add(phrase_key(fn.phrase()))
                functions.append(fn)

    steps: list[FunctionExpr] = []
    links: list[CausalRelation] = []
    for s in sentences:
        if Dimension.BEHAVIOR not in s.labels:
            continue
        text = s.sentence.text
        head_text = text
        m = _CAUSAL_SPLIT.search(text)
        if m:
            head_text = text[: m.start()]
        step = extract_function(head_text) or extract_function(text)
        if step is None:
            step = ActionDescription(verb="performing", object=" ".join(word_tokens(text)[:6]) or "the process")
        index = len(steps)
        steps.append(step)
        if m:
            effect = extract_function(text[m.end():])
            if effect is not None:
                links.append(CausalRelation(cause=(index, index + 1), effect=effect, conjunction=m.group(1).lower()))

    characteristics: list[Characteristic] = []
    ch_keys: set[str] = set()
    for s in sentences:
        if Dimension.CHARACTERISTIC in s.labels:
            head, attrs = extract_noun_phrase(s.sentence.text)
            ch = Characteristic(head, attrs)
            if phrase_key(ch.phrase()) not in ch_keys:
                ch_keys.add(phrase_key(ch.phrase()))
                characteristics.append(ch)
    if not characteristics:
        raise MissingDimensionError([Dimension.CHARACTERISTIC])

    environment: EnvironmentDesc | None = None
    for s in sentences:
        if Dimension.ENVIRONMENT in s.labels and environment is None:
            m = _environment_pattern().search(s.sentence.text)
            if m:
                head, attrs = split_noun_phrase(m.group(0).lower())
                environment = EnvironmentDesc(head, attrs)

    doc_id = sentences[0].sentence.doc_id if sentences else ""
    return StrategyFrame(
        id=frame_id or f"frame:{doc_id}",
        behavior=Behavior(
            summary=summarizer.summarize(sentences, tuple(steps)),
            expr=BehaviorExpr(tuple(steps), tuple(links)),
        ),
        functions=tuple(functions),
        characteristics=tuple(characteristics),
        environment=environment,
        provenance=Provenance(
            source_doc=doc_id,
            sentence_ids=tuple(s.sentence.id for s in sentences),
        ),
    )


# ---------------------------------------------------------------------------
# The inversion transform
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Substitution:
    slot: str
    bio_term: str
    eng_term: str


@dataclass(frozen=True)
class InversionResult:
    engineering_frame: StrategyFrame
    source_frame: StrategyFrame
    substitutions: tuple[Substitution, ...] = ()
    unresolved: tuple[str, ...] = ()
    corrections: tuple[llm.SlotChange, ...] = ()
    flags: tuple[llm.CompatibilityFlag, ...] = ()

    @property
    def id(self) -> str:
        return self.engineering_frame.id


@lru_cache(maxsize=1)
def _all_verb_forms() -> frozenset[str]:
    return frozenset(_base_verb_index())


def unresolved_terms(frame: StrategyFrame, kb: EngineeringKB, skip_paths: tuple[str, ...] = ()) -> tuple[str, ...]:
    """Noun tokens absent from both the mappings and the vocabulary."""
    vocab = kb.vocab_tokens()
    verbs = _all_verb_forms()
    found: set[str] = set()
    for path, text in slot_phrases(frame):
        if path in skip_paths:
            continue
        for tok in content_tokens(text):
            if len(tok) <= 2 or tok in verbs or any(c.isdigit() for c in tok):
                continue
            if tok in vocab or (tok.endswith("s") and tok[:-1] in vocab) or (tok.endswith("es") and tok[:-2] in vocab):
                continue
            found.add(tok)
    return tuple(sorted(found))


def substitute(frame: StrategyFrame, kb: EngineeringKB) -> tuple[StrategyFrame, tuple[Substitution, ...]]:
    """Pass 1: longest-match-first whole-word replacement across all slots."""
    pairs = [(m.bio_term, m.eng_term) for m in kb.mappings]
    result = frame
    substitutions: list[Substitution] = []
    for path, text in slot_phrases(frame):
        new_text, applied = replace_longest_first(text, pairs)
        if applied:
            result = set_slot(result, path, new_text)
            substitutions.extend(Substitution(path, src, dst) for src, dst in applied)
    return result, tuple(substitutions)


def invert(
    frame: StrategyFrame,
    kb: EngineeringKB,
    corrector=None,
    policy: llm.RetryPolicy = llm.DEFAULT_POLICY,
) -> InversionResult:
    """The full transform: vocabulary substitution, then logical correction.

    Backend failures in pass 2 re-raise with the pass-1 result attached on
    the exception as ``partial`` so designers keep the substitution work.
    """
    if not kb.mappings and not kb.vocabulary:
        raise KbEmptyError("knowledge base has no mappings and no vocabulary")

    pass1, substitutions = substitute(frame, kb)

    corrections: tuple[llm.SlotChange, ...] = ()
    flags: tuple[llm.CompatibilityFlag, ...] = ()
    final = pass1
    if corrector is not None:
        try:
            corrected = llm.correct_frame(pass1, kb, corrector, policy)
        except (TransportError, AuthError, RateLimitedError, SchemaRejectedError) as exc:
            exc.partial = InversionResult(
                engineering_frame=pass1,
                source_frame=frame,
                substitutions=substitutions,
                unresolved=unresolved_terms(pass1, kb),
            )
            raise
        final = corrected.frame
        corrections = corrected.changes
        flags = corrected.flags

    return InversionResult(
        engineering_frame=final,
        source_frame=frame,
        substitutions=substitutions,
        unresolved=unresolved_terms(final, kb),
        corrections=corrections,
        flags=flags,
    )


# ---------------------------------------------------------------------------
# Designer screening
# ---------------------------------------------------------------------------


class ScreenDecision(enum.Enum):
    KEEP = "Keep"
    DROP = "Drop"


@dataclass(frozen=True)
class ScreenVerdict:
    decision: ScreenDecision
    reason: str = ""


def screen(
    results: list[InversionResult], verdicts: dict[str, ScreenVerdict]
) -> tuple[list[InversionResult], list[InversionResult]]:
    """Apply designer verdicts; pure function of its inputs.

    Returns (kept, dropped); each dropped result carries its drop reason in
    the frame provenance notes.
    """
    missing = [r.id for r in results if r.id not in verdicts]
    if missing:
        raise MissingVerdictError(f"no verdict for: {', '.join(missing)}")
    kept: list[InversionResult] = []
    dropped: list[InversionResult] = []
    for result in results:
        verdict = verdicts[result.id]
        if verdict.decision is ScreenDecision.KEEP:
            kept.append(result)
        else:
            prov = result.engineering_frame.provenance
            note = f"screened out: {verdict.reason}" if verdict.reason else "screened out"
            annotated = replace(
                result.engineering_frame,
                provenance=replace(prov, notes=(prov.notes + "; " if prov.notes else "") + note),
            )
            dropped.append(replace(result, engineering_frame=annotated))
    return kept, dropped
