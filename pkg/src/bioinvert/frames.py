"""Knowledge frames: functions, one behavior, characteristics, in an environment.

This module owns the frame schema, validation, the elementary-strategy
composition operator, and the JSON document format (schema version
``fbce_version: 1``). All types are immutable values; operations return new
values and never mutate their inputs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import ConflictingEnvironmentError, SchemaError
from .gerund import is_gerund_normalized
from .text import normalize_ws, phrase_key

FBCE_VERSION = 1


class Dimension(enum.Enum):
    """The four classification dimensions; every label is one of these."""

    FUNCTION = "Function"
    BEHAVIOR = "Behavior"
    CHARACTERISTIC = "Characteristic"
    ENVIRONMENT = "Environment"


class FlowKind(enum.Enum):
    ENERGY = "energy"
    MATERIAL = "material"
    SIGNAL = "signal"


class Level(enum.Enum):
    SYSTEM = "System"
    SUBSYSTEM = "Subsystem"
    COMPONENT = "Component"


# ---------------------------------------------------------------------------
# Function expressions (three variants)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ActionDescription:
    """Verb (entity action) plus noun phrase (action object)."""

    verb: str
    object: str

    kind = "action"

    def phrase(self) -> str:
        return normalize_ws(f"{self.verb} {self.object}")


@dataclass(frozen=True)
class FlowTransformation:
    """Input flow converted to an output flow; the action is fixed."""

    flow_kind: FlowKind
    input_object: str
    output_object: str

    kind = "flow"

    def phrase(self) -> str:
        return normalize_ws(f"transforming {self.input_object} into {self.output_object}")


@dataclass(frozen=True)
class StateTransition:
    """One object plus the verb describing how its state changes."""

    object: str
    change_verb: str

    kind = "state"

    def phrase(self) -> str:
        return normalize_ws(f"{self.change_verb} {self.object}")


FunctionExpr = ActionDescription | FlowTransformation | StateTransition


@dataclass(frozen=True)
class CausalRelation:
    """A cause (range of behavior steps, half-open) linked to an effect."""

    cause: tuple[int, int]
    effect: FunctionExpr
    conjunction: str


@dataclass(frozen=True)
class BehaviorExpr:
    """Temporal process: ordered steps plus causal links between them."""

    steps: tuple[FunctionExpr, ...] = ()
    causal_links: tuple[CausalRelation, ...] = ()


@dataclass(frozen=True)
class Behavior:
    """The frame's single behavior slot: a summary phrase plus its expression."""

    summary: str
    expr: BehaviorExpr = field(default_factory=BehaviorExpr)

    @property
    def steps(self) -> tuple[FunctionExpr, ...]:
        return self.expr.steps

    @property
    def causal_links(self) -> tuple[CausalRelation, ...]:
        return self.expr.causal_links


# Attributive phrases starting with one of these render after the head noun
# ("Nozzle based on rigid support"); everything else renders before it.
_POSTMODIFIER_STARTS = ("based", "with", "of", "on", "in", "for", "by", "that", "which", "under", "over", "against")


@dataclass(frozen=True)
class Characteristic:
    """Head noun plus modifier phrases."""

    head: str
    attributives: tuple[str, ...] = ()

    def phrase(self) -> str:
        pre = [a for a in self.attributives if a.split(" ", 1)[0].lower() not in _POSTMODIFIER_STARTS]
        post = [a for a in self.attributives if a.split(" ", 1)[0].lower() in _POSTMODIFIER_STARTS]
        return normalize_ws(" ".join([*pre, self.head, *post]))


@dataclass(frozen=True)
class EnvironmentDesc:
    head: str
    attributives: tuple[str, ...] = ()

    def phrase(self) -> str:
        return Characteristic(self.head, self.attributives).phrase()


@dataclass(frozen=True)
class Provenance:
    source_doc: str = ""
    sentence_ids: tuple[str, ...] = ()
    elementary_ids: tuple[str, ...] = ()
    notes: str = ""


@dataclass(frozen=True)
class StrategyFrame:
    """One F-B-Cs-in-E record: >=1 functions, one behavior, >=1 characteristics."""

    id: str
    behavior: Behavior
    functions: tuple[FunctionExpr, ...]
    characteristics: tuple[Characteristic, ...]
    environment: EnvironmentDesc | None = None
    provenance: Provenance = field(default_factory=Provenance)

    def function_phrases(self) -> list[str]:
        return [f.phrase() for f in self.functions]

    def characteristic_phrases(self) -> list[str]:
        return [c.phrase() for c in self.characteristics]


@dataclass(frozen=True)
class FrameFragment:
    """Any subset of frame slots, as carried by an elementary strategy."""

    behavior: Behavior | None = None
    functions: tuple[FunctionExpr, ...] = ()
    characteristics: tuple[Characteristic, ...] = ()
    environment: EnvironmentDesc | None = None


@dataclass(frozen=True)
class ElementaryStrategy:
    """Minimal strategy fragment; ids follow the S_e^k convention."""

    id: str
    sentences: tuple[str, ...] = ()
    frame_fragment: FrameFragment = field(default_factory=FrameFragment)


@dataclass(frozen=True)
class DesignProblem:
    level: Level
    requirement_elements: tuple[str, ...]
    processing_elements: tuple[str, ...] = ()
    description: str = ""


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    path: str
    message: str


def _check_function(fn: FunctionExpr, path: str, issues: list[ValidationIssue]) -> None:
    if isinstance(fn, ActionDescription):
        if not fn.verb.strip():
            issues.append(ValidationIssue("EMPTY_FIELD", f"{path}/verb", "verb is empty"))
        if not fn.object.strip():
            issues.append(ValidationIssue("EMPTY_FIELD", f"{path}/object", "object is empty"))
    elif isinstance(fn, FlowTransformation):
        if not fn.input_object.strip():
            issues.append(ValidationIssue("EMPTY_FIELD", f"{path}/input_object", "input object is empty"))
        if not fn.output_object.strip():
            issues.append(ValidationIssue("EMPTY_FIELD", f"{path}/output_object", "output object is empty"))
    elif isinstance(fn, StateTransition):
        if not fn.object.strip():
            issues.append(ValidationIssue("EMPTY_FIELD", f"{path}/object", "object is empty"))
        if not fn.change_verb.strip():
            issues.append(ValidationIssue("EMPTY_FIELD", f"{path}/change_verb", "change verb is empty"))
    phrase = fn.phrase()
    if phrase and not is_gerund_normalized(phrase):
        issues.append(
            ValidationIssue("NOT_GERUND", path, f"phrase {phrase!r} is not gerund-normalized")
        )


def validate_frame(frame: StrategyFrame) -> list[ValidationIssue]:
    """Every invariant violation, with a machine-readable code and slot path.

    Violations are data, not errors: an empty report means the frame is valid.
    The report order is deterministic (slot order, then list position).
    """
    issues: list[ValidationIssue] = []
    if not frame.id.strip():
        issues.append(ValidationIssue("EMPTY_FIELD", "/id", "frame id is empty"))

    if not frame.behavior.summary.strip():
        issues.append(ValidationIssue("BEHAVIOR_EMPTY", "/behavior/summary", "behavior summary is empty"))
    steps = frame.behavior.steps
    for i, step in enumerate(steps):
        _check_function(step, f"/behavior/steps/{i}", issues)
    links = frame.behavior.causal_links
    if links and not steps:
        issues.append(
            ValidationIssue("CAUSE_OUT_OF_RANGE", "/behavior/causal_links", "causal links without steps")
        )
    for i, link in enumerate(links):
        start, end = link.cause
        if not (0 <= start < end <= len(steps)):
            issues.append(
                ValidationIssue(
                    "CAUSE_OUT_OF_RANGE",
                    f"/behavior/causal_links/{i}/cause",
                    f"range [{start}, {end}) outside steps [0, {len(steps)})",
                )
            )
        if not link.conjunction.strip():
            issues.append(
                ValidationIssue("EMPTY_FIELD", f"/behavior/causal_links/{i}/conjunction", "conjunction is empty")
            )
        _check_function(link.effect, f"/behavior/causal_links/{i}/effect", issues)

    if not frame.functions:
        issues.append(ValidationIssue("FUNCTIONS_EMPTY", "/functions", "functions list is empty"))
    seen: dict[str, int] = {}
    for i, fn in enumerate(frame.functions):
        _check_function(fn, f"/functions/{i}", issues)
        key = phrase_key(fn.phrase())
        if key in seen:
            issues.append(
                ValidationIssue("DUPLICATE_PHRASE", f"/functions/{i}", f"duplicates /functions/{seen[key]}")
            )
        else:
            seen[key] = i

    if not frame.characteristics:
        issues.append(ValidationIssue("CHARACTERISTICS_EMPTY", "/characteristics", "characteristics list is empty"))
    seen = {}
    for i, ch in enumerate(frame.characteristics):
        if not ch.head.strip():
            issues.append(ValidationIssue("EMPTY_FIELD", f"/characteristics/{i}/head", "head is empty"))
        key = phrase_key(ch.phrase())
        if key in seen:
            issues.append(
                ValidationIssue(
                    "DUPLICATE_PHRASE", f"/characteristics/{i}", f"duplicates /characteristics/{seen[key]}"
                )
            )
        else:
            seen[key] = i

    if frame.environment is not None and not frame.environment.head.strip():
        issues.append(ValidationIssue("EMPTY_FIELD", "/environment/head", "head is empty"))
    return issues


# ---------------------------------------------------------------------------
# Composition operator
# ---------------------------------------------------------------------------


def compose(parts: list[ElementaryStrategy], frame_id: str | None = None) -> StrategyFrame:
    """Slot-wise union of elementary strategies, deterministic in argument order.

    Functions and characteristics are concatenated with duplicate phrases
    removed (case-insensitive, whitespace-collapsed). Behavior steps are
    concatenated in argument order with causal-link ranges re-based; the
    summary and the environment come from the first part that defines one.
    Two parts defining non-identical environments raise
    CONFLICTING_ENVIRONMENT for the designer to resolve.
    """
    if not parts:
        raise ValueError("compose requires at least one part")

    functions: list[FunctionExpr] = []
    fn_keys: set[str] = set()
    characteristics: list[Characteristic] = []
    ch_keys: set[str] = set()
    steps: list[FunctionExpr] = []
    links: list[CausalRelation] = []
    summary = ""
    environment: EnvironmentDesc | None = None
    sentence_ids: list[str] = []

    for part in parts:
        frag = part.frame_fragment
        for fn in frag.functions:
            key = phrase_key(fn.phrase())
            if key not in fn_keys:
                fn_keys.add(key)
                functions.append(fn)
        for ch in frag.characteristics:
            key = phrase_key(ch.phrase())
            if key not in ch_keys:
                ch_keys.add(key)
                characteristics.append(ch)
        if frag.behavior is not None:
            offset = len(steps)
            steps.extend(frag.behavior.steps)
            for link in frag.behavior.causal_links:
                links.append(
                    CausalRelation(
                        (link.cause[0] + offset, link.cause[1] + offset), link.effect, link.conjunction
                    )
                )
            if not summary and frag.behavior.summary.strip():
                summary = frag.behavior.summary
        if frag.environment is not None:
            if environment is None:
                environment = frag.environment
            elif environment != frag.environment:
                raise ConflictingEnvironmentError(
                    f"{environment.phrase()!r} vs {frag.environment.phrase()!r}",
                    parts=[p.id for p in parts],
                )
        for sid in part.sentences:
            if sid not in sentence_ids:
                sentence_ids.append(sid)

    return StrategyFrame(
        id=frame_id or "+".join(p.id for p in parts),
        behavior=Behavior(summary, BehaviorExpr(tuple(steps), tuple(links))),
        functions=tuple(functions),
        characteristics=tuple(characteristics),
        environment=environment,
        provenance=Provenance(
            sentence_ids=tuple(sentence_ids),
            elementary_ids=tuple(p.id for p in parts),
        ),
    )


# ---------------------------------------------------------------------------
# Document format (fbce_version 1)
# ---------------------------------------------------------------------------


def _function_to_dict(fn: FunctionExpr) -> dict:
    if isinstance(fn, ActionDescription):
        return {"kind": "action", "verb": fn.verb, "object": fn.object}
    if isinstance(fn, FlowTransformation):
        return {
            "kind": "flow",
            "flow_kind": fn.flow_kind.value,
            "input_object": fn.input_object,
            "output_object": fn.output_object,
        }
    return {"kind": "state", "object": fn.object, "change_verb": fn.change_verb}


def _np_to_dict(np_: Characteristic | EnvironmentDesc) -> dict:
    return {"head": np_.head, "attributives": list(np_.attributives)}


def serialize_frame(frame: StrategyFrame) -> dict:
    """Frame -> plain document (JSON-compatible dict)."""
    return {
        "fbce_version": FBCE_VERSION,
        "id": frame.id,
        "behavior": {
            "summary": frame.behavior.summary,
            "steps": [_function_to_dict(s) for s in frame.behavior.steps],
            "causal_links": [
                {
                    "cause": list(link.cause),
                    "effect": _function_to_dict(link.effect),
                    "conjunction": link.conjunction,
                }
                for link in frame.behavior.causal_links
            ],
        },
        "functions": [_function_to_dict(f) for f in frame.functions],
        "characteristics": [_np_to_dict(c) for c in frame.characteristics],
        "environment": None if frame.environment is None else _np_to_dict(frame.environment),
        "provenance": {
            "source_doc": frame.provenance.source_doc,
            "sentence_ids": list(frame.provenance.sentence_ids),
            "elementary_ids": list(frame.provenance.elementary_ids),
            "notes": frame.provenance.notes,
        },
    }


def _require(doc: dict, keys: set[str], path: str) -> None:
    if not isinstance(doc, dict):
        raise SchemaError(f"expected object, got {type(doc).__name__}", path)
    missing = keys - doc.keys()
    if missing:
        name = sorted(missing)[0]
        raise SchemaError(f"missing required field {name!r}", f"{path}/{name}")
    unknown = doc.keys() - keys
    if unknown:
        name = sorted(unknown)[0]
        raise SchemaError(f"unknown field {name!r}", f"{path}/{name}")


def _get_str(doc: dict, key: str, path: str) -> str:
    value = doc[key]
    if not isinstance(value, str):
        raise SchemaError(f"field {key!r} must be a string", f"{path}/{key}")
    return value


def _get_list(doc: dict, key: str, path: str) -> list:
    value = doc[key]
    if not isinstance(value, list):
        raise SchemaError(f"field {key!r} must be a list", f"{path}/{key}")
    return value


def _function_from_dict(doc: dict, path: str) -> FunctionExpr:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SchemaError("function must be a tagged object with 'kind'", path)
    kind = doc["kind"]
    if kind == "action":
        _require(doc, {"kind", "verb", "object"}, path)
        return ActionDescription(_get_str(doc, "verb", path), _get_str(doc, "object", path))
    if kind == "flow":
        _require(doc, {"kind", "flow_kind", "input_object", "output_object"}, path)
        raw = _get_str(doc, "flow_kind", path)
        try:
            flow_kind = FlowKind(raw)
        except ValueError:
            raise SchemaError(f"unknown flow_kind {raw!r}", f"{path}/flow_kind") from None
        return FlowTransformation(
            flow_kind, _get_str(doc, "input_object", path), _get_str(doc, "output_object", path)
        )
    if kind == "state":
        _require(doc, {"kind", "object", "change_verb"}, path)
        return StateTransition(_get_str(doc, "object", path), _get_str(doc, "change_verb", path))
    raise SchemaError(f"unknown function kind {kind!r}", f"{path}/kind")


def _np_from_dict(doc: dict, path: str, cls):
    _require(doc, {"head", "attributives"}, path)
    attrs = _get_list(doc, "attributives", path)
    for i, a in enumerate(attrs):
        if not isinstance(a, str):
            raise SchemaError("attributive must be a string", f"{path}/attributives/{i}")
    return cls(_get_str(doc, "head", path), tuple(attrs))


def parse_frame(doc: dict) -> StrategyFrame:
    """Document -> frame; unknown fields are rejected with their path."""
    _require(
        doc,
        {"fbce_version", "id", "behavior", "functions", "characteristics", "environment", "provenance"},
        "",
    )
    if doc["fbce_version"] != FBCE_VERSION:
        raise SchemaError(f"unsupported fbce_version {doc['fbce_version']!r}", "/fbce_version")

    beh = doc["behavior"]
    _require(beh, {"summary", "steps", "causal_links"}, "/behavior")
    steps = tuple(
        _function_from_dict(s, f"/behavior/steps/{i}") for i, s in enumerate(_get_list(beh, "steps", "/behavior"))
    )
    links = []
    for i, raw in enumerate(_get_list(beh, "causal_links", "/behavior")):
        lpath = f"/behavior/causal_links/{i}"
        _require(raw, {"cause", "effect", "conjunction"}, lpath)
        cause = raw["cause"]
        if not (isinstance(cause, list) and len(cause) == 2 and all(isinstance(x, int) for x in cause)):
            raise SchemaError("cause must be a [start, end] index pair", f"{lpath}/cause")
        links.append(
            CausalRelation(
                (cause[0], cause[1]),
                _function_from_dict(raw["effect"], f"{lpath}/effect"),
                _get_str(raw, "conjunction", lpath),
            )
        )
    behavior = Behavior(_get_str(beh, "summary", "/behavior"), BehaviorExpr(steps, tuple(links)))

    functions = tuple(
        _function_from_dict(f, f"/functions/{i}") for i, f in enumerate(_get_list(doc, "functions", ""))
    )
    characteristics = tuple(
        _np_from_dict(c, f"/characteristics/{i}", Characteristic)
        for i, c in enumerate(_get_list(doc, "characteristics", ""))
    )
    env_doc = doc["environment"]
    environment = None if env_doc is None else _np_from_dict(env_doc, "/environment", EnvironmentDesc)

    prov = doc["provenance"]
    _require(prov, {"source_doc", "sentence_ids", "elementary_ids", "notes"}, "/provenance")
    provenance = Provenance(
        _get_str(prov, "source_doc", "/provenance"),
        tuple(_get_list(prov, "sentence_ids", "/provenance")),
        tuple(_get_list(prov, "elementary_ids", "/provenance")),
        _get_str(prov, "notes", "/provenance"),
    )

    return StrategyFrame(
        id=_get_str(doc, "id", ""),
        behavior=behavior,
        functions=functions,
        characteristics=characteristics,
        environment=environment,
        provenance=provenance,
    )


def parse_frames(docs: list[dict]) -> list[StrategyFrame]:
    """Parse a project import; duplicate frame ids are rejected."""
    frames: list[StrategyFrame] = []
    seen: set[str] = set()
    for i, doc in enumerate(docs):
        frame = parse_frame(doc)
        if frame.id in seen:
            raise SchemaError(f"duplicate-id: {frame.id!r}", f"/{i}/id")
        seen.add(frame.id)
        frames.append(frame)
    return frames


def slots_equal(a: StrategyFrame, b: StrategyFrame) -> bool:
    """Equality on content slots, ignoring id and provenance."""
    return (
        a.behavior == b.behavior
        and a.functions == b.functions
        and a.characteristics == b.characteristics
        and a.environment == b.environment
    )


# ---------------------------------------------------------------------------
# Slot addressing (shared by substitution and correction passes)
# ---------------------------------------------------------------------------


def split_noun_phrase(phrase: str, fallback_head: str = "item") -> tuple[str, tuple[str, ...]]:
    """Split a surface phrase back into (head, attributives).

    Premodifiers precede the head; a postmodifier phrase (starting with a
    marker like "based"/"with"/"of") becomes a single trailing attributive,
    so ``Characteristic(*split_noun_phrase(p)).phrase() == normalize_ws(p)``.
    """
    tokens = normalize_ws(phrase).split(" ")
    if not tokens or not tokens[0]:
        return fallback_head, ()
    post = ""
    for i, tok in enumerate(tokens):
        if i > 0 and tok.lower() in _POSTMODIFIER_STARTS:
            post = " ".join(tokens[i:])
            tokens = tokens[:i]
            break
    head = tokens[-1]
    attrs = list(tokens[:-1])
    if post:
        attrs.append(post)
    return head, tuple(attrs)


def _function_fields(fn: FunctionExpr, path: str) -> list[tuple[str, str]]:
    if isinstance(fn, ActionDescription):
        return [(f"{path}/object", fn.object)]
    if isinstance(fn, FlowTransformation):
        return [(f"{path}/input_object", fn.input_object), (f"{path}/output_object", fn.output_object)]
    return [(f"{path}/object", fn.object)]


def slot_phrases(frame: StrategyFrame) -> list[tuple[str, str]]:
    """All substitutable text slots as (path, text), in a fixed order.

    Function-like slots expose their noun-carrying fields; characteristics
    and the environment expose the whole phrase (terms may span the
    head/attributive split).
    """
    slots: list[tuple[str, str]] = [("/behavior/summary", frame.behavior.summary)]
    for i, step in enumerate(frame.behavior.steps):
        slots.extend(_function_fields(step, f"/behavior/steps/{i}"))
    for i, link in enumerate(frame.behavior.causal_links):
        slots.extend(_function_fields(link.effect, f"/behavior/causal_links/{i}/effect"))
    for i, fn in enumerate(frame.functions):
        slots.extend(_function_fields(fn, f"/functions/{i}"))
    for i, ch in enumerate(frame.characteristics):
        slots.append((f"/characteristics/{i}", ch.phrase()))
    if frame.environment is not None:
        slots.append(("/environment", frame.environment.phrase()))
    return slots


def get_slot(frame: StrategyFrame, path: str) -> str:
    for slot_path, text in slot_phrases(frame):
        if slot_path == path:
            return text
    raise KeyError(path)


def _set_function_field(fn: FunctionExpr, field_name: str, text: str) -> FunctionExpr:
    if isinstance(fn, ActionDescription) and field_name == "object":
        return ActionDescription(fn.verb, text)
    if isinstance(fn, FlowTransformation) and field_name in ("input_object", "output_object"):
        return FlowTransformation(
            fn.flow_kind,
            text if field_name == "input_object" else fn.input_object,
            text if field_name == "output_object" else fn.output_object,
        )
    if isinstance(fn, StateTransition) and field_name == "object":
        return StateTransition(text, fn.change_verb)
    raise KeyError(field_name)


def set_slot(frame: StrategyFrame, path: str, text: str) -> StrategyFrame:
    """Return a copy of ``frame`` with the addressed slot replaced."""
    parts = path.strip("/").split("/")
    behavior = frame.behavior
    if parts == ["behavior", "summary"]:
        return _replace_frame(frame, behavior=Behavior(text, behavior.expr))
    if parts[:2] == ["behavior", "steps"]:
        idx, field_name = int(parts[2]), parts[3]
        steps = list(behavior.steps)
        steps[idx] = _set_function_field(steps[idx], field_name, text)
        return _replace_frame(
            frame, behavior=Behavior(behavior.summary, BehaviorExpr(tuple(steps), behavior.causal_links))
        )
    if parts[:2] == ["behavior", "causal_links"]:
        idx, field_name = int(parts[2]), parts[4]
        links = list(behavior.causal_links)
        link = links[idx]
        links[idx] = CausalRelation(link.cause, _set_function_field(link.effect, field_name, text), link.conjunction)
        return _replace_frame(
            frame, behavior=Behavior(behavior.summary, BehaviorExpr(behavior.steps, tuple(links)))
        )
    if parts[0] == "functions":
        idx, field_name = int(parts[1]), parts[2]
        functions = list(frame.functions)
        functions[idx] = _set_function_field(functions[idx], field_name, text)
        return _replace_frame(frame, functions=tuple(functions))
    if parts[0] == "characteristics":
        idx = int(parts[1])
        characteristics = list(frame.characteristics)
        head, attrs = split_noun_phrase(text, fallback_head=characteristics[idx].head)
        characteristics[idx] = Characteristic(head, attrs)
        return _replace_frame(frame, characteristics=tuple(characteristics))
    if parts[0] == "environment" and frame.environment is not None:
        head, attrs = split_noun_phrase(text, fallback_head=frame.environment.head)
        return _replace_frame(frame, environment=EnvironmentDesc(head, attrs))
    raise KeyError(path)


def _replace_frame(frame: StrategyFrame, **changes) -> StrategyFrame:
    import dataclasses

    return dataclasses.replace(frame, **changes)
