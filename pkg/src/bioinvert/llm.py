"""Chat-completion bridge for the three pipeline tasks: sentence labeling,
style paraphrase, and engineering logical correction.

Every backend must return a response that validates against the task's
expected shape; free prose is rejected and retried. The mock backend is
table-driven from a checked-in fixture so the whole pipeline runs offline
and deterministically.
"""

from __future__ import annotations

import enum
import json
import os
import re
import time
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable

import httpx
import jsonschema

from .corpus import LabelSource
from .errors import (
    AuthError,
    ClassifierUnavailableError,
    KbEmptyError,
    RateLimitedError,
    SchemaRejectedError,
    TransportError,
)
from .frames import Dimension, StrategyFrame, get_slot, set_slot, slot_phrases
from .text import contains_whole_word, replace_longest_first

CREDENTIAL_ENV_VAR = "BIOINVERT_LLM_KEY"

_DIMENSION_NAMES = [d.value for d in Dimension]

RESPONSE_SHAPES: dict[str, dict] = {
    "label.v1": {
        "type": "object",
        "properties": {
            "labels": {"type": "array", "items": {"enum": _DIMENSION_NAMES}},
        },
        "required": ["labels"],
        "additionalProperties": False,
    },
    "paraphrase.v1": {
        "type": "object",
        "properties": {"paraphrase": {"type": "string", "minLength": 1}},
        "required": ["paraphrase"],
        "additionalProperties": False,
    },
    "correct.v1": {
        "type": "object",
        "properties": {
            "changes": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "slot": {"type": "string"},
                        "before": {"type": "string"},
                        "after": {"type": "string"},
                        "justification": {"type": "string"},
                    },
                    "required": ["slot", "before", "after", "justification"],
                    "additionalProperties": False,
                },
            }
        },
        "required": ["changes"],
        "additionalProperties": False,
    },
}


class TaskKind(enum.Enum):
    LABEL = "Label"
    PARAPHRASE = "Paraphrase"
    CORRECT = "Correct"


@dataclass(frozen=True)
class LlmTask:
    kind: TaskKind
    prompt_template_id: str
    payload: str
    expected_shape: str

    def __post_init__(self):
        prompt_template(self.prompt_template_id)  # template ids must resolve
        if self.expected_shape not in RESPONSE_SHAPES:
            raise KeyError(f"unknown response shape {self.expected_shape!r}")


@dataclass(frozen=True)
class LlmResponse:
    raw: str
    parsed: dict
    usage: dict
    attempt: int


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    base_delay: float = 0.25
    multiplier: float = 2.0
    max_delay: float = 8.0

    def delay(self, attempt: int) -> float:
        return min(self.base_delay * self.multiplier ** (attempt - 1), self.max_delay)


DEFAULT_POLICY = RetryPolicy()


@lru_cache(maxsize=None)
def prompt_template(template_id: str) -> str:
    path = resources.files("bioinvert.prompts").joinpath(f"{template_id}.txt")
    try:
        return path.read_text("utf-8")
    except FileNotFoundError:
        raise KeyError(f"unknown prompt template {template_id!r}") from None


def render_prompt(task: LlmTask) -> str:
    # Plain placeholder substitution: templates carry literal JSON braces.
    return prompt_template(task.prompt_template_id).replace("{payload}", task.payload)


def label_task(sentence: str) -> LlmTask:
    return LlmTask(TaskKind.LABEL, "label_v1", sentence, "label.v1")


def paraphrase_task(sentence: str) -> LlmTask:
    return LlmTask(TaskKind.PARAPHRASE, "paraphrase_v1", sentence, "paraphrase.v1")


def correct_task(slots: dict[str, str], mappings: list[tuple[str, str]]) -> LlmTask:
    payload = json.dumps({"slots": slots, "mappings": [list(m) for m in mappings]}, sort_keys=True)
    return LlmTask(TaskKind.CORRECT, "correct_v1", payload, "correct.v1")


def _validate_shape(parsed: dict, shape_id: str) -> None:
    jsonschema.validate(parsed, RESPONSE_SHAPES[shape_id])


# ---------------------------------------------------------------------------
# Mock backend
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _default_mock_table() -> dict:
    raw = resources.files("bioinvert.fixtures").joinpath("mock-llm-table.json").read_text("utf-8")
    return json.loads(raw)


class MockLlmClient:
    """Deterministic, stateless, network-free backend for tests and demos.

    Labeling is a keyword table; paraphrase is synonym rotation that never
    touches content nouns; correction applies the provided term mappings,
    longest term first.
    """

    def __init__(self, table: dict | None = None):
        self._table = table if table is not None else _default_mock_table()

    def complete(self, task: LlmTask, policy: RetryPolicy = DEFAULT_POLICY) -> LlmResponse:
        if task.kind is TaskKind.LABEL:
            parsed = {"labels": self._label(task.payload)}
        elif task.kind is TaskKind.PARAPHRASE:
            parsed = {"paraphrase": self._paraphrase(task.payload)}
        else:
            parsed = {"changes": self._correct(task.payload)}
        _validate_shape(parsed, task.expected_shape)
        raw = json.dumps(parsed, sort_keys=True)
        usage = {"prompt_tokens": len(task.payload) // 4, "completion_tokens": len(raw) // 4}
        return LlmResponse(raw=raw, parsed=parsed, usage=usage, attempt=1)

    def paraphrase(self, sentence: str) -> str:
        return self.complete(paraphrase_task(sentence)).parsed["paraphrase"]

    def _label(self, sentence: str) -> list[str]:
        labels = set()
        for dimension, keywords in self._table["label_keywords"].items():
            for kw in keywords:
                if contains_whole_word(sentence, kw):
                    labels.add(dimension)
                    break
        return sorted(labels)

    def _paraphrase(self, sentence: str) -> str:
        synonyms = self._table["paraphrase_synonyms"]
        changed = False

        def swap(match: re.Match) -> str:
            nonlocal changed
            word = match.group(0)
            repl = synonyms[word.lower()]
            changed = True
            if word[0].isupper():
                repl = repl[0].upper() + repl[1:]
            return repl

        pattern = re.compile(
            r"(?<!\w)(?:" + "|".join(re.escape(k) for k in sorted(synonyms, key=len, reverse=True)) + r")(?!\w)",
            re.IGNORECASE,
        )
        out = pattern.sub(swap, sentence)
        if not changed:
            out = self._table["paraphrase_prefix"] + sentence
        return out

    def _correct(self, payload: str) -> list[dict]:
        doc = json.loads(payload)
        mappings = [(src, dst) for src, dst in doc["mappings"]]
        changes = []
        for slot, text in doc["slots"].items():
            new_text, applied = replace_longest_first(text, mappings)
            if applied:
                changes.append(
                    {
                        "slot": slot,
                        "before": text,
                        "after": new_text,
                        "justification": "knowledge-base term mapping: "
                        + "; ".join(f"{s} -> {d}" for s, d in applied),
                    }
                )
        return changes


# ---------------------------------------------------------------------------
# HTTP backend
# ---------------------------------------------------------------------------


class HttpLlmClient:
    """Chat-completion client with schema-validated structured output.

    Retries transport failures and schema-invalid replies with exponential
    backoff; 429 honors Retry-After; credential problems never retry.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        timeout: float = 30.0,
        trace_path: str | None = None,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(CREDENTIAL_ENV_VAR)
        self.trace_path = trace_path
        self._sleep = sleep
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def complete(self, task: LlmTask, policy: RetryPolicy = DEFAULT_POLICY) -> LlmResponse:
        if not self.api_key:
            raise AuthError(f"no credential: set {CREDENTIAL_ENV_VAR}")
        prompt = render_prompt(task)
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "response_format": {"type": "json_object"},
        }
        last_error: Exception | None = None
        for attempt in range(1, policy.max_attempts + 1):
            try:
                response = self._client.post(
                    f"{self.base_url}/chat/completions",
                    json=body,
                    headers={"Authorization": f"Bearer {self.api_key}"},
                )
            except httpx.HTTPError as exc:
                last_error = TransportError(str(exc))
                self._trace(task, attempt, error=str(exc))
                if attempt < policy.max_attempts:
                    self._sleep(policy.delay(attempt))
                continue

            self._trace(task, attempt, status=response.status_code)
            if response.status_code in (401, 403):
                raise AuthError(f"credential rejected ({response.status_code})")
            if response.status_code == 429:
                retry_after = _parse_retry_after(response.headers.get("Retry-After"))
                last_error = RateLimitedError("rate limited", retry_after=retry_after)
                if attempt < policy.max_attempts:
                    self._sleep(retry_after if retry_after is not None else policy.delay(attempt))
                continue
            if response.status_code >= 500 or response.status_code == 408:
                last_error = TransportError(f"server error {response.status_code}")
                if attempt < policy.max_attempts:
                    self._sleep(policy.delay(attempt))
                continue
            if response.status_code != 200:
                raise TransportError(f"unexpected status {response.status_code}")

            try:
                data = response.json()
                raw = data["choices"][0]["message"]["content"]
                usage = data.get("usage", {})
                parsed = json.loads(raw)
                _validate_shape(parsed, task.expected_shape)
            except (KeyError, IndexError, ValueError, jsonschema.ValidationError) as exc:
                last_error = SchemaRejectedError(f"reply failed shape {task.expected_shape}: {exc}")
                if attempt < policy.max_attempts:
                    self._sleep(policy.delay(attempt))
                continue
            return LlmResponse(raw=raw, parsed=parsed, usage=usage, attempt=attempt)
        raise last_error if last_error is not None else TransportError("no attempts made")

    def paraphrase(self, sentence: str) -> str:
        return self.complete(paraphrase_task(sentence)).parsed["paraphrase"]

    def _trace(self, task: LlmTask, attempt: int, **extra) -> None:
        if not self.trace_path:
            return
        entry = {"task": task.kind.value, "template": task.prompt_template_id, "attempt": attempt, **extra}
        with open(self.trace_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")


def _parse_retry_after(value: str | None) -> float | None:
    if value is None:
        return None
    try:
        return float(value)
    except ValueError:
        return None


# ---------------------------------------------------------------------------
# Classifier adapter and frame correction
# ---------------------------------------------------------------------------


class LlmClassifier:
    """Classifier backed by a completion client (mock or HTTP)."""

    source = LabelSource.LLM

    def __init__(self, client, policy: RetryPolicy = DEFAULT_POLICY):
        self._client = client
        self._policy = policy

    def score(self, text: str) -> dict[Dimension, float]:
        try:
            response = self._client.complete(label_task(text), self._policy)
        except (TransportError, AuthError, RateLimitedError, SchemaRejectedError) as exc:
            raise ClassifierUnavailableError(str(exc)) from exc
        labels = {Dimension(v) for v in response.parsed["labels"]}
        return {d: (1.0 if d in labels else 0.0) for d in Dimension}


@dataclass(frozen=True)
class SlotChange:
    slot: str
    before: str
    after: str
    justification: str


@dataclass(frozen=True)
class CompatibilityFlag:
    terms: tuple[str, str]
    rationale: str


@dataclass(frozen=True)
class CorrectedFrame:
    frame: StrategyFrame
    changes: tuple[SlotChange, ...] = ()
    flags: tuple[CompatibilityFlag, ...] = ()


def correct_frame(frame: StrategyFrame, kb, client, policy: RetryPolicy = DEFAULT_POLICY) -> CorrectedFrame:
    """Logical-correction pass: the backend proposes slot replacements from
    the knowledge base; every change is logged (slot, before, after,
    justification) so the designer can revert it downstream.

    Disallowed term co-occurrences from the compatibility rules are reported
    as flags, never silently rewritten.
    """
    if not kb.mappings and not kb.vocabulary:
        raise KbEmptyError("knowledge base has no mappings and no vocabulary")

    slots = dict(slot_phrases(frame))
    task = correct_task(slots, [(m.bio_term, m.eng_term) for m in kb.mappings])
    response = client.complete(task, policy)

    corrected = frame
    changes: list[SlotChange] = []
    for entry in response.parsed["changes"]:
        slot = entry["slot"]
        if slot not in slots or get_slot(corrected, slot) != entry["before"]:
            continue  # stale proposal; frame moved on
        corrected = set_slot(corrected, slot, entry["after"])
        changes.append(SlotChange(slot, entry["before"], entry["after"], entry["justification"]))

    flags: list[CompatibilityFlag] = []
    all_text = " | ".join(text for _, text in slot_phrases(corrected))
    for rule in kb.compatibility_rules:
        if rule.verdict == "disallowed":
            a, b = rule.pair
            if contains_whole_word(all_text, a) and contains_whole_word(all_text, b):
                flags.append(CompatibilityFlag((a, b), rule.rationale))
    return CorrectedFrame(frame=corrected, changes=tuple(changes), flags=tuple(flags))
