"""Deterministic lexicon/pattern classifier baseline.

Rule sources, per dimension: verb lists (function), causal/temporal
connectives (behavior), attributive-plus-noun adjacency patterns
(characteristic), habitat/medium terms (environment). The rulebook ships as
data; scores follow 1 - 2^-hits so any hit clears the default 0.5 threshold
and extra evidence saturates toward 1.
"""

from __future__ import annotations

import json
import re
from functools import lru_cache
from importlib import resources

from .corpus import LabelSource
from .frames import Dimension
from .gerund import _tables, gerund_of
from .text import word_tokens


@lru_cache(maxsize=1)
def _rules() -> dict:
    raw = resources.files("bioinvert.data").joinpath("lexicon-rules.json").read_text("utf-8")
    return json.loads(raw)


def _past(verb: str, doubling: set[str]) -> str:
    if verb.endswith("e"):
        return verb + "d"
    if verb in doubling:
        return verb + verb[-1] + "ed"
    if verb.endswith("y") and len(verb) > 1 and verb[-2] not in "aeiou":
        return verb[:-1] + "ied"
    return verb + "ed"


def _third_person(verb: str) -> str:
    if verb.endswith(("s", "sh", "ch", "x", "z", "o")):
        return verb + "es"
    if verb.endswith("y") and len(verb) > 1 and verb[-2] not in "aeiou":
        return verb[:-1] + "ies"
    return verb + "s"


@lru_cache(maxsize=1)
def function_verb_inflections() -> frozenset[str]:
    """Every surface form of the function/transform/state verb lists."""
    tables = _tables()
    doubling = set(tables["double_final_consonant"])
    verbs = set(tables["function_verbs"]) | set(tables["transform_verbs"]) | set(tables["state_verbs"])
    forms: set[str] = set()
    for verb in verbs:
        forms.update({verb, _third_person(verb), _past(verb, doubling), gerund_of(verb)})
    return frozenset(forms)


def _term_pattern(terms: list[str]) -> re.Pattern:
    alts = sorted(terms, key=len, reverse=True)
    joined = "|".join(re.escape(t).replace(r"\ ", r"\s+") for t in alts)
    return re.compile(r"(?<!\w)(?:" + joined + r")(?!\w)", re.IGNORECASE)


@lru_cache(maxsize=1)
def _behavior_pattern() -> re.Pattern:
    return _term_pattern(_rules()["behavior_connectives"])


@lru_cache(maxsize=1)
def _environment_pattern() -> re.Pattern:
    return _term_pattern(_rules()["environment_terms"])


@lru_cache(maxsize=1)
def _attributive_pattern() -> re.Pattern:
    adjs = sorted(_rules()["attributive_adjectives"], key=len, reverse=True)
    joined = "|".join(re.escape(a) for a in adjs)
    # Attributive immediately followed by another word: the noun-phrase cue.
    return re.compile(r"(?<!\w)(?:" + joined + r")(?!\w)\s+[A-Za-z]", re.IGNORECASE)


def _score(hits: int) -> float:
    return 1.0 - 2.0 ** (-hits)


class LexiconClassifier:
    """Pure rule-based multi-label scorer; no model, no network."""

    source = LabelSource.LEXICON

    def score(self, text: str) -> dict[Dimension, float]:
        tokens = word_tokens(text)
        inflections = function_verb_inflections()
        function_hits = sum(1 for t in tokens if t in inflections)
        behavior_hits = len(_behavior_pattern().findall(text))
        characteristic_hits = len(_attributive_pattern().findall(text))
        environment_hits = len(_environment_pattern().findall(text))
        return {
            Dimension.FUNCTION: _score(function_hits),
            Dimension.BEHAVIOR: _score(behavior_hits),
            Dimension.CHARACTERISTIC: _score(characteristic_hits),
            Dimension.ENVIRONMENT: _score(environment_hits),
        }


class FixedLabelClassifier:
    """Replays a fixed id->labels mapping; stands in for the human expert.

    Sentences not covered by the mapping keep an empty label set with zero
    scores, so build the mapping from the reviewed corpus.
    """

    source = LabelSource.HUMAN

    def __init__(self, labels_by_text: dict[str, frozenset[Dimension]]):
        self._by_text = dict(labels_by_text)

    def score(self, text: str) -> dict[Dimension, float]:
        labels = self._by_text.get(text, frozenset())
        return {d: (1.0 if d in labels else 0.0) for d in Dimension}
