"""Gerund normalization for function phrases.

A pure rule table over a closed verb lexicon: silent-e drop, a consonant
doubling list, and an irregulars map. No morphology library; a phrase whose
leading token already ends in "-ing" is a fixed point, and a phrase whose
leading token is not a known verb is rejected with NOT_A_VERB rather than
guessed at.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .errors import NotAVerbError


@lru_cache(maxsize=1)
def _tables() -> dict:
    raw = resources.files("bioinvert.data").joinpath("verbs.json").read_text("utf-8")
    return json.loads(raw)


@lru_cache(maxsize=1)
def verb_lexicon() -> frozenset[str]:
    """All base verbs the normalizer (and variant detection) knows about."""
    t = _tables()
    verbs = set(t["function_verbs"]) | set(t["transform_verbs"]) | set(t["state_verbs"])
    verbs |= set(t["extra_verbs"]) | set(t["double_final_consonant"])
    verbs |= set(t["irregular_gerunds"])
    return frozenset(verbs)


def function_verbs() -> frozenset[str]:
    return frozenset(_tables()["function_verbs"])


def transform_verbs() -> frozenset[str]:
    return frozenset(_tables()["transform_verbs"])


def state_verbs() -> frozenset[str]:
    return frozenset(_tables()["state_verbs"])


def gerund_of(verb: str) -> str:
    """The "-ing" form of a single lexicon verb (lowercase in, lowercase out)."""
    t = _tables()
    if verb.endswith("ing"):
        return verb
    irregular = t["irregular_gerunds"].get(verb)
    if irregular:
        return irregular
    if verb in t["double_final_consonant"]:
        return verb + verb[-1] + "ing"
    if verb.endswith("ie"):
        return verb[:-2] + "ying"
    if verb.endswith("e") and not verb.endswith(("ee", "oe", "ye")):
        return verb[:-1] + "ing"
    return verb + "ing"


def is_known_verb(token: str) -> bool:
    return token.lower() in verb_lexicon()


def gerundize(phrase: str) -> str:
    """Convert the leading verb of ``phrase`` to gerund form.

    Idempotent: a leading token that already ends in "-ing" leaves the phrase
    untouched. Raises NOT_A_VERB when the leading token is neither a lexicon
    verb nor already a gerund.
    """
    stripped = phrase.strip()
    if not stripped:
        raise NotAVerbError("empty phrase")
    head, _, rest = stripped.partition(" ")
    low = head.lower()
    if low.endswith("ing"):
        return stripped
    if low not in verb_lexicon():
        raise NotAVerbError(f"leading token {head!r} is not a known verb")
    ing = gerund_of(low)
    if head[0].isupper():
        ing = ing[0].upper() + ing[1:]
    return ing + (" " + rest if rest else "")


def is_gerund_normalized(phrase: str) -> bool:
    """True when normalizing would not change the phrase.

    Phrases with a non-verb leading token (noun phrases the source corpus
    placed under F) count as normalized: there is nothing to convert.
    """
    try:
        return gerundize(phrase) == phrase.strip()
    except NotAVerbError:
        return True
