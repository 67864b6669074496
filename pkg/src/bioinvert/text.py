"""Small text utilities shared by the pipeline modules.

Everything here is deterministic and dependency-free: tokenization, the
token-set similarity used for auto-scoring and clustering, and whole-word
phrase replacement used by the inversion passes.
"""

from __future__ import annotations

import re

_WORD_RE = re.compile(r"[A-Za-z][A-Za-z0-9'-]*")

# Closed stopword list; kept tiny on purpose so token-set similarity stays
# reproducible by hand.
STOPWORDS = frozenset(
    """a an the of by to in on at with and or for from as is are be was were
    its it this that these those their there then than via per each any all
    will can may into onto through under over between within along across
    around during against toward towards upon about without also both such
    still not no when while where once how so its their""".split()
)


def word_tokens(text: str) -> list[str]:
    """Lowercased word tokens, punctuation dropped."""
    return [m.group(0).lower() for m in _WORD_RE.finditer(text)]


def content_tokens(text: str) -> set[str]:
    """Token set with stopwords removed; the unit of all similarity math."""
    return {t for t in word_tokens(text) if t not in STOPWORDS}


def jaccard(a: set[str], b: set[str]) -> float:
    """Token-set overlap; two empty sets count as identical (1.0)."""
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    return len(a & b) / len(a | b)


def normalize_ws(text: str) -> str:
    return " ".join(text.split())


def phrase_key(text: str) -> str:
    """Equality key for duplicate removal: case-insensitive, whitespace-collapsed."""
    return normalize_ws(text).lower()


def whole_word_pattern(term: str) -> re.Pattern:
    """Case-insensitive whole-word regex for a (possibly multi-word) term."""
    return re.compile(r"(?<!\w)" + re.escape(term) + r"(?!\w)", re.IGNORECASE)


def replace_longest_first(text: str, mappings: list[tuple[str, str]]) -> tuple[str, list[tuple[str, str]]]:
    """Replace every mapped term in ``text``, longest source term first.

    A span consumed by a longer term is locked against shorter overlapping
    terms, so "circular muscle fiber" beats "muscle fiber". Returns the new
    text and the (source, replacement) pairs that actually fired, in span
    order.
    """
    ordered = sorted(mappings, key=lambda kv: (-len(kv[0]), kv[0]))
    taken: list[tuple[int, int, str, str]] = []  # (start, end, src, dst)
    for src, dst in ordered:
        for m in whole_word_pattern(src).finditer(text):
            span = (m.start(), m.end())
            if any(span[0] < e and s < span[1] for s, e, _, _ in taken):
                continue
            taken.append((span[0], span[1], m.group(0), dst))
    taken.sort()
    out: list[str] = []
    cursor = 0
    applied: list[tuple[str, str]] = []
    for start, end, src, dst in taken:
        out.append(text[cursor:start])
        out.append(dst)
        applied.append((src, dst))
        cursor = end
    out.append(text[cursor:])
    return "".join(out), applied


def contains_whole_word(text: str, term: str) -> bool:
    return whole_word_pattern(term).search(text) is not None
