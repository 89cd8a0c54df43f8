"""Text normalization and the two string distances used throughout the package.

Everything here works on plain ``str`` (or, for :func:`levenshtein`, on any
pair of sequences), so the same edit-distance routine serves both character
level fuzzy matching and token level WER scoring.
"""

from __future__ import annotations

import unicodedata
from typing import Hashable, Sequence

__all__ = ["normalize", "levenshtein", "similarity", "soundex", "form_key"]


def _is_punct(ch: str) -> bool:
    cat = unicodedata.category(ch)
    return cat[0] in ("P", "S")


def normalize(text: str) -> str:
    """NFC-compose, lowercase, turn punctuation/symbols into spaces, collapse whitespace.

    >>> normalize("  The-Capital ")
    'the capital'
    """
    text = unicodedata.normalize("NFC", text).lower()
    text = "".join(" " if _is_punct(ch) else ch for ch in text)
    # lower() can decompose (e.g. "İ"), so compose again
    return " ".join(unicodedata.normalize("NFC", text).split())


def levenshtein(a: Sequence[Hashable], b: Sequence[Hashable], max_dist: int | None = None) -> int:
    """Unit-cost edit distance between two sequences.

    If ``max_dist`` is given the computation stops early and returns
    ``max_dist + 1`` as soon as the distance is known to exceed it.
    """
    if len(a) < len(b):
        a, b = b, a
    if max_dist is not None and len(a) - len(b) > max_dist:
        return max_dist + 1
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        if max_dist is not None and min(cur) > max_dist:
            return max_dist + 1
        prev = cur
    return prev[-1]


def similarity(a: str, b: str) -> float:
    """``1 - levenshtein / max(len)``; two empty strings are identical."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


_SOUNDEX_CODES = {
    **dict.fromkeys("bfpv", "1"),
    **dict.fromkeys("cgjkqsxz", "2"),
    **dict.fromkeys("dt", "3"),
    "l": "4",
    **dict.fromkeys("mn", "5"),
    "r": "6",
}


def soundex(word: str) -> str:
    """American Soundex code of a single token.

    Vowels (and any non-coded character) separate runs of equal codes;
    ``h`` and ``w`` do not. The first letter's own code takes part in the
    duplicate collapse, so ``"pfister"`` gives ``P236``.

    >>> soundex("berlin"), soundex("barline"), soundex("barley")
    ('B645', 'B645', 'B640')
    """
    word = word.strip().lower()
    if not word:
        raise ValueError("soundex needs a non-empty token")
    if any(ch.isspace() for ch in word):
        raise ValueError(f"soundex takes a single token, got {word!r}")
    digits = []
    last = _SOUNDEX_CODES.get(word[0])
    for ch in word[1:]:
        if ch in "hw":
            continue
        code = _SOUNDEX_CODES.get(ch)
        if code is not None and code != last:
            digits.append(code)
        last = code
    return (word[0].upper() + "".join(digits) + "000")[:4]


def form_key(form: str) -> str:
    """Phonetic key of a whole normalized form: per-token Soundex joined by spaces."""
    return " ".join(soundex(tok) for tok in form.split())
