"""Seeded word-level noisy channel standing in for a real recognizer.

Randomness comes from SplitMix64 so the same seed gives the same corruption
on every platform and in every language that implements the generator:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)                      (all mod 2**64)

A uniform float is the top 53 bits times 2**-53. ``corrupt`` draws exactly
three floats per reference token (operation, insert?, insert choice) so that
channels sharing a seed stay coupled when only the rates change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .corrector import Hypothesis, NBestList
from .strings import levenshtein, soundex

__all__ = ["SplitMix64", "ErrorModel", "derive_seed", "confusable", "corrupt", "generate_nbest"]

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, n: int) -> int:
        return min(n - 1, int(self.random() * n))


def derive_seed(seed: int, index: int) -> int:
    """Independent per-item seed, e.g. one per corpus sentence."""
    return SplitMix64((seed & _MASK) ^ ((index * 0xD1B54A32D192ED03) & _MASK)).next_u64()


def _key(word: str) -> str | None:
    try:
        return soundex(word)
    except ValueError:
        return None


def confusable(word: str, vocabulary: Iterable[str]) -> str:
    """Most similar-sounding other vocabulary token.

    Same Soundex key first, then fewest character edits, then alphabetical.
    Returns ``word`` itself when the vocabulary offers nothing else.
    """
    key = _key(word)
    best = None
    for tok in vocabulary:
        if tok == word:
            continue
        rank = (_key(tok) != key, levenshtein(word, tok), tok)
        if best is None or rank < best:
            best = rank
    return word if best is None else best[2]


@dataclass(frozen=True)
class ErrorModel:
    p_sub: float = 0.0
    p_del: float = 0.0
    p_ins: float = 0.0
    vocabulary: frozenset[str] = frozenset()
    seed: int = 0

    def __post_init__(self):
        for name in ("p_sub", "p_del", "p_ins"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.p_sub + self.p_del > 1.0 + 1e-12:
            raise ValueError("p_sub + p_del must not exceed 1")
        if not self.vocabulary and (self.p_sub > 0 or self.p_ins > 0):
            raise ValueError("substitutions and insertions need a vocabulary")
        object.__setattr__(self, "vocabulary", frozenset(self.vocabulary))

    @classmethod
    def from_rate(
        cls, rate: float, vocabulary: Iterable[str], seed: int = 0, calibrate: bool = True
    ) -> ErrorModel:
        """Split a target error rate evenly over substitution, deletion and insertion.

        A deletion next to an insertion is scored as one substitution by a
        minimal alignment, so the measured WER of an even split ``p`` is about
        ``3p - 2p**2``. With ``calibrate`` the per-operation rate solves
        that for ``rate``; without it each operation gets ``rate / 3``.
        """
        if not 0.0 <= rate <= 1.0:
            raise ValueError("rate must lie in [0, 1]")
        p = (3.0 - math.sqrt(9.0 - 8.0 * rate)) / 4.0 if calibrate else rate / 3.0
        return cls(p, p, p, frozenset(vocabulary), seed)

    def with_seed(self, seed: int) -> ErrorModel:
        return ErrorModel(self.p_sub, self.p_del, self.p_ins, self.vocabulary, seed)

    @cached_property
    def sorted_vocabulary(self) -> tuple[str, ...]:
        return tuple(sorted(self.vocabulary))

    @cached_property
    def _confusions(self) -> dict[str, str]:
        return {}

    def confusable(self, word: str) -> str:
        table = self._confusions
        if word not in table:
            table[word] = confusable(word, self.sorted_vocabulary)
        return table[word]


def corrupt(tokens: Sequence[str], model: ErrorModel) -> list[str]:
    rng = SplitMix64(model.seed)
    vocab = model.sorted_vocabulary
    out = []
    for tok in tokens:
        op, ins, pick = rng.random(), rng.random(), rng.random()
        if op < model.p_sub:
            out.append(model.confusable(tok))
        elif op >= model.p_sub + model.p_del:
            out.append(tok)
        if ins < model.p_ins:
            out.append(vocab[min(len(vocab) - 1, int(pick * len(vocab)))])
    return out


def generate_nbest(tokens: Sequence[str], model: ErrorModel, n: int, utt_id: str = "utt") -> NBestList:
    """``n`` corruptions (seeds ``seed + 1 .. seed + n``) ranked by token accuracy."""
    if n < 1:
        raise ValueError("n must be at least 1")
    ref = list(tokens)
    hyps = []
    for k in range(1, n + 1):
        hyp = corrupt(ref, model.with_seed(model.seed + k))
        score = 1.0 - levenshtein(ref, hyp) / max(1, len(ref))
        hyps.append((score, k, " ".join(hyp)))
    hyps.sort(key=lambda h: (-h[0], h[1]))
    return NBestList(
        utt_id, tuple(Hypothesis(utt_id, rank, score, text) for rank, (score, _, text) in enumerate(hyps, 1))
    )
