"""ROUGE-L precision/recall/F1 over token longest common subsequences.

Tokenization is deliberately pinned rather than configurable: it is the
dominant source of score drift between ROUGE implementations. The rule is
lowercase, map every character that is neither alphanumeric nor whitespace
to a space, split on whitespace. No stemming, no stopword removal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    def __post_init__(self):
        for v in (self.precision, self.recall, self.f1):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"score component {v} outside [0, 1]")


def tokenize(text: str) -> list[str]:
    """Lowercase, strip punctuation to spaces, split on whitespace runs."""
    lowered = text.lower()
    cleaned = "".join(ch if ch.isalnum() or ch.isspace() else " " for ch in lowered)
    return cleaned.split()


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence of two token sequences.

    Two-row dynamic programming; references here are short answers and
    summaries, so quadratic time is ample.
    """
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    cur = [0] * (len(b) + 1)
    for x in a:
        for j, y in enumerate(b, start=1):
            if x == y:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = prev[j] if prev[j] >= cur[j - 1] else cur[j - 1]
        prev, cur = cur, prev
    return prev[len(b)]


def rouge_l(candidate: str, reference: str) -> RougeScore:
    """ROUGE-L of a candidate text against a single reference text.

    precision = LCS / |candidate tokens|, recall = LCS / |reference tokens|,
    F1 their harmonic mean (beta = 1). Empty sides score 0, never error.
    """
    cand = tokenize(candidate)
    ref = tokenize(reference)
    lcs = lcs_length(cand, ref)
    precision = lcs / len(cand) if cand else 0.0
    recall = lcs / len(ref) if ref else 0.0
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
    return RougeScore(precision, recall, f1)
