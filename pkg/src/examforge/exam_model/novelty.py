"""N-gram overlap scoring for generated items; lower means more novel."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence

from .types import ExamItem


def _ngrams(text: str, n: int) -> Counter:
    tokens = text.lower().split()
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def ngram_jaccard(a: str, b: str, n: int) -> float:
    """Multiset Jaccard similarity of the n-gram profiles of two texts.

    Both profiles empty (texts shorter than n tokens) counts as identical.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    grams_a, grams_b = _ngrams(a, n), _ngrams(b, n)
    union = sum((grams_a | grams_b).values())
    if union == 0:
        return 1.0
    inter = sum((grams_a & grams_b).values())
    return inter / union


def novelty_overlap(
    item: ExamItem,
    bank: Sequence[ExamItem] | Iterable[str],
    n: int = 3,
) -> float:
    """Percentage overlap of an item's stem with the closest bank stem.

    Returns 100 * max Jaccard similarity of whitespace-token n-gram multisets
    (lowercased). The bank may hold items or raw stem strings; an empty bank
    overlaps nothing and returns 0.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not item.stem:
        raise ValueError("item stem must be non-empty")
    best = 0.0
    for entry in bank:
        stem = entry.stem if isinstance(entry, ExamItem) else entry
        if not stem:
            raise ValueError("bank stems must be non-empty")
        best = max(best, ngram_jaccard(item.stem, stem, n))
    return 100.0 * best
