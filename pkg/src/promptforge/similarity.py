"""Ratcliff/Obershelp similarity over character sequences.

Own implementation of the classic matching-block recursion: find the
longest contiguous block common to both strings, then recurse on the
pieces to its left and right; the ratio is 2*M/(len(a)+len(b)) where M is
the total matched mass. Character-level, and with no junk or popularity
heuristic of any kind: prompts are short and determinism matters more
than large-input speed.

The raw ratio is order-sensitive (ratio(a, b) and ratio(b, a) can differ),
so batch diversity always uses ``symmetric_ratio``, the mean of both
orders, which is symmetric by construction.
"""

from __future__ import annotations


def longest_matching_block(
    a: str,
    b: str,
    a_lo: int = 0,
    a_hi: int | None = None,
    b_lo: int = 0,
    b_hi: int | None = None,
) -> tuple[int, int, int]:
    """Longest contiguous block common to a[a_lo:a_hi] and b[b_lo:b_hi].

    Returns (a_start, b_start, length). Among equal-length blocks the one
    with the smallest a_start wins, then the smallest b_start. Length 0
    (anchored at the range starts) means no common character.
    """
    if a_hi is None:
        a_hi = len(a)
    if b_hi is None:
        b_hi = len(b)
    b_positions: dict[str, list[int]] = {}
    for j in range(b_lo, b_hi):
        b_positions.setdefault(b[j], []).append(j)

    best_i, best_j, best_size = a_lo, b_lo, 0
    # run_ending[j] = length of the common run ending at a[i], b[j]
    run_ending: dict[int, int] = {}
    for i in range(a_lo, a_hi):
        new_run: dict[int, int] = {}
        for j in b_positions.get(a[i], ()):
            k = run_ending.get(j - 1, 0) + 1
            new_run[j] = k
            if k > best_size:
                best_i, best_j, best_size = i - k + 1, j - k + 1, k
        run_ending = new_run
    return best_i, best_j, best_size


def _total_matched(a: str, b: str) -> int:
    """Total matched mass M: block length summed over the full recursion."""
    total = 0
    queue = [(0, len(a), 0, len(b))]
    while queue:
        a_lo, a_hi, b_lo, b_hi = queue.pop()
        i, j, k = longest_matching_block(a, b, a_lo, a_hi, b_lo, b_hi)
        if k == 0:
            continue
        total += k
        queue.append((a_lo, i, b_lo, j))
        queue.append((i + k, a_hi, j + k, b_hi))
    return total


def ratio(a: str, b: str) -> float:
    """Similarity of a to b in [0, 1]; 1.0 when both strings are empty."""
    length = len(a) + len(b)
    if length == 0:
        return 1.0
    return 2.0 * _total_matched(a, b) / length


def symmetric_ratio(a: str, b: str) -> float:
    """Order-independent similarity: mean of ratio(a, b) and ratio(b, a)."""
    return (ratio(a, b) + ratio(b, a)) / 2.0
