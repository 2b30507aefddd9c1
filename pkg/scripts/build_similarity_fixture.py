#!/usr/bin/env python3
"""Regenerate tests/fixtures/similarity_pairs.json.

Reference values come from difflib.SequenceMatcher with junk filtering off,
an independent implementation of the same matching rule. They are computed
once here and frozen; the test suite never imports difflib for these pairs.
"""

from __future__ import annotations

import argparse
import difflib
import json
import random
import string
from pathlib import Path

HAND_PICKED = [
    ("abcd", "bcde"),
    ("", ""),
    ("a", ""),
    ("", "b"),
    ("abc", "abc"),
    ("abab", "baba"),
    ("aa", "aaa"),
    ("abcabc", "bca"),
    ("xyz", "abc"),
    ("the quick brown fox", "the quick brown dog"),
]

RANDOM_PAIRS = 40
SEED = 20260822


def random_pairs(rng: random.Random) -> list[tuple[str, str]]:
    pairs = []
    for _ in range(RANDOM_PAIRS):
        alphabet = rng.choice(["ab", "abc", string.ascii_lowercase[:6], "abcde "])
        la, lb = rng.randint(0, 30), rng.randint(0, 30)
        a = "".join(rng.choice(alphabet) for _ in range(la))
        b = "".join(rng.choice(alphabet) for _ in range(lb))
        pairs.append((a, b))
    return pairs


def reference_entry(a: str, b: str) -> dict:
    forward = difflib.SequenceMatcher(None, a, b, autojunk=False)
    backward = difflib.SequenceMatcher(None, b, a, autojunk=False)
    block = forward.find_longest_match(0, len(a), 0, len(b))
    return {
        "a": a,
        "b": b,
        "block": [block.a, block.b, block.size],
        "ratio": forward.ratio(),
        "symmetric_ratio": (forward.ratio() + backward.ratio()) / 2.0,
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    default_out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "similarity_pairs.json"
    parser.add_argument("--out", type=Path, default=default_out)
    args = parser.parse_args()

    pairs = HAND_PICKED + random_pairs(random.Random(SEED))
    entries = [reference_entry(a, b) for a, b in pairs]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(entries, indent=2, ensure_ascii=False) + "\n",
                        encoding="utf-8")
    print(f"wrote {len(entries)} pairs to {args.out}")


if __name__ == "__main__":
    main()
