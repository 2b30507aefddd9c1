#!/usr/bin/env python3
"""Convert CNN/DailyMail article data to the normalized JSONL dataset format.

Input: JSONL with one object per line carrying "article", "highlights", and
optionally "id" (the layout common to hub exports of the 3.0.0 release).
Each line becomes one summarisation record: context = article, reference =
highlights with internal newlines collapsed to spaces.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from promptforge.dataset import TaskRecord, write


def convert(source: Path, limit: int | None) -> tuple[list[TaskRecord], int]:
    records: list[TaskRecord] = []
    skipped = 0
    with source.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            if limit is not None and len(records) >= limit:
                break
            obj = json.loads(line)
            context = obj["article"].strip()
            reference = " ".join(obj["highlights"].split())
            if not context or not reference:
                skipped += 1
                continue
            records.append(TaskRecord(id=str(obj.get("id", f"line{lineno}")),
                                      context=context, query=None,
                                      reference=reference))
    return records, skipped


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("source", type=Path, help="JSONL with article/highlights")
    parser.add_argument("out", type=Path, help="normalized JSONL to write")
    parser.add_argument("--limit", type=int, help="keep at most this many records")
    args = parser.parse_args()

    records, skipped = convert(args.source, args.limit)
    write(records, args.out)
    print(f"wrote {len(records)} records to {args.out} ({skipped} skipped)")


if __name__ == "__main__":
    main()
