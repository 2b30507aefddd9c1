#!/usr/bin/env python3
"""Convert a SAMSum dialogue corpus file to the normalized JSONL format.

Input: a JSON array of objects with "id", "dialogue", "summary" (the layout
of the corpus distribution). Each entry becomes one dialogue-summarisation
record: context = dialogue transcript, reference = summary.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from promptforge.dataset import TaskRecord, write


def convert(source: Path, limit: int | None) -> tuple[list[TaskRecord], int]:
    entries = json.loads(source.read_text(encoding="utf-8"))
    records: list[TaskRecord] = []
    skipped = 0
    for entry in entries:
        if limit is not None and len(records) >= limit:
            break
        context = entry["dialogue"].strip()
        reference = entry["summary"].strip()
        if not context or not reference:
            skipped += 1
            continue
        records.append(TaskRecord(id=str(entry["id"]), context=context,
                                  query=None, reference=reference))
    return records, skipped


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("source", type=Path, help="SAMSum JSON array file")
    parser.add_argument("out", type=Path, help="normalized JSONL to write")
    parser.add_argument("--limit", type=int, help="keep at most this many records")
    args = parser.parse_args()

    records, skipped = convert(args.source, args.limit)
    write(records, args.out)
    print(f"wrote {len(records)} records to {args.out} ({skipped} skipped)")


if __name__ == "__main__":
    main()
