#!/usr/bin/env python3
"""Convert a SQuAD v1.1/v2.0 JSON file to the normalized JSONL dataset format.

Input: the official nested layout (data -> paragraphs -> qas). Each answerable
question becomes one record: context = paragraph text, query = question,
reference = first answer span. Unanswerable v2.0 questions are skipped.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from promptforge.dataset import TaskRecord, write


def convert(source: Path, limit: int | None) -> tuple[list[TaskRecord], int]:
    payload = json.loads(source.read_text(encoding="utf-8"))
    records: list[TaskRecord] = []
    skipped = 0
    for article in payload["data"]:
        for paragraph in article["paragraphs"]:
            context = paragraph["context"].strip()
            for qa in paragraph["qas"]:
                if limit is not None and len(records) >= limit:
                    return records, skipped
                answers = qa.get("answers") or []
                if qa.get("is_impossible") or not answers:
                    skipped += 1
                    continue
                reference = answers[0]["text"].strip()
                if not context or not reference:
                    skipped += 1
                    continue
                records.append(TaskRecord(id=str(qa["id"]), context=context,
                                          query=qa["question"].strip(),
                                          reference=reference))
    return records, skipped


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("source", type=Path, help="SQuAD JSON file")
    parser.add_argument("out", type=Path, help="normalized JSONL to write")
    parser.add_argument("--limit", type=int, help="keep at most this many records")
    args = parser.parse_args()

    records, skipped = convert(args.source, args.limit)
    write(records, args.out)
    print(f"wrote {len(records)} records to {args.out} ({skipped} skipped)")


if __name__ == "__main__":
    main()
