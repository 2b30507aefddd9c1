"""Builders shared across test modules."""

from __future__ import annotations

import json
from pathlib import Path

from promptforge.core import PromptTemplate, ScoredTemplate
from promptforge.dataset import TaskRecord

FIXTURES = Path(__file__).parent / "fixtures"


def make_records(count: int, task: str = "summarisation", prefix: str = "r") -> list[TaskRecord]:
    query = task == "question_answering"
    return [
        TaskRecord(
            id=f"{prefix}{i:03d}",
            context=f"context passage number {i} with several words",
            query=f"what does item {i} say?" if query else None,
            reference=f"reference answer text {i}",
        )
        for i in range(count)
    ]


def write_jsonl(path: Path, rows) -> Path:
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path


def scored(tid: str, mean: float, text: str | None = None, points: int = 2) -> ScoredTemplate:
    template = PromptTemplate(id=tid, text=text or f"template text {tid}")
    return ScoredTemplate(template, (mean,) * points, mean)
