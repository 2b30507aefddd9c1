"""Task dataset loading, canonical serialization, and seeded sampling.

The on-disk format is normalized newline-delimited JSON, one record per
line with fields id/context/query/reference (query only for question
answering). Converter scripts under scripts/ turn native dataset dumps
into this format; the engine itself is dataset-agnostic.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

_FIELDS = {"id", "context", "query", "reference"}


class DatasetError(ValueError):
    """A dataset or record failed validation; message says where and why."""


@dataclass(frozen=True)
class TaskRecord:
    """One evaluation datapoint: a context, an optional query, a reference."""

    id: str
    context: str
    query: str | None
    reference: str

    def __post_init__(self):
        if not self.id:
            raise DatasetError("record id must be non-empty")
        if not self.context.strip():
            raise DatasetError(f"record {self.id!r}: context is empty")
        if not self.reference.strip():
            raise DatasetError(f"record {self.id!r}: reference is empty")
        if self.query is not None and not self.query.strip():
            raise DatasetError(f"record {self.id!r}: query is empty")


@dataclass(frozen=True)
class EvalSample:
    """The fixed evaluation subset a whole run is scored against."""

    records: tuple[TaskRecord, ...]
    source_digest: str
    seed: int

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise DatasetError("sample contains duplicate record ids")


def _parse_record(obj: object, task: str, path: str, lineno: int) -> TaskRecord:
    if not isinstance(obj, dict):
        raise DatasetError(f"{path}:{lineno}: record is not an object")
    unknown = sorted(set(obj) - _FIELDS)
    if unknown:
        raise DatasetError(f"{path}:{lineno}: unknown field(s): {', '.join(unknown)}")
    for name in ("id", "context", "reference"):
        if name not in obj:
            raise DatasetError(f"{path}:{lineno}: missing field {name!r}")
        if not isinstance(obj[name], str):
            raise DatasetError(f"{path}:{lineno}: field {name!r} must be a string")
    query = obj.get("query")
    if task == "question_answering":
        if not isinstance(query, str):
            raise DatasetError(
                f"{path}:{lineno}: record {obj['id']!r}: query is required for task {task}"
            )
    elif query is not None:
        raise DatasetError(
            f"{path}:{lineno}: record {obj['id']!r}: query not allowed for task {task}"
        )
    return TaskRecord(id=obj["id"], context=obj["context"], query=query,
                      reference=obj["reference"])


def load(path: str | Path, task: str) -> list[TaskRecord]:
    """Read all records from a normalized dataset file, in file order.

    Raises DatasetError naming the offending line or record id on the
    first problem found: missing file, malformed JSON, missing/empty or
    non-string fields, query presence violations, unknown fields, and
    duplicate ids.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"{path}: no such file")
    records: list[TaskRecord] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            record = _parse_record(obj, task, str(path), lineno)
            if record.id in seen:
                raise DatasetError(f"{path}:{lineno}: record {record.id!r}: duplicate id")
            seen.add(record.id)
            records.append(record)
    return records


def record_to_dict(record: TaskRecord) -> dict:
    out = {"id": record.id, "context": record.context, "reference": record.reference}
    if record.query is not None:
        out["query"] = record.query
    return out


def write(records: Sequence[TaskRecord], path: str | Path) -> None:
    """Serialize records to the canonical newline-delimited form."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_dict(record), sort_keys=True, ensure_ascii=False))
            fh.write("\n")


def records_digest(records: Sequence[TaskRecord]) -> str:
    """SHA-256 over the canonical serialization of the record pool."""
    h = hashlib.sha256()
    for record in records:
        h.update(json.dumps(record_to_dict(record), sort_keys=True, ensure_ascii=False).encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def sample(records: Sequence[TaskRecord], k: int, seed: int) -> EvalSample:
    """Deterministically sample k distinct records.

    A partial Fisher-Yates shuffle draws the first k positions; the PRNG
    is pinned to the Mersenne Twister behind random.Random(seed) with one
    randrange(i, len) call per position, so the same (records, k, seed)
    always yields the same sample in the same order, on any machine.
    """
    if k < 1:
        raise DatasetError(f"sample size {k} must be positive")
    if k > len(records):
        raise DatasetError(f"sample size {k} exceeds pool size {len(records)}")
    rng = random.Random(seed)
    indices = list(range(len(records)))
    for i in range(k):
        j = rng.randrange(i, len(indices))
        indices[i], indices[j] = indices[j], indices[i]
    picked = tuple(records[i] for i in indices[:k])
    return EvalSample(records=picked, source_digest=records_digest(records), seed=seed)
