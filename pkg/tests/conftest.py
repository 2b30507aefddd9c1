"""Shared fixtures for the test suite."""

from __future__ import annotations

import pytest

from helpers import write_jsonl


@pytest.fixture
def dataset_file(tmp_path):
    rows = [
        {"id": f"d{i}", "context": f"context body {i}", "reference": f"reference text {i}"}
        for i in range(12)
    ]
    return write_jsonl(tmp_path / "data.jsonl", rows)
