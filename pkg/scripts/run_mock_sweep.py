#!/usr/bin/env python3
"""End-to-end demo: run all four combos against a scripted gateway on a
synthetic summarisation dataset, then build the comparison report.

No network, no credentials. The scripts are constructed so each iteration's
answers track the references a little more closely, so the charts show the
upward trend the optimizer is meant to surface.
"""

from __future__ import annotations

import argparse
import json
import shutil
from pathlib import Path

from promptforge import COMBOS, RunConfig, ScriptedChatGateway, run
from promptforge.core import PromptTemplate
from promptforge.dataset import load as load_dataset
from promptforge.dataset import sample as sample_records
from promptforge.regeneration import feeder_output_size
from promptforge.report import report

RECORDS = 60
MANUAL = [
    ("m0", "Summarise the passage in one short paragraph."),
    ("m1", "Write a brief summary of the text."),
    ("m2", "Condense the document to its key points."),
    ("m3", "State the main idea in a sentence or two."),
    ("m4", "Give a terse abstract of the passage."),
    ("m5", "Reduce the text to a compact summary."),
]


def build_dataset(path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for i in range(RECORDS):
            context = (
                f"Report {i} covers the quarterly figures. Revenue moved by "
                f"{i % 9} points while costs stayed flat. Staff count reached "
                f"{100 + i}. The board expects steady growth next quarter."
            )
            reference = (
                f"report {i} shows revenue moved {i % 9} points with flat costs "
                f"and steady growth expected"
            )
            fh.write(json.dumps({"id": f"d{i:03d}", "context": context,
                                 "reference": reference}) + "\n")


def build_manual(path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for tid, text in MANUAL:
            fh.write(json.dumps({"id": tid, "text": text}) + "\n")


def build_script(config: RunConfig, dataset_path: Path) -> list[str]:
    """Responses in exact consumption order: manual evaluation, then one
    generation plus per-template answers for each iteration."""
    records = load_dataset(dataset_path, config.task)
    sampled = sample_records(records, config.sample_size, config.seed).records

    script: list[str] = []
    for m in range(len(MANUAL)):
        for record in sampled:
            words = record.reference.split()
            keep = 3 + (m % 3)
            script.append(" ".join(words[:keep]))

    for iteration in range(config.iterations):
        lines = [
            f"TEMPLATE: Summarise the passage, emphasising angle "
            f"{config.combo}-{iteration}-{j}."
            for j in range(config.batch_size)
        ]
        script.append("\n".join(lines))
        for _ in range(config.batch_size):
            for record in sampled:
                words = record.reference.split()
                keep = min(len(words), 5 + 2 * iteration)
                script.append(" ".join(words[:keep]))
    return script


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("sweep_out"))
    parser.add_argument("--iterations", type=int, default=3)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    if args.out.exists():
        shutil.rmtree(args.out)
    args.out.mkdir(parents=True)
    dataset_path = args.out / "dataset.jsonl"
    build_dataset(dataset_path)
    manual_path = args.out / "manual.jsonl"
    build_manual(manual_path)
    manual = [(PromptTemplate(id=tid, text=text), None) for tid, text in MANUAL]

    run_dirs = []
    for combo in COMBOS:
        config = RunConfig(task="summarisation", combo=combo, n=2, batch_size=4,
                           iterations=args.iterations, sample_size=5,
                           seed=args.seed)
        assert len(MANUAL) >= feeder_output_size(config.feeder_kind, config.n)
        gateway = ScriptedChatGateway(build_script(config, dataset_path))
        state = run(config, manual, dataset_path, gateway, args.out / "runs",
                    run_name=combo)
        print(f"{combo}: {state.status} -> {state.run_dir}")
        if state.status != "completed":
            raise SystemExit(f"run failed: {state.failure_reason}")
        run_dirs.append(state.run_dir)

    report_dir = args.out / "report"
    for path in report(run_dirs, report_dir):
        print(f"wrote {path}")
    print()
    print((report_dir / "summary.txt").read_text(encoding="utf-8"))


if __name__ == "__main__":
    main()
