"""Command-line surface: run the optimizer, compare runs, validate inputs,
and score text pairs.

Exit codes: 0 success, 1 usage or input-validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .core import COMBOS, TASKS, RunConfig
from .dataset import DatasetError
from .dataset import load as load_dataset
from .engine import load_manual_templates, run
from .gateway import GatewayError, HttpChatGateway, ScriptedChatGateway
from .report import ReportError, report
from .rouge import rouge_l

_DEFAULTS = {f.name: f.default for f in dataclasses.fields(RunConfig)}


class UsageError(Exception):
    """Bad flags or rejected configuration; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the contract reserves 2 for runtime
    # failures, so route usage problems through UsageError instead.
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}".rstrip())


def _build_parser() -> _Parser:
    parser = _Parser(prog="promptforge",
                     description="Iterative prompt-template optimization.")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p_run = sub.add_parser("run", help="execute one optimization run")
    p_run.add_argument("--task", required=True, choices=TASKS)
    p_run.add_argument("--combo", required=True, choices=tuple(COMBOS))
    p_run.add_argument("--manual", required=True,
                       help="manual templates file (JSONL: id, text, mean_score?)")
    p_run.add_argument("--dataset", required=True, help="dataset file (JSONL)")
    p_run.add_argument("--n", required=True, type=int,
                       help="feeder selection size")
    p_run.add_argument("--batch-size", type=int, default=_DEFAULTS["batch_size"],
                       help="templates requested per generation")
    p_run.add_argument("--iterations", type=int, default=_DEFAULTS["iterations"])
    p_run.add_argument("--sample-size", type=int, default=_DEFAULTS["sample_size"],
                       help="evaluation datapoints sampled from the dataset")
    p_run.add_argument("--seed", type=int, default=_DEFAULTS["seed"])
    p_run.add_argument("--temperature", type=float, default=_DEFAULTS["temperature"])
    p_run.add_argument("--model", default=_DEFAULTS["model_name"])
    p_run.add_argument("--endpoint", help="chat-completions base URL")
    p_run.add_argument("--mock-script",
                       help="scripted responses file (JSONL: response)")
    p_run.add_argument("--out", required=True, help="directory to create the run under")

    p_report = sub.add_parser("report", help="compare completed runs")
    p_report.add_argument("--runs", required=True, nargs="+",
                          help="run directories, one per combo")
    p_report.add_argument("--out", required=True)

    p_validate = sub.add_parser("validate", help="check a dataset or manual file")
    p_validate.add_argument("path")
    p_validate.add_argument("--kind", choices=("dataset", "manual"), default="dataset")
    p_validate.add_argument("--task", choices=TASKS,
                            help="required when validating a dataset")

    p_score = sub.add_parser("score", help="ROUGE-L between two text files")
    p_score.add_argument("candidate")
    p_score.add_argument("reference")

    return parser


def _cmd_run(args) -> int:
    if (args.endpoint is None) == (args.mock_script is None):
        raise UsageError("exactly one of --endpoint or --mock-script is required")
    try:
        config = RunConfig(
            task=args.task,
            combo=args.combo,
            n=args.n,
            batch_size=args.batch_size,
            iterations=args.iterations,
            sample_size=args.sample_size,
            temperature=args.temperature,
            model_name=args.model,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        manual = load_manual_templates(args.manual)
        if args.mock_script is not None:
            gateway = ScriptedChatGateway.from_file(args.mock_script)
        else:
            gateway = HttpChatGateway(args.endpoint)
    except (DatasetError, GatewayError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    state = run(config, manual, args.dataset, gateway, args.out)
    print(f"run directory: {state.run_dir}")
    if state.status != "completed":
        print(f"run failed: {state.failure_reason}", file=sys.stderr)
        return 2
    if state.generations:
        last = state.generations[-1]
        print(f"final iteration {last.index}: mean {last.batch_mean:.3f}, "
              f"max {last.batch_max:.3f}")
    return 0


def _cmd_report(args) -> int:
    try:
        written = report(args.runs, args.out)
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


def _cmd_validate(args) -> int:
    if args.kind == "dataset":
        if args.task is None:
            raise UsageError("--task is required when validating a dataset")
        try:
            records = load_dataset(args.path, args.task)
        except DatasetError as exc:
            print(f"invalid: {exc}", file=sys.stderr)
            return 1
        print(f"ok: {len(records)} record(s)")
    else:
        try:
            entries = load_manual_templates(args.path)
        except DatasetError as exc:
            print(f"invalid: {exc}", file=sys.stderr)
            return 1
        supplied = sum(1 for _, mean in entries if mean is not None)
        print(f"ok: {len(entries)} template(s), {supplied} with supplied scores")
    return 0


def _cmd_score(args) -> int:
    try:
        candidate = Path(args.candidate).read_text(encoding="utf-8")
        reference = Path(args.reference).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    score = rouge_l(candidate, reference)
    print(f"Precision {score.precision:.3f}")
    print(f"Recall {score.recall:.3f}")
    print(f"F1 {score.f1:.3f}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "report": _cmd_report,
    "validate": _cmd_validate,
    "score": _cmd_score,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().rstrip())
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse --help
        code = exc.code
        return code if isinstance(code, int) else 0
    except KeyboardInterrupt:
        return 2


if __name__ == "__main__":
    sys.exit(main())
