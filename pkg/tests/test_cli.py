import json

import pytest

from helpers import write_jsonl
from promptforge.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def manual_file(tmp_path):
    return write_jsonl(tmp_path / "manual.jsonl", [
        {"id": f"m{i}", "text": f"Manual instruction {i}.", "mean_score": 0.2 + i * 0.1}
        for i in range(4)
    ])


@pytest.fixture
def mock_run_inputs(tmp_path, manual_file, dataset_file):
    script = []
    for i in range(2):
        script.append("\n".join(f"TEMPLATE: Wording {i}-{j}." for j in range(2)))
        script += ["reference text 1"] * 4
    script_file = write_jsonl(tmp_path / "script.jsonl",
                              [{"response": r} for r in script])
    return manual_file, dataset_file, script_file


class TestUsageErrors:
    def test_no_command(self, capsys):
        code, _, err = run_cli(capsys)
        assert code == 1
        assert "usage" in err

    def test_unknown_command(self, capsys):
        code, _, err = run_cli(capsys, "frobnicate")
        assert code == 1

    def test_unknown_flag(self, capsys):
        code, _, err = run_cli(capsys, "score", "--wat", "a", "b")
        assert code == 1
        assert "error" in err

    def test_missing_required_flag(self, capsys):
        code, _, err = run_cli(capsys, "run", "--task", "summarisation")
        assert code == 1

    def test_help_exits_zero(self, capsys):
        code, out, _ = run_cli(capsys, "--help")
        assert code == 0
        assert "promptforge" in out

    def test_bad_choice(self, capsys):
        code, _, err = run_cli(capsys, "validate", "x.jsonl", "--task", "poetry")
        assert code == 1


class TestValidate:
    def test_dataset_ok(self, capsys, dataset_file):
        code, out, _ = run_cli(capsys, "validate", str(dataset_file),
                               "--task", "summarisation")
        assert code == 0
        assert "12 record(s)" in out

    def test_dataset_requires_task_flag(self, capsys, dataset_file):
        code, _, err = run_cli(capsys, "validate", str(dataset_file))
        assert code == 1
        assert "--task" in err

    def test_dataset_error_names_line(self, capsys, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a", "context": "c", "reference": "r"}\n{oops\n')
        code, _, err = run_cli(capsys, "validate", str(path), "--task", "summarisation")
        assert code == 1
        assert "bad.jsonl:2" in err

    def test_manual_ok(self, capsys, manual_file):
        code, out, _ = run_cli(capsys, "validate", str(manual_file), "--kind", "manual")
        assert code == 0
        assert "4 template(s), 4 with supplied scores" in out

    def test_manual_invalid(self, capsys, tmp_path):
        path = write_jsonl(tmp_path / "manual.jsonl", [{"id": "a", "text": ""}])
        code, _, err = run_cli(capsys, "validate", str(path), "--kind", "manual")
        assert code == 1
        assert "invalid" in err


class TestScore:
    def test_identical_files(self, capsys, tmp_path):
        path = tmp_path / "a.txt"
        path.write_text("The quick brown fox jumps over the dog.")
        code, out, _ = run_cli(capsys, "score", str(path), str(path))
        assert code == 0
        assert "F1 1.000" in out
        assert "Precision 1.000" in out
        assert "Recall 1.000" in out

    def test_partial_overlap(self, capsys, tmp_path):
        cand = tmp_path / "cand.txt"
        ref = tmp_path / "ref.txt"
        cand.write_text("the cat sat")
        ref.write_text("the cat was sat")
        code, out, _ = run_cli(capsys, "score", str(cand), str(ref))
        assert code == 0
        assert "Precision 1.000" in out
        assert "Recall 0.750" in out
        assert "F1 0.857" in out

    def test_missing_file_is_runtime_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "score", str(tmp_path / "a.txt"),
                               str(tmp_path / "b.txt"))
        assert code == 2


class TestRun:
    def test_concat_cap_rejected_at_validation(self, capsys, manual_file, dataset_file, tmp_path):
        code, _, err = run_cli(
            capsys, "run", "--task", "summarisation", "--combo", "faPa",
            "--manual", str(manual_file), "--dataset", str(dataset_file),
            "--n", "1", "--iterations", "11", "--mock-script", "unused.jsonl",
            "--out", str(tmp_path / "runs"),
        )
        assert code == 1
        assert "capped at 10" in err

    def test_endpoint_and_mock_mutually_exclusive(self, capsys, manual_file,
                                                  dataset_file, tmp_path):
        base = ["run", "--task", "summarisation", "--combo", "faPb",
                "--manual", str(manual_file), "--dataset", str(dataset_file),
                "--n", "1", "--out", str(tmp_path / "runs")]
        code, _, err = run_cli(capsys, *base)
        assert code == 1
        assert "--endpoint or --mock-script" in err
        code, _, err = run_cli(capsys, *base, "--endpoint", "http://x",
                               "--mock-script", "y.jsonl")
        assert code == 1

    def test_missing_mock_script_is_runtime_error(self, capsys, manual_file,
                                                  dataset_file, tmp_path):
        code, _, err = run_cli(
            capsys, "run", "--task", "summarisation", "--combo", "faPb",
            "--manual", str(manual_file), "--dataset", str(dataset_file),
            "--n", "1", "--mock-script", str(tmp_path / "absent.jsonl"),
            "--out", str(tmp_path / "runs"),
        )
        assert code == 2
        assert "no such mock script" in err

    def test_successful_mock_run(self, capsys, mock_run_inputs, tmp_path):
        manual_file, dataset_file, script_file = mock_run_inputs
        code, out, err = run_cli(
            capsys, "run", "--task", "summarisation", "--combo", "faPb",
            "--manual", str(manual_file), "--dataset", str(dataset_file),
            "--n", "1", "--batch-size", "2", "--iterations", "2",
            "--sample-size", "2", "--seed", "3",
            "--mock-script", str(script_file), "--out", str(tmp_path / "runs"),
        )
        assert code == 0, err
        assert "run directory:" in out
        assert "final iteration 1:" in out

    def test_failed_run_is_runtime_error(self, capsys, manual_file, dataset_file,
                                         tmp_path):
        script_file = write_jsonl(tmp_path / "script.jsonl",
                                  [{"response": "unparseable chatter"}] * 3)
        code, _, err = run_cli(
            capsys, "run", "--task", "summarisation", "--combo", "faPb",
            "--manual", str(manual_file), "--dataset", str(dataset_file),
            "--n", "1", "--iterations", "1", "--sample-size", "2",
            "--mock-script", str(script_file), "--out", str(tmp_path / "runs"),
        )
        assert code == 2
        assert "run failed" in err


class TestReportCommand:
    def test_report_over_cli_run(self, capsys, mock_run_inputs, tmp_path):
        manual_file, dataset_file, script_file = mock_run_inputs
        code, out, _ = run_cli(
            capsys, "run", "--task", "summarisation", "--combo", "fbPb",
            "--manual", str(manual_file), "--dataset", str(dataset_file),
            "--n", "1", "--batch-size", "2", "--iterations", "2",
            "--sample-size", "2", "--mock-script", str(script_file),
            "--out", str(tmp_path / "runs"),
        )
        assert code == 0
        run_dir = next(line for line in out.splitlines()
                       if line.startswith("run directory:")).split(": ", 1)[1]
        code, out, _ = run_cli(capsys, "report", "--runs", run_dir,
                               "--out", str(tmp_path / "report"))
        assert code == 0
        assert (tmp_path / "report" / "summary.txt").is_file()
        assert "summary.txt" in out

    def test_bad_run_dir_is_runtime_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "report", "--runs", str(tmp_path / "nope"),
                               "--out", str(tmp_path / "report"))
        assert code == 2
        assert "error" in err
