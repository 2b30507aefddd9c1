"""Run orchestration: score the manual pool, apply the feeder, then iterate
generate -> parse -> evaluate -> rank, persisting everything as it happens.

A run directory is append-only and fully reproducible under the scripted
gateway: every file except meta/timestamps.json is byte-deterministic for
a fixed (config, manual set, dataset, script).
"""

from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .core import (
    PROPAGATION_CONCAT,
    Generation,
    PromptTemplate,
    RunConfig,
    ScoredTemplate,
    batch_stats,
)
from .dataset import DatasetError, EvalSample, TaskRecord
from .dataset import load as load_dataset
from .dataset import sample as sample_records
from .gateway import ChatGateway, ChatRequest, GatewayError, MockScriptExhausted
from .regeneration import (
    FEEDERS,
    LABEL_FEEDER,
    LABEL_MANUAL,
    TemplatePool,
    UnparseableGenerationError,
    build_meta_prompt,
    parse_generation,
    propagate_concat,
    propagate_resample,
)
from .rouge import rouge_l
from .similarity import symmetric_ratio

log = logging.getLogger(__name__)

PARSE_RETRY_ATTEMPTS = 3

METRICS_LABEL_MANUAL = "Sm"
METRICS_LABEL_FEEDER = "Sf"


class RunError(Exception):
    """A run stage failed in a way that aborts the run."""


class EvaluationError(RunError):
    """Every datapoint failed for one template."""


def metrics_labels(iterations: int) -> list[str]:
    """Row labels of metrics.csv: manual set, feeder set, then iterations."""
    return [METRICS_LABEL_MANUAL, METRICS_LABEL_FEEDER] + [str(i) for i in range(iterations)]


@dataclass
class RunState:
    """Everything a run has produced so far.

    Fields after ``config`` fill in as the pipeline advances, so a failed
    run holds exactly what was completed when it stopped.
    """

    config: RunConfig
    sample: EvalSample | None = None
    manual_pool: TemplatePool | None = None
    manual_stats: tuple[float, float, float | None] | None = None
    feeder_generation: Generation | None = None
    generations: list[Generation] = field(default_factory=list)
    status: str = "running"
    failure_reason: str | None = None
    run_dir: Path | None = None

    @property
    def feeder_pool(self) -> TemplatePool | None:
        if self.feeder_generation is None:
            return None
        return TemplatePool(self.feeder_generation.members, LABEL_FEEDER)


class _EvalCache:
    """Scores keyed by (template text, sample digest); duplicates reuse them."""

    def __init__(self):
        self._entries: dict[tuple[str, str], tuple[tuple[float, ...], bool, tuple[str | None, ...]]] = {}
        self.hits = 0

    def get(self, text: str, digest: str):
        entry = self._entries.get((text, digest))
        if entry is not None:
            self.hits += 1
        return entry

    def put(self, text: str, digest: str, scores, degraded, answers):
        self._entries[(text, digest)] = (tuple(scores), degraded, tuple(answers))


def render_task_prompt(template: PromptTemplate, record: TaskRecord) -> str:
    """Template text, then the context block, then the question block if any.

    The template text itself is never altered, whatever it contains.
    """
    parts = [template.text, f"Context:\n{record.context}"]
    if record.query is not None:
        parts.append(f"Question:\n{record.query}")
    return "\n\n".join(parts)


def _answer_record(template: PromptTemplate, record: TaskRecord,
                   gateway: ChatGateway, config: RunConfig) -> str | None:
    request = ChatRequest(
        model_name=config.model_name,
        user_text=render_task_prompt(template, record),
        temperature=config.temperature,
        max_output_tokens=config.max_answer_tokens,
    )
    try:
        return gateway.complete(request).text
    except MockScriptExhausted:
        # a drained script is a harness bug, not a transient fault: abort
        # loudly instead of degrading scores
        raise
    except GatewayError as exc:
        log.warning("template %s, record %s: gateway failure: %s",
                    template.id, record.id, exc)
        return None


def _evaluate(template: PromptTemplate, sample: EvalSample, gateway: ChatGateway,
              config: RunConfig, cache: _EvalCache | None = None,
              ) -> tuple[ScoredTemplate, tuple[str | None, ...]]:
    if cache is not None:
        hit = cache.get(template.text, sample.source_digest)
        if hit is not None:
            scores, degraded, answers = hit
            mean = sum(scores) / len(scores)
            return ScoredTemplate(template, scores, mean, degraded), answers

    if gateway.max_in_flight > 1:
        with ThreadPoolExecutor(max_workers=gateway.max_in_flight) as pool:
            answers = list(pool.map(
                lambda record: _answer_record(template, record, gateway, config),
                sample.records,
            ))
    else:
        answers = [_answer_record(template, record, gateway, config)
                   for record in sample.records]

    if all(a is None for a in answers):
        raise EvaluationError(f"template {template.id}: every datapoint failed")
    scores = tuple(
        rouge_l(answer, record.reference).f1 if answer is not None else 0.0
        for answer, record in zip(answers, sample.records)
    )
    degraded = any(a is None for a in answers)
    if degraded:
        log.warning("template %s: %d of %d datapoints failed, scored 0",
                    template.id, sum(a is None for a in answers), len(answers))
    scored = ScoredTemplate.from_scores(template, scores, degraded)
    if cache is not None:
        cache.put(template.text, sample.source_digest, scores, degraded, answers)
    return scored, tuple(answers)


def evaluate_template(template: PromptTemplate, sample: EvalSample,
                      gateway: ChatGateway, config: RunConfig) -> ScoredTemplate:
    """Score one template: answer every sampled record, take mean ROUGE-L F1.

    A record whose gateway call fails after retries scores 0 and marks the
    result degraded; if every record fails the template errors instead.
    """
    scored, _ = _evaluate(template, sample, gateway, config)
    return scored


def _select_pool(state: RunState) -> TemplatePool:
    history = [state.feeder_generation] + list(state.generations)
    if state.config.propagation_kind == PROPAGATION_CONCAT:
        return propagate_concat(history)
    return propagate_resample(history, state.config.feeder_kind, state.config.n)


def run_iteration(state: RunState, gateway: ChatGateway,
                  cache: _EvalCache | None = None) -> Generation:
    """Execute one generate/parse/evaluate/rank cycle and append the batch.

    Unparseable model output is retried with the identical meta-prompt up
    to PARSE_RETRY_ATTEMPTS times (temperature keeps resubmission useful);
    persistent failure aborts the run.
    """
    config = state.config
    if state.status != "running":
        raise RunError(f"run is {state.status}, cannot iterate")
    if state.feeder_generation is None:
        raise RunError("feeder has not produced an initial batch")
    index = len(state.generations)
    if index >= config.iterations:
        raise RunError(f"iteration {index} exceeds configured count {config.iterations}")

    pool = _select_pool(state)
    meta = build_meta_prompt(pool, config.batch_size,
                             config.meta_prompt_token_budget, config.task)
    rendered = meta.render()
    request = ChatRequest(
        model_name=config.model_name,
        user_text=rendered,
        temperature=config.temperature,
        max_output_tokens=config.max_generation_tokens,
    )

    templates = None
    raw = ""
    for attempt in range(1, PARSE_RETRY_ATTEMPTS + 1):
        raw = gateway.complete(request).text
        try:
            templates = parse_generation(raw, config.batch_size, index)
            break
        except UnparseableGenerationError:
            log.warning("iteration %d: unparseable generation (attempt %d of %d)",
                        index, attempt, PARSE_RETRY_ATTEMPTS)
    if templates is None:
        raise RunError(
            f"iteration {index}: unparseable generation after {PARSE_RETRY_ATTEMPTS} attempts"
        )

    members = []
    answers_by_id: dict[str, tuple[str | None, ...]] = {}
    for template in templates:
        scored, answers = _evaluate(template, state.sample, gateway, config, cache)
        members.append(scored)
        answers_by_id[template.id] = answers

    generation = Generation.build(index, members, symmetric_ratio)
    state.generations.append(generation)
    if state.run_dir is not None:
        _write_generation(state.run_dir, generation, answers_by_id,
                          raw_generation=raw,
                          meta_info={"exemplar_count": len(meta.exemplars),
                                     "dropped_exemplars": meta.dropped_exemplars,
                                     "pool_size": len(pool)})
        _write_metrics(state)
    log.info("iteration %d: %d templates, mean %.3f, max %.3f",
             index, len(generation.members), generation.batch_mean, generation.batch_max)
    return generation


def load_manual_templates(path: str | Path) -> list[tuple[PromptTemplate, float | None]]:
    """Read the manual templates file: JSONL records {id, text, mean_score?}.

    A supplied mean_score lets the run skip re-evaluating that template.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"{path}: no such file")
    out: list[tuple[PromptTemplate, float | None]] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise DatasetError(f"{path}:{lineno}: record is not an object")
            unknown = sorted(set(obj) - {"id", "text", "mean_score"})
            if unknown:
                raise DatasetError(f"{path}:{lineno}: unknown field(s): {', '.join(unknown)}")
            for name in ("id", "text"):
                if not isinstance(obj.get(name), str) or not obj[name].strip():
                    raise DatasetError(f"{path}:{lineno}: field {name!r} must be a non-empty string")
            if obj["id"] in seen:
                raise DatasetError(f"{path}:{lineno}: record {obj['id']!r}: duplicate id")
            seen.add(obj["id"])
            mean = obj.get("mean_score")
            if mean is not None:
                if not isinstance(mean, (int, float)) or isinstance(mean, bool) or not 0.0 <= mean <= 1.0:
                    raise DatasetError(f"{path}:{lineno}: record {obj['id']!r}: mean_score must be in [0, 1]")
                mean = float(mean)
            out.append((PromptTemplate(id=obj["id"], text=obj["text"]), mean))
    return out


def run(config: RunConfig, manual_templates: Sequence[tuple[PromptTemplate, float | None]],
        dataset_path: str | Path, gateway: ChatGateway, out_root: str | Path,
        run_name: str | None = None) -> RunState:
    """Execute a full run and persist it under a fresh directory.

    Never overwrites: an existing directory of the same name gets a
    numeric suffix. Any stage failure ends the run with status "failed"
    and the reason recorded; whatever completed stays on disk.
    """
    run_dir = _fresh_run_dir(Path(out_root), run_name or _default_run_name(config))
    (run_dir / "generations").mkdir(parents=True)
    (run_dir / "meta").mkdir()
    timestamps = {"started": _utc_now()}
    _dump_json(asdict(config), run_dir / "config.json")
    _dump_json(timestamps, run_dir / "meta" / "timestamps.json")

    state = RunState(config=config, run_dir=run_dir)
    cache = _EvalCache()
    try:
        _execute(state, manual_templates, dataset_path, gateway, cache)
        state.status = "completed"
    except Exception as exc:
        log.error("run failed: %s", exc)
        state.status = "failed"
        state.failure_reason = str(exc)
    finally:
        try:
            _write_metrics(state)
            _dump_json(_status_payload(state), run_dir / "status.json")
        except OSError as exc:
            log.error("could not persist run status: %s", exc)
            state.status = "failed"
            state.failure_reason = state.failure_reason or str(exc)
        timestamps["finished"] = _utc_now()
        _dump_json(timestamps, run_dir / "meta" / "timestamps.json")
    if cache.hits:
        log.info("evaluation cache: %d hit(s) for duplicate template texts", cache.hits)
    return state


def _execute(state: RunState, manual_templates, dataset_path, gateway, cache) -> None:
    config = state.config
    if not manual_templates:
        raise RunError("manual template set is empty")
    minimum = config.manual_pool_minimum()
    if len(manual_templates) < minimum:
        raise RunError(
            f"combo {config.combo} needs at least {minimum} manual templates, "
            f"got {len(manual_templates)}"
        )

    records = load_dataset(dataset_path, config.task)
    state.sample = sample_records(records, config.sample_size, config.seed)
    _dump_json(
        {"ids": [r.id for r in state.sample.records],
         "source_digest": state.sample.source_digest,
         "seed": state.sample.seed},
        state.run_dir / "sample.json",
    )

    scored_manual = []
    manual_answers: dict[str, tuple[str | None, ...] | None] = {}
    for template, supplied in manual_templates:
        if supplied is not None:
            scored_manual.append(ScoredTemplate(template, (), supplied))
            manual_answers[template.id] = None
        else:
            scored, answers = _evaluate(template, state.sample, gateway, config, cache)
            scored_manual.append(scored)
            manual_answers[template.id] = answers
    state.manual_pool = TemplatePool.ranked(scored_manual, LABEL_MANUAL)
    state.manual_stats = batch_stats(state.manual_pool.entries, symmetric_ratio)
    _write_manual(state, manual_answers)

    feeder = FEEDERS[config.feeder_kind](state.manual_pool, config.n)
    state.feeder_generation = Generation.build(-1, feeder.entries, symmetric_ratio)
    _write_generation(state.run_dir, state.feeder_generation, answers_by_id=None,
                      raw_generation=None, meta_info=None)
    _write_metrics(state)

    for _ in range(config.iterations):
        run_iteration(state, gateway, cache)


# --- persistence helpers ---------------------------------------------------

def _utc_now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _default_run_name(config: RunConfig) -> str:
    return f"{time.strftime('%Y%m%d-%H%M%S')}-{config.task}-{config.combo}"


def _fresh_run_dir(out_root: Path, name: str) -> Path:
    candidate = out_root / name
    suffix = 2
    while candidate.exists():
        candidate = out_root / f"{name}-{suffix}"
        suffix += 1
    return candidate


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
                    encoding="utf-8")


def _template_payload(scored: ScoredTemplate) -> dict:
    t = scored.template
    return {
        "id": t.id,
        "text": t.text,
        "origin": t.origin,
        "iteration": t.iteration,
        "point_scores": list(scored.point_scores),
        "mean_score": scored.mean_score,
        "degraded": scored.degraded,
    }


def _write_manual(state: RunState, answers_by_id) -> None:
    mean, peak, sim = state.manual_stats
    entries = []
    for scored in state.manual_pool.entries:
        payload = _template_payload(scored)
        answers = answers_by_id.get(scored.template.id)
        payload["answers"] = list(answers) if answers is not None else None
        entries.append(payload)
    _dump_json({"stats": {"mean": mean, "max": peak, "similarity": sim},
                "entries": entries},
               state.run_dir / "manual.json")


def _write_generation(run_dir: Path, generation: Generation, answers_by_id,
                      raw_generation, meta_info) -> None:
    members = []
    for scored in generation.members:
        payload = _template_payload(scored)
        if answers_by_id is not None:
            answers = answers_by_id.get(scored.template.id)
            payload["answers"] = list(answers) if answers is not None else None
        members.append(payload)
    _dump_json(
        {"index": generation.index,
         "batch_mean": generation.batch_mean,
         "batch_max": generation.batch_max,
         "batch_similarity": generation.batch_similarity,
         "members": members,
         "raw_generation": raw_generation,
         "meta_prompt": meta_info},
        run_dir / "generations" / f"{generation.index}.json",
    )


def _metric_rows(state: RunState) -> list[tuple[str, float, float, float | None]]:
    rows = []
    if state.manual_stats is not None:
        mean, peak, sim = state.manual_stats
        rows.append((METRICS_LABEL_MANUAL, mean, peak, sim))
    if state.feeder_generation is not None:
        g = state.feeder_generation
        rows.append((METRICS_LABEL_FEEDER, g.batch_mean, g.batch_max, g.batch_similarity))
    for g in state.generations:
        rows.append((str(g.index), g.batch_mean, g.batch_max, g.batch_similarity))
    return rows


def _write_metrics(state: RunState) -> None:
    if state.run_dir is None:
        return
    with (state.run_dir / "metrics.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", "mean", "max", "similarity"])
        for label, mean, peak, sim in _metric_rows(state):
            writer.writerow([label, f"{mean:.3f}", f"{peak:.3f}",
                             "" if sim is None else f"{sim:.3f}"])


def _status_payload(state: RunState) -> dict:
    return {
        "status": state.status,
        "failure_reason": state.failure_reason,
        "iterations_completed": len(state.generations),
    }
