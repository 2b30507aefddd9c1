"""Exemplar sampling, meta-prompt construction, and generation parsing.

Two feeder rules pick the initial exemplars from the manual pool (the top
slice, or the top and bottom slices together); two propagation rules pick
exemplars for later iterations (the whole concatenated history, or a
feeder-style resample of it). The meta-prompt wraps the chosen exemplars,
scores attached, under a fixed instruction asset.
"""

from __future__ import annotations

import importlib.resources
import logging
import re
from dataclasses import dataclass
from typing import Sequence

from .core import (
    FEEDER_TOP,
    FEEDER_TOP_BOTTOM,
    Generation,
    PromptTemplate,
    ScoredTemplate,
    rank,
)
from .gateway import estimate_tokens

log = logging.getLogger(__name__)

LABEL_MANUAL = "manual"
LABEL_FEEDER = "feeder"
LABEL_CUMULATIVE = "cumulative"

_MEAN_TOL = 1e-12


class UnparseableGenerationError(ValueError):
    """The model output contained no extractable templates."""


@dataclass(frozen=True)
class TemplatePool:
    """An ordered set of scored templates, best first, unique ids."""

    entries: tuple[ScoredTemplate, ...]
    label: str

    def __post_init__(self):
        means = [e.mean_score for e in self.entries]
        for a, b in zip(means, means[1:]):
            if b > a + _MEAN_TOL:
                raise ValueError(f"pool {self.label!r}: entries not sorted best-first")
        ids = [e.template.id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError(f"pool {self.label!r}: duplicate template ids")

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def ranked(cls, entries: Sequence[ScoredTemplate], label: str) -> "TemplatePool":
        return cls(tuple(rank(entries)), label)


def feed_top(pool: TemplatePool, n: int) -> TemplatePool:
    """The n best-scoring templates of the pool, order preserved."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > len(pool):
        raise ValueError(f"feeder needs n={n} templates but pool has {len(pool)}")
    return TemplatePool(pool.entries[:n], LABEL_FEEDER)


def feed_top_bottom(pool: TemplatePool, n: int) -> TemplatePool:
    """The n best plus the n worst templates, still in descending order.

    Requires 2n <= pool size so the two slices cannot overlap.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if 2 * n > len(pool):
        raise ValueError(f"feeder needs 2n={2 * n} templates but pool has {len(pool)}")
    return TemplatePool(pool.entries[:n] + pool.entries[len(pool) - n:], LABEL_FEEDER)


FEEDERS = {FEEDER_TOP: feed_top, FEEDER_TOP_BOTTOM: feed_top_bottom}


def feeder_output_size(feeder_kind: str, n: int) -> int:
    return 2 * n if feeder_kind == FEEDER_TOP_BOTTOM else n


def propagate_concat(history: Sequence[Generation]) -> TemplatePool:
    """Every template seen so far, deduplicated by text, globally re-ranked.

    A text appearing more than once keeps its highest score: the pool is
    meant to show what each wording is capable of.
    """
    if not history:
        raise ValueError("history is empty")
    best: dict[str, ScoredTemplate] = {}
    for generation in history:
        for member in generation.members:
            held = best.get(member.template.text)
            if held is None or member.mean_score > held.mean_score:
                best[member.template.text] = member
    return TemplatePool.ranked(list(best.values()), LABEL_CUMULATIVE)


def propagate_resample(history: Sequence[Generation], feeder_kind: str, n: int) -> TemplatePool:
    """Apply the run's feeder rule to the cumulative deduplicated pool."""
    return FEEDERS[feeder_kind](propagate_concat(history), n)


@dataclass(frozen=True)
class MetaPrompt:
    """A rendered request for new templates: instruction plus scored exemplars."""

    instruction_text: str
    exemplars: tuple[tuple[str, float], ...]
    requested_count: int
    dropped_exemplars: int = 0

    def render(self) -> str:
        blocks = [self.instruction_text.rstrip("\n")]
        for text, score in self.exemplars:
            blocks.append(f"SCORE: {score:.3f}\nPROMPT: {text}")
        return "\n\n".join(blocks)


_TASK_PHRASES = {
    "question_answering": "question answering over a provided context",
    "summarisation": "document summarisation",
    "dialogue_summarisation": "dialogue summarisation",
}


def _instruction_asset() -> str:
    return (
        importlib.resources.files("promptforge")
        .joinpath("assets/meta_prompt_instruction.txt")
        .read_text(encoding="utf-8")
    )


def build_meta_prompt(pool: TemplatePool, requested_count: int, budget: int,
                      task: str) -> MetaPrompt:
    """Assemble the meta-prompt for one generation call.

    Exemplars appear best to worst. If the rendered prompt would exceed the
    token budget, the lowest-ranked exemplars are dropped (never the
    instruction) until it fits; at least one exemplar must survive.
    """
    if not pool.entries:
        raise ValueError("exemplar pool is empty")
    instruction = _instruction_asset().format(
        task=_TASK_PHRASES.get(task, task), count=requested_count
    )
    exemplars = [(e.template.text, e.mean_score) for e in pool.entries]
    kept = len(exemplars)
    while kept >= 1:
        prompt = MetaPrompt(instruction, tuple(exemplars[:kept]), requested_count,
                            dropped_exemplars=len(exemplars) - kept)
        if estimate_tokens(prompt.render()) <= budget:
            if prompt.dropped_exemplars:
                log.info("meta-prompt over budget: dropped %d of %d exemplars",
                         prompt.dropped_exemplars, len(exemplars))
            return prompt
        kept -= 1
    raise ValueError(
        f"token budget {budget} cannot fit the instruction plus one exemplar"
    )


_LIST_LINE = re.compile(r"^(?:\d+[.)]|-)\s+(.*)$")


def parse_generation(raw: str, requested_count: int, iteration: int) -> list[PromptTemplate]:
    """Extract templates from a model response.

    Primary format is one template per line prefixed TEMPLATE:; when no
    such line exists, numbered or dashed list lines are accepted instead.
    Empty texts and exact duplicates are dropped, and at most
    requested_count templates are returned, tagged with the iteration that
    produced them.
    """
    lines = [line.strip() for line in raw.splitlines()]
    texts = [line[len("TEMPLATE:"):].strip() for line in lines if line.startswith("TEMPLATE:")]
    if not texts:
        for line in lines:
            m = _LIST_LINE.match(line)
            if m:
                texts.append(m.group(1).strip())
    unique: list[str] = []
    seen: set[str] = set()
    for text in texts:
        if text and text not in seen:
            seen.add(text)
            unique.append(text)
    dropped = len(texts) - len(unique)
    if dropped:
        log.info("generation %d: dropped %d empty or duplicate template line(s)",
                 iteration, dropped)
    if not unique:
        raise UnparseableGenerationError("unparseable generation")
    return [
        PromptTemplate(id=f"gen{iteration}.{pos}", text=text, origin="generated",
                       iteration=iteration)
        for pos, text in enumerate(unique[:requested_count])
    ]


def render_templates(templates: Sequence[PromptTemplate]) -> str:
    """The declared output format: one TEMPLATE: line per template."""
    return "\n".join(f"TEMPLATE: {t.text}" for t in templates)
