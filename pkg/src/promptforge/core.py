"""Domain types and batch primitives shared by every other module.

All types here are frozen dataclasses: once constructed they are safe to
share across threads, and every operation on them is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

TASKS = ("question_answering", "summarisation", "dialogue_summarisation")

# Combo naming follows the CLI surface: feeder variant (a/b) x propagation
# variant (a/b). Internally each combo resolves to a descriptive pair.
FEEDER_TOP = "top"
FEEDER_TOP_BOTTOM = "top_bottom"
PROPAGATION_CONCAT = "concat"
PROPAGATION_RESAMPLE = "resample"

COMBOS = {
    "faPa": (FEEDER_TOP, PROPAGATION_CONCAT),
    "fbPa": (FEEDER_TOP_BOTTOM, PROPAGATION_CONCAT),
    "faPb": (FEEDER_TOP, PROPAGATION_RESAMPLE),
    "fbPb": (FEEDER_TOP_BOTTOM, PROPAGATION_RESAMPLE),
}

# Concatenating propagation grows the meta-prompt every iteration, so runs
# using it are capped at this many iterations.
CONCAT_ITERATION_CAP = 10

_MEAN_TOL = 1e-12


@dataclass(frozen=True)
class PromptTemplate:
    """One instruction template with the task context masked out.

    ``origin`` is "manual" for human-written templates and "generated" for
    model-written ones; generated templates also carry the zero-based
    iteration they were produced in.
    """

    id: str
    text: str
    origin: str = "manual"
    iteration: int | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("template id must be non-empty")
        if not self.text.strip():
            raise ValueError(f"template {self.id!r}: text is empty")
        if self.origin == "manual":
            if self.iteration is not None:
                raise ValueError(f"template {self.id!r}: manual templates carry no iteration")
        elif self.origin == "generated":
            if self.iteration is None or self.iteration < 0:
                raise ValueError(f"template {self.id!r}: generated templates need iteration >= 0")
        else:
            raise ValueError(f"template {self.id!r}: unknown origin {self.origin!r}")


@dataclass(frozen=True)
class ScoredTemplate:
    """A template plus its per-datapoint F1 scores and their mean.

    ``point_scores`` may be empty when the mean was supplied externally
    (pre-scored manual templates); in that case the mean-consistency check
    is skipped. ``degraded`` marks templates whose evaluation lost at least
    one datapoint to a gateway failure (that point scored 0).
    """

    template: PromptTemplate
    point_scores: tuple[float, ...]
    mean_score: float
    degraded: bool = False

    def __post_init__(self):
        for s in self.point_scores:
            if not 0.0 <= s <= 1.0:
                raise ValueError(f"template {self.template.id!r}: point score {s} outside [0, 1]")
        if not 0.0 <= self.mean_score <= 1.0:
            raise ValueError(f"template {self.template.id!r}: mean score {self.mean_score} outside [0, 1]")
        if self.point_scores:
            expected = sum(self.point_scores) / len(self.point_scores)
            if abs(expected - self.mean_score) > _MEAN_TOL:
                raise ValueError(
                    f"template {self.template.id!r}: mean_score {self.mean_score} "
                    f"does not match point scores (expected {expected})"
                )

    @classmethod
    def from_scores(cls, template: PromptTemplate, point_scores: Sequence[float],
                    degraded: bool = False) -> "ScoredTemplate":
        scores = tuple(point_scores)
        if not scores:
            raise ValueError("from_scores needs at least one point score")
        return cls(template, scores, sum(scores) / len(scores), degraded)


def rank(templates: Sequence[ScoredTemplate]) -> list[ScoredTemplate]:
    """Sort templates best-first by mean score.

    The sort is stable: templates with equal means keep their input order,
    which makes every downstream sampling step reproducible.
    """
    return sorted(templates, key=lambda st: st.mean_score, reverse=True)


def batch_stats(
    members: Sequence[ScoredTemplate],
    pair_similarity: Callable[[str, str], float],
) -> tuple[float, float, float | None]:
    """Mean and max of member means, plus mean pairwise text similarity.

    Similarity averages ``pair_similarity`` over all unordered index pairs
    and is None for batches with fewer than two members (no pair exists;
    0 or 1 would bias trend plots).
    """
    if not members:
        raise ValueError("empty batch")
    means = [m.mean_score for m in members]
    mean = sum(means) / len(means)
    peak = max(means)
    if len(members) < 2:
        return mean, peak, None
    total = 0.0
    pairs = 0
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            total += pair_similarity(members[i].template.text, members[j].template.text)
            pairs += 1
    return mean, peak, total / pairs


@dataclass(frozen=True)
class Generation:
    """An ordered, scored batch of templates for one iteration.

    ``index`` is -1 for the feeder batch and 0..I-1 for model-generated
    batches. Members are kept best-first; the batch statistics must agree
    with the members they summarise.
    """

    index: int
    members: tuple[ScoredTemplate, ...]
    batch_mean: float
    batch_max: float
    batch_similarity: float | None

    def __post_init__(self):
        if self.index < -1:
            raise ValueError(f"generation index {self.index} < -1")
        if not self.members:
            raise ValueError("generation has no members")
        means = [m.mean_score for m in self.members]
        for a, b in zip(means, means[1:]):
            if b > a + _MEAN_TOL:
                raise ValueError("generation members not sorted best-first")
        if abs(self.batch_mean - sum(means) / len(means)) > _MEAN_TOL:
            raise ValueError("batch_mean does not match members")
        if abs(self.batch_max - max(means)) > _MEAN_TOL:
            raise ValueError("batch_max does not match members")
        if (self.batch_similarity is None) != (len(self.members) < 2):
            raise ValueError("batch_similarity must be absent exactly for singleton batches")

    @classmethod
    def build(cls, index: int, members: Sequence[ScoredTemplate],
              pair_similarity: Callable[[str, str], float]) -> "Generation":
        """Rank members, compute batch statistics, and assemble."""
        ordered = tuple(rank(members))
        mean, peak, sim = batch_stats(ordered, pair_similarity)
        return cls(index, ordered, mean, peak, sim)


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run, minus the input files.

    ``n`` is the feeder sample size, ``batch_size`` the number of templates
    requested per generation, ``sample_size`` the number of datapoints each
    template is scored on. ``seed`` drives datapoint sampling only; text
    generation randomness lives in the model endpoint.
    """

    task: str
    combo: str
    n: int
    batch_size: int = 10
    iterations: int = 10
    sample_size: int = 10
    temperature: float = 1.0
    model_name: str = "gpt-3.5-turbo"
    seed: int = 0
    meta_prompt_token_budget: int = 3000
    max_generation_tokens: int = 1024
    max_answer_tokens: int = 256

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if self.combo not in COMBOS:
            raise ValueError(f"unknown combo {self.combo!r}; expected one of {tuple(COMBOS)}")
        for name in ("n", "batch_size", "sample_size",
                     "meta_prompt_token_budget", "max_generation_tokens", "max_answer_tokens"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must not be negative")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.propagation_kind == PROPAGATION_CONCAT and self.iterations > CONCAT_ITERATION_CAP:
            raise ValueError(
                f"combo {self.combo}: concatenating propagation grows the meta-prompt "
                f"every iteration and is capped at {CONCAT_ITERATION_CAP} iterations "
                f"(got {self.iterations})"
            )

    @property
    def feeder_kind(self) -> str:
        return COMBOS[self.combo][0]

    @property
    def propagation_kind(self) -> str:
        return COMBOS[self.combo][1]

    def manual_pool_minimum(self) -> int:
        """Smallest manual pool the feeder precondition allows."""
        return 2 * self.n if self.feeder_kind == FEEDER_TOP_BOTTOM else self.n
