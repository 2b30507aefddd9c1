"""Iterative prompt-template optimization: score a manual pool, feed the
best exemplars to an LLM via a meta-prompt, and evolve better templates
over ranked generations."""

from .core import (
    COMBOS,
    CONCAT_ITERATION_CAP,
    FEEDER_TOP,
    FEEDER_TOP_BOTTOM,
    PROPAGATION_CONCAT,
    PROPAGATION_RESAMPLE,
    TASKS,
    Generation,
    PromptTemplate,
    RunConfig,
    ScoredTemplate,
    batch_stats,
    rank,
)
from .dataset import DatasetError, EvalSample, TaskRecord, load, sample
from .engine import (
    RunError,
    RunState,
    evaluate_template,
    load_manual_templates,
    run,
    run_iteration,
)
from .gateway import (
    AuthenticationError,
    ChatGateway,
    ChatRequest,
    ChatResponse,
    GatewayError,
    HttpChatGateway,
    RetryPolicy,
    ScriptedChatGateway,
)
from .regeneration import (
    MetaPrompt,
    TemplatePool,
    UnparseableGenerationError,
    build_meta_prompt,
    feed_top,
    feed_top_bottom,
    parse_generation,
    propagate_concat,
    propagate_resample,
)
from .report import ComparisonSeries, ReportError, improvement, report
from .rouge import RougeScore, lcs_length, rouge_l, tokenize
from .similarity import longest_matching_block, ratio, symmetric_ratio

__version__ = "0.1.0"

__all__ = [
    "COMBOS",
    "CONCAT_ITERATION_CAP",
    "FEEDER_TOP",
    "FEEDER_TOP_BOTTOM",
    "PROPAGATION_CONCAT",
    "PROPAGATION_RESAMPLE",
    "TASKS",
    "AuthenticationError",
    "ChatGateway",
    "ChatRequest",
    "ChatResponse",
    "ComparisonSeries",
    "DatasetError",
    "EvalSample",
    "Generation",
    "GatewayError",
    "HttpChatGateway",
    "MetaPrompt",
    "PromptTemplate",
    "ReportError",
    "RetryPolicy",
    "RougeScore",
    "RunConfig",
    "RunError",
    "RunState",
    "ScoredTemplate",
    "ScriptedChatGateway",
    "TaskRecord",
    "TemplatePool",
    "UnparseableGenerationError",
    "batch_stats",
    "build_meta_prompt",
    "evaluate_template",
    "feed_top",
    "feed_top_bottom",
    "improvement",
    "lcs_length",
    "load",
    "load_manual_templates",
    "longest_matching_block",
    "parse_generation",
    "propagate_concat",
    "propagate_resample",
    "rank",
    "ratio",
    "report",
    "rouge_l",
    "run",
    "run_iteration",
    "sample",
    "symmetric_ratio",
    "tokenize",
]
