"""Entity-aware cloze augmentation for few-shot QA."""

import json

from ._clozeqa import (
    AugmentedSet,
    Automaton,
    EntitySpan,
    FormatError,
    Gazetteer,
    IoError,
    PromptPair,
    QAExample,
    __version__,
    aggregate,
    augment,
    load_mrqa,
    normalize_answer,
    normalize_surface,
    render_qa_prompt,
    run_cli,
    sample_few_shot,
    score_example,
    token_f1,
)
from .prompts import PromptRecord, read_prompt_pairs, split_by_kind


def augment_stats(aug_set):
    """Stats summary of an AugmentedSet as a dict."""
    return json.loads(aug_set.stats_json())


__all__ = [
    "AugmentedSet",
    "Automaton",
    "EntitySpan",
    "FormatError",
    "Gazetteer",
    "IoError",
    "PromptPair",
    "PromptRecord",
    "QAExample",
    "__version__",
    "aggregate",
    "augment",
    "augment_stats",
    "load_mrqa",
    "normalize_answer",
    "normalize_surface",
    "read_prompt_pairs",
    "render_qa_prompt",
    "run_cli",
    "sample_few_shot",
    "score_example",
    "split_by_kind",
    "token_f1",
]
