"""Synthetic instruction data generation with output ensembling."""

import json

from ._core import (
    EinstError,
    compute_stats,
    ensemble_select,
    is_novel,
    lcs_length,
    parse_instance,
    rouge_l,
    score_record,
    tokenize,
)
from ._core import build as _build
from ._core import evaluate as _evaluate


def evaluate(predictions, references):
    return json.loads(_evaluate(str(predictions), str(references)))


def build(config):
    return json.loads(_build(str(config)))


__all__ = [
    "EinstError",
    "build",
    "compute_stats",
    "ensemble_select",
    "evaluate",
    "is_novel",
    "lcs_length",
    "parse_instance",
    "rouge_l",
    "score_record",
    "tokenize",
]
