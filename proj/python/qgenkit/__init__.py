"""Synthetic query-document training data: generation, filtering, evaluation.

The heavy lifting lives in the `_core` extension module; this package
re-exports its surface and adds small conveniences for config handling.
"""

import json as _json

from qgenkit._core import (
    BackendError,
    Bm25Index,
    ConfigError,
    DataError,
    Document,
    __version__,
    evaluate,
    generate,
    load_corpus,
    ndcg_at_k,
    parse_completion,
    predict_relevance,
    render_prompt,
    sample_documents,
    save_corpus,
    stats_table,
    tokenize,
    train_model,
)

__all__ = [
    "BackendError",
    "Bm25Index",
    "ConfigError",
    "DataError",
    "Document",
    "__version__",
    "evaluate",
    "generate",
    "generate_with_config",
    "load_corpus",
    "ndcg_at_k",
    "parse_completion",
    "predict_relevance",
    "render_prompt",
    "sample_documents",
    "save_corpus",
    "stats_table",
    "tokenize",
    "train_model",
]


def generate_with_config(config: dict) -> dict:
    """Run the generation pipeline from a config dict instead of JSON text."""
    return generate(_json.dumps(config))
