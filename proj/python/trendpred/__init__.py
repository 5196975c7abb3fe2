"""Near-future popularity prediction on timestamped user-item logs."""

from ._core import (
    ContractError,
    EmptyInputError,
    Error,
    InteractionLog,
    ParseError,
    RangeError,
    ScoreTable,
    TemporalIndex,
    __version__,
    evaluate,
    generate,
    parse_events,
    preprocess,
    rank_top_n,
    run_grid,
    score,
)

__all__ = [
    "ContractError",
    "EmptyInputError",
    "Error",
    "InteractionLog",
    "ParseError",
    "RangeError",
    "ScoreTable",
    "TemporalIndex",
    "__version__",
    "evaluate",
    "generate",
    "parse_events",
    "preprocess",
    "rank_top_n",
    "run_grid",
    "score",
]
