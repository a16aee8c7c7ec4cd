"""Execute first-order formulas over the integers as programs."""

from ._fap import (
    BindError,
    OracleError,
    ParseError,
    generate,
    normalize,
    satisfiable,
    solve,
    squares,
    trace,
)

__all__ = [
    "BindError",
    "OracleError",
    "ParseError",
    "generate",
    "normalize",
    "satisfiable",
    "solve",
    "squares",
    "trace",
]
