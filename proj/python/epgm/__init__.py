"""Extended property graph model engine: logical graphs, the operator
algebra, GrALa workflows and a versioned wide-column graph store."""

from ._core import (
    Database,
    EpgmError,
    Graph,
    ScriptError,
    Store,
    apply,
    combine_all,
    difference,
    distinct,
    generate_business,
    generate_social,
    intersect,
    overlap_all,
    reduce,
    run_script,
    select,
    sort_by,
    top,
    union,
)

__all__ = [
    "Database",
    "EpgmError",
    "Graph",
    "ScriptError",
    "Store",
    "apply",
    "combine_all",
    "difference",
    "distinct",
    "generate_business",
    "generate_social",
    "intersect",
    "overlap_all",
    "reduce",
    "run_script",
    "select",
    "sort_by",
    "top",
    "union",
]
