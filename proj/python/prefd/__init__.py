"""p-refined meshfree Poisson solver (RBF-FD with variable monomial order)."""

from ._core import (
    BallDomain,
    NodeSet,
    OrderLayout,
    SolverStats,
    SolveSummary,
    __version__,
    generate_nodes,
    laplacian_weights,
    preset,
    solve_poisson,
    solve_strong_source,
)

__all__ = [
    "BallDomain",
    "NodeSet",
    "OrderLayout",
    "SolverStats",
    "SolveSummary",
    "__version__",
    "generate_nodes",
    "laplacian_weights",
    "preset",
    "solve_poisson",
    "solve_strong_source",
]
