"""Exact exotic and inverted Kloosterman sums over finite etale algebras."""

from ._core import (
    BudgetError,
    ConfigError,
    characters,
    eik,
    ek,
    field_info,
    is_norm_induced,
    main_term,
    newton_polytope,
    nondegeneracy,
    norm_fiber_sum,
    polytope_report,
    sweep,
    unfolded,
    verify,
)

__all__ = [
    "BudgetError",
    "ConfigError",
    "characters",
    "eik",
    "ek",
    "field_info",
    "is_norm_induced",
    "main_term",
    "newton_polytope",
    "nondegeneracy",
    "norm_fiber_sum",
    "polytope_report",
    "sweep",
    "unfolded",
    "verify",
]
