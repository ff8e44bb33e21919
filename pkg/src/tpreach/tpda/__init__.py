"""Timed pushdown automata: syntax, dense-time semantics, grid oracle."""

from tpreach.tpda.spec import (
    Elapse,
    Input,
    Pop,
    Push,
    Reset,
    Rule,
    Test,
    TpdaError,
    TpdaSpec,
    clock_valuation_dict,
    constraint_clocks,
    validate_spec,
)
from tpreach.tpda.oracle import (
    Bounds,
    Configuration,
    GridResult,
    grid_explore,
    replay,
    step,
    untimed_sample,
)
from tpreach.tpda.parse import format_tpda, load_tpda, parse_constraint, parse_tpda

__all__ = [
    "Elapse", "Input", "Pop", "Push", "Reset", "Rule", "Test",
    "TpdaError", "TpdaSpec", "validate_spec",
    "clock_valuation_dict", "constraint_clocks",
    "Bounds", "Configuration", "GridResult",
    "grid_explore", "replay", "step", "untimed_sample",
    "format_tpda", "load_tpda", "parse_constraint", "parse_tpda",
]
