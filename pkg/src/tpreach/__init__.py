"""Timed pushdown automata reachability: lowering passes, grammars, formulas."""

__version__ = "0.1.0"
