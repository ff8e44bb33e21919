"""Two-sorted formula ASTs, evaluation, DNF, substitution, surface syntax."""

from tpreach.logic.ast import (
    INT,
    RAT,
    FALSE,
    TRUE,
    Add,
    And,
    BoolConst,
    Cmp,
    Const,
    Exists,
    Formula,
    LogicError,
    ModEq,
    Neg,
    Not,
    Or,
    SortError,
    Term,
    UnboundVariableError,
    Var,
    conj,
    disj,
    eval_qf,
    eval_term,
    free_vars,
    fvar,
    int_const,
    is_quantifier_free,
    ivar,
    linearize,
    offset,
    rat_const,
    substitute,
    term_of_linear,
    term_sort,
    term_vars,
)
from tpreach.logic.dnf import dnf_disjuncts, negate_atom, to_dnf, to_nnf
from tpreach.logic.classical import desugar_classical, floor_fract_diff
from tpreach.logic.sexpr import format_formula, parse_formula, parse_sexpr

__all__ = [
    "INT", "RAT", "TRUE", "FALSE",
    "Add", "And", "BoolConst", "Cmp", "Const", "Exists", "Formula", "ModEq",
    "Neg", "Not", "Or", "Term", "Var",
    "LogicError", "SortError", "UnboundVariableError",
    "conj", "disj", "eval_qf", "eval_term", "free_vars", "fvar", "ivar",
    "int_const", "rat_const", "is_quantifier_free", "linearize", "offset",
    "substitute", "term_of_linear", "term_sort", "term_vars",
    "to_dnf", "to_nnf", "dnf_disjuncts", "negate_atom",
    "desugar_classical", "floor_fract_diff",
    "parse_formula", "format_formula", "parse_sexpr",
]
