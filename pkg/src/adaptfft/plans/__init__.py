"""Plan nodes, their s-expression form, and helpers to run them."""

from .base import ALPHA, BETA, ExecContext, PlanError, loop_legal
from .nodes import (
    CODELET_SIZES,
    DIF,
    DIT,
    Bluestein,
    Buffer,
    Copy,
    Direct,
    Generic,
    Indirect,
    InplaceComposite,
    Loop,
    Plan,
    Rader,
    RankReduce,
    TransposeSquare,
    TwiddleCodelet,
    apply,
    bluestein_length,
    estimate_cost,
)
from .sexpr import SexprError, format_tree, instantiate, parse

__all__ = [
    "ALPHA",
    "BETA",
    "CODELET_SIZES",
    "DIF",
    "DIT",
    "Bluestein",
    "Buffer",
    "Copy",
    "Direct",
    "ExecContext",
    "Generic",
    "Indirect",
    "InplaceComposite",
    "Loop",
    "Plan",
    "PlanError",
    "Rader",
    "RankReduce",
    "SexprError",
    "TransposeSquare",
    "TwiddleCodelet",
    "apply",
    "bluestein_length",
    "estimate_cost",
    "format_tree",
    "instantiate",
    "loop_legal",
    "parse",
]
