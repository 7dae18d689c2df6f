"""Small-DFT code generator: create, simplify, schedule, unparse, execute."""

from .codelet import (
    Codelet,
    best_algorithm,
    build_codelet,
    dft_matrix,
    execute_codelet,
    extract_matrix,
    get_codelet,
)
from .create import ALGORITHMS, CreateError, applicable, create_dag, primitive_root
from .dag import CodeletSpec, Dag, DagNode, op_count
from .schedule import Schedule, breadth_order, is_topological, max_live, schedule
from .simplify import canonicalize_constants, simplify, transpose_network
from .unparse import parse, parse_dag_json, parse_neutral_source, unparse

__all__ = [
    "ALGORITHMS",
    "Codelet",
    "CodeletSpec",
    "CreateError",
    "Dag",
    "DagNode",
    "Schedule",
    "applicable",
    "best_algorithm",
    "breadth_order",
    "build_codelet",
    "canonicalize_constants",
    "create_dag",
    "dft_matrix",
    "execute_codelet",
    "extract_matrix",
    "get_codelet",
    "is_topological",
    "max_live",
    "op_count",
    "parse",
    "parse_dag_json",
    "parse_neutral_source",
    "primitive_root",
    "schedule",
    "simplify",
    "transpose_network",
    "unparse",
]
