"""Interval universal approximation for floating-point neural networks.

Floats are passed around as "s:e:m" code strings of their format (for
example "+:0:8" is 1.0 in E5M3). Functions taking floats also accept
Python numbers, which are rounded to nearest, ties to even.
"""

from ._fpiua import (
    Classifier,
    Format,
    FpiuaError,
    Network,
    Program,
    Table,
    activation,
    activation_names,
    add,
    check_condition,
    check_iua,
    check_pointwise,
    check_program,
    classify,
    compile_to_program,
    floats,
    is_provably_robust,
    mul,
    random_network,
    relu_min_network,
    round,
    show,
    synthesize_iua,
    synthesize_program,
    synthesize_robust,
    to_float,
)

__all__ = [
    "Classifier",
    "Format",
    "FpiuaError",
    "Network",
    "Program",
    "Table",
    "activation",
    "activation_names",
    "add",
    "check_condition",
    "check_iua",
    "check_pointwise",
    "check_program",
    "classify",
    "compile_to_program",
    "floats",
    "is_provably_robust",
    "mul",
    "random_network",
    "relu_min_network",
    "round",
    "show",
    "synthesize_iua",
    "synthesize_program",
    "synthesize_robust",
    "to_float",
]
