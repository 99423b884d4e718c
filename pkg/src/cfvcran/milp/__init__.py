"""0-1 integer linear programs: model IR, scenario builders, MPS exchange."""

from .model import Constraint, IlpModel, Variable, VariableIndex
from .builders import build_scenario1, build_scenario2, decode_assignment
from .mps import parse_mps, write_mps

__all__ = [
    "Constraint",
    "IlpModel",
    "Variable",
    "VariableIndex",
    "build_scenario1",
    "build_scenario2",
    "decode_assignment",
    "parse_mps",
    "write_mps",
]
