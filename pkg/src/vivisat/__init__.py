"""vivisat: a CDCL SAT solver with pre- and inprocessing clause vivification."""

from .clause_db import ReduceConfig, TierConfig
from .formula import Formula, ParseError, emit_dimacs, parse_dimacs
from .restart import RestartConfig, luby
from .solver import Result, SAT, Solver, SolverConfig, UNKNOWN, UNSAT, solve_formula
from .vivify import VivifyConfig

__all__ = [
    "Formula", "ParseError", "parse_dimacs", "emit_dimacs",
    "Solver", "SolverConfig", "Result", "solve_formula",
    "SAT", "UNSAT", "UNKNOWN",
    "VivifyConfig", "RestartConfig", "ReduceConfig", "TierConfig", "luby",
]

__version__ = "0.1.0"
