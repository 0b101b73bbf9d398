import random

import pytest

from vivisat import Solver, SolverConfig, parse_dimacs
from gen import dimacs_text


def solve_text(text, config=None):
    solver = Solver(parse_dimacs(text), config or SolverConfig())
    return solver.solve(), solver


def solve_clauses(num_vars, clauses, config=None):
    return solve_text(dimacs_text(num_vars, clauses), config)


@pytest.fixture
def rng():
    return random.Random(12345)
