"""Literal/clause/formula representation and DIMACS CNF I/O.

Literals are plain ints: variable v (numbered from 0) with positive polarity
encodes to 2v, negative to 2v+1.  External DIMACS variable i maps to internal
i-1.  Clause literal order is preserved everywhere: it is the propagation
order used by the vivifier.
"""

import warnings
from typing import Iterable, List, Optional

# Clause tiers.  ORIGINAL marks input clauses; the other three partition the
# learnt clauses by LBD quality.
CORE = 0
TIER2 = 1
LOCAL = 2
ORIGINAL = 3

TIER_NAMES = {CORE: "core", TIER2: "tier2", LOCAL: "local", ORIGINAL: "original"}


class ParseError(ValueError):
    pass


def encode(var: int, positive: bool) -> int:
    return 2 * var + (0 if positive else 1)


def negate(lit: int) -> int:
    """The complementary literal; an involution."""
    return lit ^ 1


def variable(lit: int) -> int:
    return lit >> 1


def polarity(lit: int) -> int:
    """0 for the positive literal of a variable, 1 for the negative one."""
    return lit & 1


def from_external(ext: int) -> int:
    """Signed DIMACS literal -> internal code (|ext| >= 1)."""
    if ext > 0:
        return 2 * (ext - 1)
    return 2 * (-ext - 1) + 1


def to_external(lit: int) -> int:
    """Internal code -> signed DIMACS literal."""
    var = (lit >> 1) + 1
    return -var if lit & 1 else var


class Clause(list):
    """A stored clause: the literal list itself plus solver metadata.

    Subclassing list keeps the hot propagation loop free of an attribute
    hop per watched-clause visit; `lits` is a self-alias kept for readers.
    Positions 0/1 are always the watched positions for clauses of size
    >= 2.  lbd_drops counts strict LBD decreases since the clause was last
    vivified; useful marks participation in a conflict whose learnt clause
    had LBD <= the configured usefulness bound.  Equality is identity:
    duplicate clauses are distinct objects and watch lists must treat them
    that way.
    """

    __slots__ = ("learnt", "lbd", "tier", "activity", "vivified",
                 "lbd_drops", "useful", "last_touch", "lbd_at_vivify",
                 "deleted")

    def __init__(self, lits: List[int], learnt: bool, lbd: int, tier: int):
        super().__init__(lits)
        self.learnt = learnt
        self.lbd = lbd
        self.tier = tier
        self.activity = 0.0
        self.vivified = False
        self.lbd_drops = 0
        self.useful = False
        self.last_touch = 0
        self.lbd_at_vivify = 0
        self.deleted = False

    __eq__ = object.__eq__
    __ne__ = object.__ne__
    __hash__ = object.__hash__

    @property
    def lits(self):
        return self

    @lits.setter
    def lits(self, new_lits):
        self[:] = new_lits

    def __repr__(self):
        kind = "learnt" if self.learnt else "orig"
        return "Clause(%s %s lbd=%d)" % (
            kind, [to_external(l) for l in self], self.lbd)


def normalize_literals(lits: Iterable[int]) -> Optional[List[int]]:
    """Drop duplicate literals, keep first occurrences; None for tautologies."""
    seen = set()
    out = []
    for lit in lits:
        if lit in seen:
            continue
        if lit ^ 1 in seen:
            return None
        seen.add(lit)
        out.append(lit)
    return out


class Formula:
    """The clause database: an arena of Clause objects with lazy deletion.

    Clause references (object identities) stay valid until `delete_clause`;
    deleted clauses are filtered out of the arena by `compact`.
    """

    def __init__(self, num_vars: int = 0):
        self.num_vars = num_vars
        self.clauses: List[Clause] = []
        self.units: List[int] = []          # unit literals found at parse time
        self.contradiction = False          # an input clause normalized to empty
        self.original_clauses: List[tuple] = []  # pristine snapshot for model checks

    def ensure_var(self, var: int):
        if var >= self.num_vars:
            self.num_vars = var + 1

    def add_clause(self, lits: Iterable[int], learnt: bool = False,
                   lbd: int = 0, tier: int = ORIGINAL) -> Optional[Clause]:
        """Normalize and store a clause; returns None if it was a tautology
        or was recorded as a unit/contradiction instead of being stored."""
        norm = normalize_literals(lits)
        if norm is None:
            return None
        if not learnt:
            self.original_clauses.append(tuple(norm))
        for lit in norm:
            self.ensure_var(lit >> 1)
        if not norm:
            self.contradiction = True
            return None
        if len(norm) == 1:
            if not learnt:
                self.units.append(norm[0])
                return None
        if not learnt:
            # lbd of an original clause starts at its size
            lbd = len(norm)
            tier = ORIGINAL
        clause = Clause(norm, learnt, lbd, tier)
        self.clauses.append(clause)
        return clause

    def delete_clause(self, clause: Clause):
        clause.deleted = True

    def compact(self):
        self.clauses = [c for c in self.clauses if not c.deleted]

    def live_clauses(self) -> List[Clause]:
        return [c for c in self.clauses if not c.deleted]

    def __repr__(self):
        return "Formula(%d vars, %d clauses, %d units)" % (
            self.num_vars, len(self.clauses), len(self.units))


def parse_dimacs(text) -> Formula:
    """Parse DIMACS CNF text (str or bytes) into a Formula.

    Tautologies are dropped and duplicate literals removed at parse time.
    Literals beyond the declared variable count grow the table with a
    warning.  A '%' line ends the file (SATLIB convention).
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8", errors="replace")
    declared_vars = None
    formula = None
    current: List[int] = []
    grew = False
    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if formula is not None:
                raise ParseError("duplicate 'p' header")
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise ParseError("malformed header: %r" % line)
            try:
                declared_vars = int(parts[2])
                int(parts[3])
            except ValueError:
                raise ParseError("malformed header: %r" % line)
            if declared_vars < 0:
                raise ParseError("negative variable count in header")
            formula = Formula(declared_vars)
            continue
        if formula is None:
            raise ParseError("clause data before 'p cnf' header")
        for tok in line.split():
            try:
                ext = int(tok)
            except ValueError:
                raise ParseError("bad token %r" % tok)
            if ext == 0:
                formula.add_clause(current)
                current = []
            else:
                if abs(ext) > declared_vars and not grew:
                    warnings.warn(
                        "literal %d exceeds declared %d vars; growing"
                        % (ext, declared_vars))
                    grew = True
                current.append(from_external(ext))
    if formula is None:
        raise ParseError("empty input: no 'p cnf' header")
    if current:
        raise ParseError("missing terminating 0 at end of input")
    return formula


def emit_dimacs(formula: Formula) -> str:
    """Serialize the original (non-learnt, non-deleted) clauses as DIMACS."""
    lines = []
    seen_units = set()
    units = []
    for lit in formula.units:
        if lit not in seen_units:
            seen_units.add(lit)
            units.append(lit)
    body = []
    for lit in units:
        body.append("%d 0" % to_external(lit))
    for clause in formula.clauses:
        if clause.deleted or clause.learnt:
            continue
        body.append(" ".join(str(to_external(l)) for l in clause.lits) + " 0")
    if formula.contradiction:
        body.append("0")
    lines.append("p cnf %d %d" % (formula.num_vars, len(body)))
    lines.extend(body)
    return "\n".join(lines) + "\n"
