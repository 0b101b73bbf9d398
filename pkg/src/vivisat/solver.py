"""The CDCL search engine.

Trail + two-watched-literal propagation, VSIDS decisions with phase saving,
first-UIP conflict analysis with recursive and binary-resolution learnt
clause minimization, Glucose/Luby restarts, database reduction, and the
pre-/inprocessing vivification hooks.

Clauses always watch their first two literal positions; propagation swaps
falsified literals toward the clause tail, so a clause's literal order after
search reflects its propagation history (which the vivifier exploits).
"""

import time
from dataclasses import dataclass, field
from heapq import heappush, heappop
from typing import List, Optional

from . import clause_db, vivify as vivify_mod
from .clause_db import ReduceConfig, TierConfig, tier_for_lbd, compute_lbd
from .formula import Clause, Formula, ORIGINAL, to_external
from .metrics import MetricsAccumulator
from .restart import RestartConfig, RestartState, LUBY
from .vivify import VivifyConfig, VivifyState

SAT = "SAT"
UNSAT = "UNSAT"
UNKNOWN = "UNKNOWN"

NEVER_ASSIGNED = 1 << 30


@dataclass
class SolverConfig:
    var_decay: float = 0.95
    var_decay_max: float = 0.99
    var_decay_bump_every: int = 5000   # conflicts between +0.01 decay steps
    clause_decay: float = 0.999
    seed: int = 0
    phase_saving: bool = True
    minimize: bool = True              # recursive learnt-clause minimization
    bin_minimize: bool = True          # binary-resolution minimization
    bin_minimize_max_size: int = 30
    bin_minimize_max_lbd: int = 6
    restart: RestartConfig = field(default_factory=RestartConfig)
    reduce: ReduceConfig = field(default_factory=ReduceConfig)
    tiers: TierConfig = field(default_factory=TierConfig)
    vivify: VivifyConfig = field(default_factory=VivifyConfig)
    conflict_budget: Optional[int] = None
    propagation_budget: Optional[int] = None
    time_budget: Optional[float] = None
    debug_checks: bool = False
    record_vivification_trace: bool = False

    def __post_init__(self):
        for name in ("var_decay", "clause_decay"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ValueError("%s must be in (0, 1]" % name)


@dataclass
class Result:
    status: str
    model: Optional[List[int]] = None   # signed external literals, one per var

    @property
    def is_sat(self):
        return self.status == SAT


class Solver:
    """A single-threaded CDCL solver over a Formula.

    Instances are never shared between threads; independent instances may
    run in parallel.
    """

    def __init__(self, formula: Formula, config: Optional[SolverConfig] = None):
        self.formula = formula
        self.config = config or SolverConfig()
        n = formula.num_vars
        self.num_vars = n
        self.assigns = [-1] * n          # -1 unassigned, 0 false, 1 true
        self.levels = [NEVER_ASSIGNED] * n
        self.reasons: List[Optional[Clause]] = [None] * n
        self.trail: List[int] = []
        self.trail_lim: List[int] = []
        self.qhead = 0
        # non-binary clauses watch positions 0/1; binaries get their own
        # pair lists so propagation over them never moves watches
        self.watches: List[List[Clause]] = [[] for _ in range(2 * n)]
        self.watches_bin: List[list] = [[] for _ in range(2 * n)]
        self.activity = [0.0] * n
        self.var_inc = 1.0
        self.var_decay = self.config.var_decay
        self.cla_inc = 1.0
        self.saved = [False] * n
        self.heap = [(0.0, v) for v in range(n)]
        self.seen = bytearray(n)
        self.learnts: List[Clause] = []
        self.originals: List[Clause] = []
        self.metrics = MetricsAccumulator()
        self.restart_state = RestartState(self.config.restart)
        self.vivify_state = VivifyState()
        self.vivification_trace = []     # (kind, before, after) when tracing
        self.conflicts = 0
        self.decisions = 0
        self.search_propagations = 0
        self.viv_propagations = 0
        self.reductions_done = 0
        self.conflicts_at_last_reduce = 0
        self.next_local_reduce = self.config.tiers.local_reduce_every
        self.next_demotion = self.config.tiers.demotion_every
        self.reduce_fired_this_period = False
        self.in_vivification = False
        self.vivify_target = None
        self.debug_checks_run = 0
        self.failed_literal = False      # set when input units conflict
        import random as _random
        self.rng = _random.Random(self.config.seed)

        for clause in formula.clauses:
            if clause.deleted:
                continue
            if clause.learnt:
                self.learnts.append(clause)
            else:
                self.originals.append(clause)
            self.attach(clause)
        for lit in formula.units:
            v = lit >> 1
            val = self.assigns[v]
            if val < 0:
                self.enqueue(lit, None)
            elif val == (lit & 1):      # unit contradicts an earlier unit
                self.failed_literal = True

    # ----- basic state ------------------------------------------------

    def level(self) -> int:
        return len(self.trail_lim)

    def value(self, lit: int) -> int:
        """1 if the literal is true, 0 if false, -1 if unassigned."""
        av = self.assigns[lit >> 1]
        if av < 0:
            return -1
        return av ^ (lit & 1)

    def attach(self, clause: Clause):
        lits = clause.lits
        if len(lits) == 2:
            self.watches_bin[lits[0]].append((lits[1], clause))
            self.watches_bin[lits[1]].append((lits[0], clause))
        else:
            self.watches[lits[0]].append(clause)
            self.watches[lits[1]].append(clause)

    def detach(self, clause: Clause):
        lits = clause.lits
        if len(lits) == 2:
            self.watches_bin[lits[0]].remove((lits[1], clause))
            self.watches_bin[lits[1]].remove((lits[0], clause))
        else:
            self.watches[lits[0]].remove(clause)
            self.watches[lits[1]].remove(clause)

    def remove_clause(self, clause: Clause):
        self.detach(clause)
        clause.deleted = True

    def is_reason(self, clause: Clause) -> bool:
        v = clause[0] >> 1
        return self.assigns[v] >= 0 and self.reasons[v] is clause

    def enqueue(self, lit: int, reason: Optional[Clause]):
        v = lit >> 1
        self.assigns[v] = (lit & 1) ^ 1
        self.levels[v] = len(self.trail_lim)
        self.reasons[v] = reason
        self.trail.append(lit)

    def new_decision_level(self):
        self.trail_lim.append(len(self.trail))

    def backtrack(self, level: int, update_phases: bool = True):
        """Undo all assignments above `level`; no clause data is mutated."""
        if len(self.trail_lim) <= level:
            return
        bound = self.trail_lim[level]
        trail = self.trail
        assigns = self.assigns
        save_phase = update_phases and self.config.phase_saving
        heap = self.heap
        activity = self.activity
        for i in range(len(trail) - 1, bound - 1, -1):
            lit = trail[i]
            v = lit >> 1
            if save_phase:
                self.saved[v] = assigns[v] == 1
            assigns[v] = -1
            heappush(heap, (-activity[v], v))
        del trail[bound:]
        del self.trail_lim[level:]
        self.qhead = len(trail)

    # ----- activities ---------------------------------------------------

    def bump_var_activity(self, v: int):
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > 1e100:
            self._rescale_var_activity()
        else:
            heappush(self.heap, (-act, v))

    def _rescale_var_activity(self):
        activity = self.activity
        for v in range(self.num_vars):
            activity[v] *= 1e-100
        self.var_inc *= 1e-100
        self.heap = [(-activity[v], v) for v in range(self.num_vars)
                     if self.assigns[v] < 0]
        import heapq
        heapq.heapify(self.heap)

    def decay_var_activity(self):
        self.var_inc /= self.var_decay

    def bump_clause_activity(self, clause: Clause):
        clause.activity += self.cla_inc
        if clause.activity > 1e20:
            for c in self.learnts:
                c.activity *= 1e-20
            self.cla_inc *= 1e-20

    def decay_clause_activity(self):
        self.cla_inc /= self.config.clause_decay

    # ----- propagation --------------------------------------------------

    def propagate(self) -> Optional[Clause]:
        """Unit propagation to fixpoint; returns a falsified clause or None.

        Maintains the watch invariants and swaps falsified, non-conflicting
        literals toward the clause tail.
        """
        trail = self.trail
        assigns = self.assigns
        levels = self.levels
        reasons = self.reasons
        watches = self.watches
        watches_bin = self.watches_bin
        cur_level = len(self.trail_lim)
        confl = None
        asserted = 0
        qhead = self.qhead
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            false_lit = p ^ 1
            for other, c in watches_bin[false_lit]:
                av = assigns[other >> 1]
                if av < 0:
                    if c[0] != other:
                        c[0], c[1] = c[1], c[0]
                    v = other >> 1
                    assigns[v] = (other & 1) ^ 1
                    levels[v] = cur_level
                    reasons[v] = c
                    trail.append(other)
                    asserted += 1
                elif av == other & 1:           # both literals false
                    confl = c
                    break
            if confl is not None:
                qhead = len(trail)
                break
            ws = watches[false_lit]
            i = j = 0
            end = len(ws)
            while i < end:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                fv = assigns[first >> 1]
                if fv == (first & 1) ^ 1:       # satisfied by the other watch
                    ws[j] = c
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    lk = c[k]
                    if assigns[lk >> 1] != lk & 1:   # non-false replacement
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(c)
                        found = True
                        break
                if found:
                    continue
                ws[j] = c
                j += 1
                if fv == first & 1:             # both watches false: conflict
                    confl = c
                    while i < end:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    break
                v = first >> 1
                assigns[v] = (first & 1) ^ 1
                levels[v] = cur_level
                reasons[v] = c
                trail.append(first)
                asserted += 1
            del ws[j:]
            if confl is not None:
                qhead = len(trail)
                break
        self.qhead = qhead
        if self.in_vivification:
            self.viv_propagations += asserted
        else:
            self.search_propagations += asserted
        return confl

    # ----- conflict analysis ---------------------------------------------

    def analyze(self, confl: Clause):
        """First-UIP learning; returns (learnt literals, backtrack level, lbd).

        The asserting literal sits at position 0 and a literal of the
        second-highest level at position 1; the rest keep the order in which
        the reverse-trail walk reached them (increasing distance from the
        conflict).  Minimization runs before the final ordering.
        """
        seen = self.seen
        trail = self.trail
        levels = self.levels
        reasons = self.reasons
        cur_level = len(self.trail_lim)
        learnt = [-1]
        to_clear = []
        used = [confl]
        path_count = 0
        p = -1
        index = len(trail) - 1
        c = confl
        while True:
            for idx in range(0 if p < 0 else 1, len(c)):
                q = c[idx]
                v = q >> 1
                if not seen[v] and levels[v] > 0:
                    seen[v] = 1
                    to_clear.append(v)
                    self.bump_var_activity(v)
                    if levels[v] >= cur_level:
                        path_count += 1
                    else:
                        learnt.append(q)
            while not seen[trail[index] >> 1]:
                index -= 1
            p = trail[index]
            index -= 1
            v = p >> 1
            seen[v] = 0
            path_count -= 1
            if path_count <= 0:
                break
            c = reasons[v]
            used.append(c)
        learnt[0] = p ^ 1

        self._min_clear = to_clear
        if self.config.minimize and len(learnt) > 1:
            learnt = self._minimize(learnt)
        if (self.config.bin_minimize and len(learnt) > 1
                and len(learnt) <= self.config.bin_minimize_max_size
                and compute_lbd(learnt, levels) <= self.config.bin_minimize_max_lbd):
            learnt = self.binary_self_subsume(learnt)
        for v in to_clear:
            seen[v] = 0

        if len(learnt) == 1:
            bt_level = 0
        else:
            max_i = 1
            for i in range(2, len(learnt)):
                if levels[learnt[i] >> 1] > levels[learnt[max_i] >> 1]:
                    max_i = i
            learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
            bt_level = levels[learnt[1] >> 1]
        lbd = compute_lbd(learnt, levels)
        for clause in used:
            clause_db.on_clause_used(self, clause, lbd)
        return learnt, bt_level, lbd

    def recursive_minimize(self, learnt: List[int]) -> List[int]:
        """Drop literals whose implication-graph ancestors all hit the clause.

        Standalone entry point: all clause literals must be false on the
        trail; the asserting literal (position 0) is always kept.
        """
        seen = self.seen
        marked = []
        for lit in learnt[1:]:
            v = lit >> 1
            if not seen[v]:
                seen[v] = 1
                marked.append(v)
        self._min_clear = marked
        out = self._minimize(learnt)
        for v in self._min_clear:
            seen[v] = 0
        self._min_clear = []
        return out

    def _minimize(self, learnt: List[int]) -> List[int]:
        # assumes seen marks are set for learnt[1:]; extra marks taken by
        # the redundancy walk stay in self._min_clear for the caller to clear
        levels = self.levels
        abstract = 0
        for lit in learnt[1:]:
            abstract |= 1 << (levels[lit >> 1] & 31)
        out = [learnt[0]]
        for lit in learnt[1:]:
            if self.reasons[lit >> 1] is None or not self._lit_redundant(lit, abstract):
                out.append(lit)
        return out

    def _lit_redundant(self, lit: int, abstract_levels: int) -> bool:
        seen = self.seen
        levels = self.levels
        reasons = self.reasons
        to_clear = self._min_clear
        top = len(to_clear)
        stack = [lit]
        while stack:
            c = reasons[stack.pop() >> 1]
            for q in c[1:]:
                v = q >> 1
                if seen[v] or levels[v] == 0:
                    continue
                if reasons[v] is not None and (1 << (levels[v] & 31)) & abstract_levels:
                    seen[v] = 1
                    to_clear.append(v)
                    stack.append(q)
                else:
                    for u in to_clear[top:]:
                        seen[u] = 0
                    del to_clear[top:]
                    return False
        return True

    def binary_self_subsume(self, learnt: List[int]) -> List[int]:
        """Remove l_i when (asserting-literal OR not-l_i) is a binary clause."""
        l0 = learnt[0]
        drop = {other ^ 1 for other, _ in self.watches_bin[l0]}
        if not drop:
            return learnt
        return [l0] + [l for l in learnt[1:] if l not in drop]

    # ----- decisions ------------------------------------------------------

    def decide(self) -> int:
        """Highest-activity unassigned variable with its saved phase.

        Ties break toward the lowest variable index.  Raises if everything
        is assigned (contract violation).
        """
        heap = self.heap
        assigns = self.assigns
        activity = self.activity
        while heap:
            negact, v = heappop(heap)
            if assigns[v] < 0 and -negact == activity[v]:
                return 2 * v + (0 if self.saved[v] else 1)
        raise AssertionError("decide() called with all variables assigned")

    # ----- learning --------------------------------------------------------

    def record_learnt(self, lits: List[int], lbd: int) -> Optional[Clause]:
        self.metrics.total_learnt += 1
        self.metrics.lbd_histogram[lbd] = self.metrics.lbd_histogram.get(lbd, 0) + 1
        self.restart_state.on_learnt(lbd)
        self.vivify_state.new_learnts += 1
        if len(lits) == 1:
            self.enqueue(lits[0], None)
            return None
        clause = Clause(lits, True, lbd, tier_for_lbd(lbd, self.config.tiers))
        clause.last_touch = self.conflicts
        self.formula.clauses.append(clause)
        self.learnts.append(clause)
        self.attach(clause)
        self.bump_clause_activity(clause)
        self.enqueue(lits[0], clause)
        return clause

    # ----- reduction ---------------------------------------------------------

    def _reduce_due(self) -> bool:
        if self.config.reduce.mode == clause_db.GLUCOSE:
            return clause_db.should_reduce(
                self.conflicts - self.conflicts_at_last_reduce,
                self.config.reduce, self.reductions_done)
        return (self.conflicts >= self.next_local_reduce
                or self.conflicts >= self.next_demotion)

    def _run_reduction(self):
        if self.config.reduce.mode == clause_db.GLUCOSE:
            clause_db.reduce_glucose(self)
            self.conflicts_at_last_reduce = self.conflicts
            self.reduce_fired_this_period = True
        else:
            if self.conflicts >= self.next_demotion:
                clause_db.demote_tier2(self)
                self.next_demotion += self.config.tiers.demotion_every
            if self.conflicts >= self.next_local_reduce:
                clause_db.reduce_tiered(self)
                self.next_local_reduce += self.config.tiers.local_reduce_every
                self.reduce_fired_this_period = True
        self.learnts = [c for c in self.learnts if not c.deleted]
        self.formula.compact()

    # ----- main loop -----------------------------------------------------------

    def solve(self) -> Result:
        """Run the CDCL loop; always returns a Result (UNKNOWN on budgets)."""
        cfg = self.config
        started = time.monotonic()
        deadline = started + cfg.time_budget if cfg.time_budget else None
        if self.formula.contradiction or self.failed_literal:
            self._finish(started)
            return Result(UNSAT)
        if self.propagate() is not None:
            self._finish(started)
            return Result(UNSAT)

        if cfg.vivify.enabled and cfg.vivify.preprocess:
            t0 = time.monotonic()
            ok = vivify_mod.preprocess_vivify(self, cfg.vivify.preprocess_cap)
            self.metrics.preprocess_time += time.monotonic() - t0
            if not ok:
                return Result(UNSAT)

        while True:
            # level 0: consider a vivification pass before the next descent
            if cfg.vivify.enabled:
                fired = self.reduce_fired_this_period
                self.reduce_fired_this_period = False
                if vivify_mod.live_restart(self.vivify_state, cfg.vivify, fired):
                    if not vivify_mod.vivify_all(self, cfg.vivify, self.vivify_state):
                        self._finish(started)
                        return Result(UNSAT)
            while True:
                confl = self.propagate()
                if confl is not None:
                    if not self.trail_lim:
                        self._finish(started)
                        return Result(UNSAT)
                    self.conflicts += 1
                    self.metrics.conflicts += 1
                    learnt, bt_level, lbd = self.analyze(confl)
                    self.backtrack(bt_level)
                    self.record_learnt(learnt, lbd)
                    self.decay_var_activity()
                    self.decay_clause_activity()
                    if self.conflicts % cfg.var_decay_bump_every == 0:
                        self.var_decay = min(cfg.var_decay_max,
                                             self.var_decay + 0.01)
                    if cfg.conflict_budget is not None \
                            and self.conflicts >= cfg.conflict_budget:
                        self._finish(started)
                        return Result(UNKNOWN)
                    if cfg.propagation_budget is not None \
                            and self.search_propagations >= cfg.propagation_budget:
                        self._finish(started)
                        return Result(UNKNOWN)
                    if deadline is not None and self.conflicts % 128 == 0 \
                            and time.monotonic() > deadline:
                        self._finish(started)
                        return Result(UNKNOWN)
                    continue
                if cfg.debug_checks:
                    self.check_invariants()
                if len(self.trail) == self.num_vars:
                    model = self._extract_model()
                    self._verify_model(model)
                    self._finish(started)
                    return Result(SAT, model)
                if self.restart_state.should_restart():
                    self.backtrack(0)
                    self.restart_state.note_restart()
                    self.metrics.restarts += 1
                    break
                if self._reduce_due():
                    self._run_reduction()
                    continue
                self.new_decision_level()
                self.decisions += 1
                self.metrics.decisions += 1
                self.enqueue(self.decide(), None)

    def _finish(self, started: float):
        m = self.metrics
        m.search_time += time.monotonic() - started - m.preprocess_time
        m.search_propagations = self.search_propagations
        m.viv_propagations = self.viv_propagations

    def _extract_model(self) -> List[int]:
        return [to_external(2 * v + (0 if self.assigns[v] == 1 else 1))
                for v in range(self.num_vars)]

    def _verify_model(self, model: List[int]):
        """Soundness gate: the model must satisfy every original clause."""
        values = {}
        for ext in model:
            values[abs(ext)] = ext > 0
        for clause in self.formula.original_clauses:
            if not any(values[(l >> 1) + 1] == ((l & 1) == 0) for l in clause):
                raise AssertionError("model does not satisfy an input clause")

    # ----- debug invariants ---------------------------------------------------

    def check_invariants(self):
        """Watch/reason invariant sweep; raises AssertionError on violation."""
        self.debug_checks_run += 1
        value = self.value
        levels = self.levels
        for clause in self.formula.clauses:
            if clause.deleted or len(clause) < 2 or clause is self.vivify_target:
                continue
            w0, w1 = clause.lits[0], clause.lits[1]
            v0, v1 = value(w0), value(w1)
            if v0 == 0 and v1 != 1:
                raise AssertionError("watch invariant: %r" % clause)
            if v1 == 0 and v0 != 1:
                raise AssertionError("watch invariant: %r" % clause)
            if v0 == 0 and v1 == 1 and levels[w1 >> 1] > levels[w0 >> 1]:
                raise AssertionError("watch level invariant: %r" % clause)
            if v1 == 0 and v0 == 1 and levels[w0 >> 1] > levels[w1 >> 1]:
                raise AssertionError("watch level invariant: %r" % clause)
            assert clause.lbd <= len(clause.lits), "lbd exceeds size"
        for lit in self.trail:
            reason = self.reasons[lit >> 1]
            if reason is None:
                continue
            if reason.lits[0] != lit:
                raise AssertionError("reason invariant: asserted literal moved")
            for other in reason.lits[1:]:
                if value(other) != 0:
                    raise AssertionError("reason invariant: non-false antecedent")

    def check_level0_purity(self):
        if self.trail_lim:
            raise AssertionError("assumption levels left after vivification")
        for lit in self.trail:
            if self.levels[lit >> 1] != 0:
                raise AssertionError("non-level-0 literal on trail")


def solve_formula(formula: Formula, config: Optional[SolverConfig] = None) -> Result:
    return Solver(formula, config).solve()
