"""Clause vivification: redundant-literal elimination by unit propagation.

A selected clause C = l1 v ... v lk is processed at level 0 by propagating
the negations of its literals one at a time, each on its own assumption
level, using the solver's own watch lists (C itself is detached for the
duration, so propagation runs over the rest of the formula):

  - a literal already false is dropped            (rule 1)
  - a literal already true ends the pass: the clause is replaced by a
    sub-clause extracted from the complete implication graph  (rule 2)
  - a propagation conflict ends the pass the same way          (rule 3)
  - otherwise the literal is kept and its negation propagated  (rule 4)

Rules 2 and 3 are mutually exclusive within one pass; rule 1 combines with
either.  The activation gate, the clause-selection policies (including the
re-vivification conditions driven by LBD decreases), the literal sort
variants, and the capped preprocessing sweep all live here.
"""

from dataclasses import dataclass

from .clause_db import tier_for_lbd
from .formula import TIER2

ACTIVATIONS = ("reduce", "threshold", "every", "gap")
SELECTIONS = ("ghalf", "gfrac", "maple", "live+", "live++")
SORT_ORDERS = ("current", "l2h-level", "h2l-level", "l2h-act", "h2l-act",
               "random", "reverse")


@dataclass
class VivifyConfig:
    enabled: bool = True
    activation: str = "threshold"
    threshold_base: int = 1000      # pass gate: new learnts >= base + step * passes
    threshold_step: int = 2000
    gap: int = 1000                 # for activation == "gap": new learnts > gap
    selection: str = "live++"
    fraction: float = 0.5           # for selection == "gfrac"
    sort_order: str = "current"
    useful_lbd_max: int = 20        # conflicts with learnt LBD <= this are useful
    preprocess: bool = True
    preprocess_cap: int = 100_000_000   # propagated-literal budget

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError("unknown activation %r" % self.activation)
        if self.selection not in SELECTIONS:
            raise ValueError("unknown selection %r" % self.selection)
        if self.sort_order not in SORT_ORDERS:
            raise ValueError("unknown sort order %r" % self.sort_order)
        if self.threshold_base < 0 or self.threshold_step < 0:
            raise ValueError("threshold parameters must be >= 0")
        if not (0.0 < self.fraction <= 1.0):
            raise ValueError("fraction must be in (0, 1]")
        if self.useful_lbd_max < 1:
            raise ValueError("useful_lbd_max must be >= 1")


@dataclass
class VivifyState:
    new_learnts: int = 0    # clauses learnt since the last pass
    passes_done: int = 0


def live_restart(state: VivifyState, cfg: VivifyConfig,
                 reduction_fired: bool) -> bool:
    """Should a vivification pass run at this restart?"""
    if cfg.activation == "reduce":
        return reduction_fired
    if cfg.activation == "threshold":
        return state.new_learnts >= cfg.threshold_base + cfg.threshold_step * state.passes_done
    if cfg.activation == "every":
        return True
    return state.new_learnts > cfg.gap


def _lbd_dropped_to_one(clause) -> bool:
    # stored LBD reached 1 after a vivification that left it above 1
    return clause.vivified and clause.lbd == 1 and clause.lbd_at_vivify > 1


def live_clause(clause, cfg: VivifyConfig, eligible=None) -> bool:
    """Should this clause be vivified in the current pass?

    `eligible` is the precomputed membership set for the LBD-sorted
    fraction policies; other policies ignore it.
    """
    if clause.deleted:
        return False
    if clause.learnt:
        sel = cfg.selection
        if sel in ("ghalf", "gfrac"):
            return not clause.vivified and eligible is not None and clause in eligible
        if sel == "maple":
            return not clause.vivified and clause.tier <= TIER2
        if sel == "live+":
            return clause.tier <= TIER2 and (
                not clause.vivified or clause.lbd_drops >= 2)
        return clause.tier <= TIER2 and (
            not clause.vivified or clause.lbd_drops >= 2
            or _lbd_dropped_to_one(clause))
    if cfg.selection != "live++":
        return False
    return clause.useful and (
        not clause.vivified or clause.lbd_drops >= 3
        or _lbd_dropped_to_one(clause))


def eligible_fraction(solver, cfg: VivifyConfig):
    """Learnt clauses in the last `fraction` after an LBD-descending sort."""
    if cfg.selection not in ("ghalf", "gfrac"):
        return None
    frac = 0.5 if cfg.selection == "ghalf" else cfg.fraction
    pool = [c for c in solver.learnts if not c.deleted]
    pool.sort(key=lambda c: -c.lbd)     # stable: ties keep arena order
    start = int(len(pool) * (1.0 - frac))
    return set(pool[start:])


def sort_clause(lits, order, levels=None, activity=None, rng=None):
    """Permute a literal list per the configured order; always a fresh list.

    Level keys use the variable's last assertion level (never-asserted
    variables sort as +infinity); activity keys use current VSIDS activity.
    """
    if order == "current":
        return list(lits)
    if order == "reverse":
        return list(reversed(lits))
    if order == "random":
        out = list(lits)
        rng.shuffle(out)
        return out
    if order == "l2h-level":
        return sorted(lits, key=lambda l: levels[l >> 1])
    if order == "h2l-level":
        return sorted(lits, key=lambda l: -levels[l >> 1])
    if order == "l2h-act":
        return sorted(lits, key=lambda l: activity[l >> 1])
    if order == "h2l-act":
        return sorted(lits, key=lambda l: -activity[l >> 1])
    raise ValueError("unknown sort order %r" % order)


def confl_analysis(solver, d, r):
    """Walk the complete implication graph from the falsified set R back to
    the assumption set D; returns the sub-clause of negated D members with a
    path into R, in D's propagation order.

    Seen marks are per variable: the rule-2 case, where the clause literal
    itself was implied true, is looked up through its variable.  All marks
    are cleared before returning.
    """
    seen = solver.seen
    trail = solver.trail
    reasons = solver.reasons
    d_by_var = {l >> 1: l for l in d}
    marked = []
    pending = 0
    for lit in r:
        v = lit >> 1
        if not seen[v]:
            seen[v] = 1
            marked.append(v)
            pending += 1
    collected = set()
    for i in range(len(trail) - 1, -1, -1):
        if pending == 0:
            break
        v = trail[i] >> 1
        if not seen[v]:
            continue
        pending -= 1
        if v in d_by_var:
            collected.add(v)
        else:
            reason = reasons[v]
            if reason is not None:
                for q in reason:
                    qv = q >> 1
                    if qv != v and not seen[qv]:
                        seen[qv] = 1
                        marked.append(qv)
                        pending += 1
    for v in marked:
        seen[v] = 0
    return [(lit ^ 1) for lit in d if (lit >> 1) in collected]


def vivify_clause(solver, clause, cfg: VivifyConfig):
    """Vivify one (detached-for-the-duration) stored clause.

    Returns (unsat, rules, size_before, size_after).  The stored clause is
    replaced in place when shortened; an empty result means the formula is
    unsatisfiable, a unit result is asserted at level 0.  All assumption
    levels are retracted before returning.
    """
    assert not solver.trail_lim, "vivification must start at level 0"
    before = len(clause.lits)
    kind = "learnt" if clause.learnt else "original"
    if solver.config.record_vivification_trace:
        snapshot = tuple(clause.lits)
    solver.detach(clause)
    was_viv = solver.in_vivification
    solver.in_vivification = True
    solver.vivify_target = clause      # invariant sweeps skip the detached clause
    lits = sort_clause(clause.lits, cfg.sort_order, solver.levels,
                       solver.activity, solver.rng)
    rules = set()
    result = None
    work = []
    for lit in lits:
        val = solver.value(lit)
        if val == 0:
            rules.add(1)
            continue
        if val == 1:
            reason = solver.reasons[lit >> 1]
            if reason is None:
                falsified = [lit ^ 1]
            else:
                falsified = [l if l != lit else lit ^ 1 for l in reason.lits]
            d = [l ^ 1 for l in work] + [lit ^ 1]
            result = confl_analysis(solver, d, falsified)
            rules.add(2)
            assert lit in result, "rule-2 sub-clause lost its implied literal"
            break
        solver.new_decision_level()
        solver.enqueue(lit ^ 1, None)
        confl = solver.propagate()
        if confl is None:
            if solver.config.debug_checks:
                solver.check_invariants()
            work.append(lit)
            continue
        d = [l ^ 1 for l in work] + [lit ^ 1]
        result = confl_analysis(solver, d, list(confl.lits))
        rules.add(3)
        break
    if result is None:
        result = work
    solver.backtrack(0, update_phases=False)

    after = len(result)
    unsat = False
    if after == before:
        rules = set()                     # checked but nothing removed
        clause.lits = result
        solver.attach(clause)
        _mark_vivified(clause)
    elif after == 0:
        clause.deleted = True
        unsat = True
    elif after == 1:
        clause.deleted = True
        _mark_vivified(clause)
        lit = result[0]
        val = solver.value(lit)
        if val == 0:
            unsat = True
        elif val < 0:
            solver.enqueue(lit, None)
            if solver.propagate() is not None:
                unsat = True
    else:
        clause.lits = result
        new_lbd = min(clause.lbd, after)
        clause.lbd = new_lbd
        if clause.learnt:
            clause.tier = min(clause.tier,
                              tier_for_lbd(new_lbd, solver.config.tiers))
        solver.attach(clause)
        _mark_vivified(clause)
    solver.in_vivification = was_viv
    solver.vivify_target = None
    solver.metrics.record_vivify(kind, before, after, rules)
    if solver.config.record_vivification_trace:
        solver.vivification_trace.append((kind, snapshot, tuple(result)))
    return unsat, rules, before, after


def _mark_vivified(clause):
    clause.vivified = True
    clause.lbd_at_vivify = clause.lbd
    clause.lbd_drops = 0


def _satisfied_at_level0(solver, clause) -> bool:
    return any(solver.value(l) == 1 for l in clause.lits)


def vivify_all(solver, cfg: VivifyConfig, state: VivifyState) -> bool:
    """One vivification pass: learnt clauses first, then originals, each in
    arena order.  Returns False when unsatisfiability was derived."""
    eligible = eligible_fraction(solver, cfg)
    for group in (solver.learnts, solver.originals):
        for clause in list(group):
            if clause.deleted:
                continue
            if _satisfied_at_level0(solver, clause):
                solver.remove_clause(clause)
                continue
            if not live_clause(clause, cfg, eligible):
                continue
            was_learnt = clause.learnt
            unsat, _, _, _ = vivify_clause(solver, clause, cfg)
            if not was_learnt:
                clause.useful = False
            if unsat:
                return False
    state.new_learnts = 0
    state.passes_done += 1
    solver.metrics.viv_passes += 1
    if solver.config.debug_checks:
        solver.check_level0_purity()
    return True


def preprocess_vivify(solver, cap: int) -> bool:
    """Vivify original clauses in file order before search starts, stopping
    for good once `cap` literals have been propagated by the sweep."""
    metrics = solver.metrics
    propagated = 0
    last_clause = 0
    for clause in list(solver.originals):
        if propagated >= cap:
            break
        if clause.deleted:
            continue
        if _satisfied_at_level0(solver, clause):
            solver.remove_clause(clause)
            continue
        start = solver.viv_propagations
        unsat, _, before, after = vivify_clause(solver, clause, cfg=solver.config.vivify)
        last_clause = solver.viv_propagations - start
        propagated += last_clause
        metrics.preprocess_clauses_checked += 1
        if after < before:
            metrics.preprocess_clauses_vivified += 1
        if unsat:
            metrics.preprocess_propagations = propagated
            metrics.preprocess_last_clause_propagations = last_clause
            return False
    metrics.preprocess_propagations = propagated
    metrics.preprocess_last_clause_propagations = last_clause
    if solver.config.debug_checks:
        solver.check_level0_purity()
    return True
