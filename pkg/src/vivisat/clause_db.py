"""LBD maintenance, CORE/TIER2/LOCAL tier management, and database reduction.

Two reduction schemes are provided: the aggressive LBD-sorted halving used by
Glucose 3.0 and the tier-based scheme of the COMiniSatPS/Maple lineage.
Reason clauses of the current trail are never deleted.
"""

from dataclasses import dataclass

from .formula import CORE, TIER2, LOCAL

GLUCOSE = "glucose"
TIERED = "tiered"


@dataclass
class TierConfig:
    t1: int = 3             # LBD <= t1 -> CORE
    t2: int = 6             # t1 < LBD <= t2 -> TIER2
    tier2_staleness: int = 30000   # conflicts without use before TIER2 -> LOCAL
    demotion_every: int = 10000
    local_reduce_every: int = 15000

    def __post_init__(self):
        if not (1 <= self.t1 < self.t2):
            raise ValueError("need 1 <= t1 < t2")


@dataclass
class ReduceConfig:
    first: int = 2000
    inc: int = 300
    mode: str = GLUCOSE

    def __post_init__(self):
        if self.first <= 0 or self.inc < 0:
            raise ValueError("need first > 0 and inc >= 0")


def tier_for_lbd(lbd: int, tiers: TierConfig) -> int:
    if lbd <= tiers.t1:
        return CORE
    if lbd <= tiers.t2:
        return TIER2
    return LOCAL


def compute_lbd(lits, levels) -> int:
    """Number of distinct decision levels among the clause's literals.

    Every literal must be assigned; `levels` is indexed by variable.
    """
    return len({levels[l >> 1] for l in lits})


def on_clause_used(solver, clause, learnt_lbd: int):
    """Update a clause that took part in deriving a learnt clause.

    Recomputes LBD (strict decreases advance the clause's lbd_drops counter
    and can promote its tier), flags usefulness when the derived clause's
    LBD is within the configured bound, bumps activity and the use stamp.
    """
    new_lbd = compute_lbd(clause, solver.levels)
    if new_lbd < clause.lbd:
        clause.lbd_drops += 1
        clause.lbd = new_lbd
        solver.metrics.lbd_drop_events["learnt" if clause.learnt else "original"] += 1
        if clause.learnt:
            new_tier = tier_for_lbd(new_lbd, solver.config.tiers)
            if new_tier < clause.tier:
                clause.tier = new_tier
    if learnt_lbd <= solver.config.vivify.useful_lbd_max:
        clause.useful = True
    clause.last_touch = solver.conflicts
    if clause.learnt:
        solver.bump_clause_activity(clause)


def should_reduce(conflicts_since_last: int, cfg: ReduceConfig,
                  reductions_done: int) -> bool:
    """Glucose gate: fire once first + 2*inc*reductions_done is reached."""
    return conflicts_since_last >= cfg.first + 2 * cfg.inc * reductions_done


def reduce_glucose(solver) -> int:
    """Delete the worse half of the learnt clauses, LBD-descending.

    Binary clauses, LBD-2 clauses and reasons on the trail survive.
    """
    learnts = [c for c in solver.learnts if not c.deleted]
    # worst first: highest LBD, then lowest activity
    learnts.sort(key=lambda c: (-c.lbd, c.activity))
    limit = len(learnts) // 2
    deleted = 0
    for clause in learnts[:limit]:
        if len(clause.lits) == 2 or clause.lbd <= 2:
            continue
        if solver.is_reason(clause):
            continue
        solver.remove_clause(clause)
        deleted += 1
    solver.reductions_done += 1
    solver.metrics.reductions += 1
    return deleted


def reduce_tiered(solver) -> int:
    """Demote stale TIER2 clauses, then halve LOCAL by ascending activity."""
    demote_tier2(solver)
    local = [c for c in solver.learnts if not c.deleted and c.tier == LOCAL]
    local.sort(key=lambda c: c.activity)
    limit = len(local) // 2
    deleted = 0
    for clause in local[:limit]:
        if solver.is_reason(clause):
            continue
        solver.remove_clause(clause)
        deleted += 1
    solver.reductions_done += 1
    solver.metrics.reductions += 1
    return deleted


def demote_tier2(solver) -> int:
    """Move TIER2 clauses untouched for tier2_staleness conflicts to LOCAL."""
    staleness = solver.config.tiers.tier2_staleness
    moved = 0
    for clause in solver.learnts:
        if clause.deleted or clause.tier != TIER2:
            continue
        if solver.conflicts - clause.last_touch > staleness:
            clause.tier = LOCAL
            moved += 1
    return moved
