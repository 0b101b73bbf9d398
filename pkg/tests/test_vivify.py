import random

import pytest

from vivisat import Solver, SolverConfig, parse_dimacs
from vivisat.formula import CORE, LOCAL, ORIGINAL, TIER2, Clause, from_external, to_external
from vivisat.vivify import (
    VivifyConfig, VivifyState, confl_analysis, live_clause, live_restart,
    preprocess_vivify, sort_clause, vivify_all, vivify_clause,
)

from gen import dimacs_text, random_3sat
from oracles import TruthTable


def ext(lits):
    return [to_external(l) for l in lits]


def internal(e):
    return from_external(e)


def make_solver(text, **cfg_kwargs):
    return Solver(parse_dimacs(text), SolverConfig(**cfg_kwargs))


class TestLiveRestart:
    def test_threshold_boundaries(self):
        cfg = VivifyConfig(activation="threshold", threshold_base=1000,
                           threshold_step=2000)
        st = VivifyState(new_learnts=999, passes_done=0)
        assert not live_restart(st, cfg, False)
        st.new_learnts = 1000
        assert live_restart(st, cfg, False)

    def test_threshold_growth(self):
        cfg = VivifyConfig(activation="threshold")
        for passes, bound in ((1, 3000), (2, 5000)):
            st = VivifyState(new_learnts=bound - 1, passes_done=passes)
            assert not live_restart(st, cfg, False)
            st.new_learnts = bound
            assert live_restart(st, cfg, False)

    def test_follow_reduction(self):
        cfg = VivifyConfig(activation="reduce")
        st = VivifyState(new_learnts=10 ** 6)
        assert not live_restart(st, cfg, False)
        assert live_restart(st, cfg, True)

    def test_every_restart(self):
        cfg = VivifyConfig(activation="every")
        assert live_restart(VivifyState(), cfg, False)

    def test_fixed_gap_strictly_greater(self):
        cfg = VivifyConfig(activation="gap", gap=500)
        assert not live_restart(VivifyState(new_learnts=500), cfg, False)
        assert live_restart(VivifyState(new_learnts=501), cfg, False)


def learnt_clause(tier, vivified=False, drops=0, lbd=5, lbd_at_vivify=0):
    c = Clause([0, 2, 4], True, lbd, tier)
    c.vivified = vivified
    c.lbd_drops = drops
    c.lbd_at_vivify = lbd_at_vivify
    return c


def original_clause(useful, vivified=False, drops=0, lbd=5, lbd_at_vivify=0):
    c = Clause([0, 2, 4], False, lbd, ORIGINAL)
    c.useful = useful
    c.vivified = vivified
    c.lbd_drops = drops
    c.lbd_at_vivify = lbd_at_vivify
    return c


class TestLiveClause:
    def test_maple_never_revivifies(self):
        cfg = VivifyConfig(selection="maple")
        assert live_clause(learnt_clause(CORE), cfg)
        assert not live_clause(learnt_clause(CORE, vivified=True, drops=9), cfg)
        assert not live_clause(learnt_clause(LOCAL), cfg)

    def test_live_plus_lambda_boundary(self):
        cfg = VivifyConfig(selection="live+")
        assert live_clause(learnt_clause(CORE), cfg)
        assert not live_clause(learnt_clause(CORE, vivified=True, drops=1), cfg)
        assert live_clause(learnt_clause(CORE, vivified=True, drops=2), cfg)
        assert live_clause(learnt_clause(TIER2, vivified=True, drops=2), cfg)
        assert not live_clause(learnt_clause(LOCAL, vivified=True, drops=5), cfg)

    def test_live_plus_ignores_lbd_one_override(self):
        # Alg.5 has no LBD-to-1 clause; live+ follows it verbatim
        cfg = VivifyConfig(selection="live+")
        c = learnt_clause(CORE, vivified=True, drops=1, lbd=1, lbd_at_vivify=3)
        assert not live_clause(c, cfg)

    def test_live_plus_plus_learnt(self):
        cfg = VivifyConfig(selection="live++")
        assert live_clause(learnt_clause(TIER2), cfg)
        assert not live_clause(learnt_clause(TIER2, vivified=True, drops=1), cfg)
        assert live_clause(learnt_clause(TIER2, vivified=True, drops=2), cfg)
        dropped1 = learnt_clause(CORE, vivified=True, drops=1, lbd=1,
                                 lbd_at_vivify=4)
        assert live_clause(dropped1, cfg)

    def test_live_plus_plus_original(self):
        cfg = VivifyConfig(selection="live++")
        assert not live_clause(original_clause(useful=False), cfg)
        assert live_clause(original_clause(useful=True), cfg)
        assert not live_clause(
            original_clause(useful=True, vivified=True, drops=2), cfg)
        assert live_clause(
            original_clause(useful=True, vivified=True, drops=3), cfg)
        override = original_clause(useful=True, vivified=True, drops=0,
                                   lbd=1, lbd_at_vivify=6)
        assert live_clause(override, cfg)

    def test_originals_only_under_live_plus_plus(self):
        for sel in ("ghalf", "maple", "live+"):
            assert not live_clause(original_clause(useful=True),
                                   VivifyConfig(selection=sel))


class TestSortClause:
    def test_current_is_identity(self):
        lits = [4, 2, 6, 0]
        out = sort_clause(lits, "current")
        assert out == lits and out is not lits

    def test_reverse(self):
        assert sort_clause([0, 2, 4], "reverse") == [4, 2, 0]

    def test_random_deterministic_multiset(self):
        rng1 = random.Random(11)
        rng2 = random.Random(11)
        for trial in range(10 ** 4):
            lits = list(range(0, 2 * (trial % 7 + 2), 2))
            a = sort_clause(lits, "random", rng=rng1)
            b = sort_clause(lits, "random", rng=rng2)
            assert a == b
            assert sorted(a) == sorted(lits)

    def test_level_orders_with_unassigned_high(self):
        levels = [3, 1, 1 << 30]     # var 2 never assigned
        lits = [4, 0, 2]             # vars 2, 0, 1
        assert sort_clause(lits, "l2h-level", levels=levels) == [2, 0, 4]
        assert sort_clause(lits, "h2l-level", levels=levels) == [4, 0, 2]

    def test_activity_orders(self):
        act = [0.5, 9.0, 2.0]
        lits = [0, 2, 4]
        assert sort_clause(lits, "l2h-act", activity=act) == [0, 4, 2]
        assert sort_clause(lits, "h2l-act", activity=act) == [2, 4, 0]


class TestConflAnalysis:
    def test_no_propagation_between(self):
        # R subset of D with nothing propagated: output is R's negations
        s = make_solver("p cnf 3 1\n1 2 3 0\n")
        d = []
        for e in (-1, -2):
            s.new_decision_level()
            lit = internal(e)
            s.enqueue(lit, None)
            d.append(lit)
        out = confl_analysis(s, d, [internal(1), internal(2)])
        assert ext(out) == [1, 2]
        assert not any(s.seen)
        s.backtrack(0, update_phases=False)

    def test_consequence_of_simple_conflict(self):
        # vivifying a v b v c against phi with (a v b v d), (a v b v -d):
        # propagating -a, -b, then -c is never reached; conflict at -b
        s = make_solver("p cnf 4 3\n1 2 4 0\n1 2 -4 0\n1 2 3 0\n")
        target = s.originals[2]
        unsat, rules, before, after = vivify_clause(s, target, s.config.vivify)
        assert not unsat and rules == {3}
        assert ext(target) == [1, 2]
        assert TruthTable(4, [[1, 2, 4], [1, 2, -4]]).is_consequence(
            ext(target))


class TestVivifyClauseRules:
    """One hand-built CNF per rule category, per the propagation semantics:
    a literal that UP has made true fires rule 2; a conflict while
    propagating the literal's negation fires rule 3."""

    def test_rule3_conflict_during_propagation(self):
        s = make_solver("p cnf 4 3\n1 2 4 0\n1 2 -4 0\n1 2 3 0\n")
        target = s.originals[2]
        unsat, rules, before, after = vivify_clause(s, target, s.config.vivify)
        assert rules == {3} and (before, after) == (3, 2)
        assert ext(target) == [1, 2]

    def test_rule2_true_literal(self):
        # (a v b) makes b true once -a is propagated
        s = make_solver("p cnf 3 2\n1 2 0\n1 2 3 0\n")
        target = s.originals[1]
        unsat, rules, before, after = vivify_clause(s, target, s.config.vivify)
        assert rules == {2} and (before, after) == (3, 2)
        assert ext(target) == [1, 2]

    def test_rule1_false_literal(self):
        # (a v -b) makes b false once -a is propagated
        s = make_solver("p cnf 3 2\n1 -2 0\n1 2 3 0\n")
        target = s.originals[1]
        unsat, rules, before, after = vivify_clause(s, target, s.config.vivify)
        assert rules == {1} and (before, after) == (3, 2)
        assert ext(target) == [1, 3]

    def test_rule12_combination(self):
        s = make_solver("p cnf 4 3\n1 -2 0\n1 4 0\n1 2 3 4 0\n")
        target = s.originals[2]
        unsat, rules, before, after = vivify_clause(s, target, s.config.vivify)
        assert rules == {1, 2} and (before, after) == (4, 2)
        assert ext(target) == [1, 4]

    def test_rule13_combination(self):
        s = make_solver("p cnf 4 4\n1 -2 0\n1 3 4 0\n1 3 -4 0\n1 2 3 0\n")
        target = s.originals[3]
        unsat, rules, before, after = vivify_clause(s, target, s.config.vivify)
        assert rules == {1, 3} and (before, after) == (3, 2)
        assert ext(target) == [1, 3]

    def test_nothing_propagates_no_simp(self):
        s = make_solver("p cnf 4 2\n4 1 0\n1 2 3 0\n")
        target = s.originals[1]
        unsat, rules, before, after = vivify_clause(s, target, s.config.vivify)
        assert rules == set() and before == after == 3
        assert ext(target) == [1, 2, 3]
        assert target.vivified

    def test_unit_result_asserted_at_level0(self):
        s = make_solver("p cnf 3 3\n1 -2 0\n1 -3 0\n1 2 3 0\n")
        target = s.originals[2]
        unsat, rules, before, after = vivify_clause(s, target, s.config.vivify)
        assert not unsat and after == 1
        assert target.deleted
        assert s.value(internal(1)) == 1
        assert s.levels[internal(1) >> 1] == 0

    def test_unsat_discovered(self):
        # the target vivifies down to the unit (a), but asserting a at
        # level 0 propagates a contradiction through (-a v d), (-a v -d)
        s = make_solver(
            "p cnf 4 5\n1 -2 0\n1 -3 0\n-1 4 0\n-1 -4 0\n1 2 3 0\n")
        assert s.propagate() is None
        target = s.originals[4]
        unsat, rules, before, after = vivify_clause(s, target, s.config.vivify)
        assert unsat
        assert after == 1

    def test_sub_multiset_and_lambda_reset(self):
        rng = random.Random(0)
        for trial in range(40):
            n = rng.randint(5, 12)
            clauses = random_3sat(n, int(n * 4.2), seed=trial + 777)
            s = make_solver(dimacs_text(n, clauses), seed=trial)
            table = TruthTable(n, clauses)
            for target in list(s.originals):
                if target.deleted or any(s.value(l) == 1 for l in target):
                    continue
                before_lits = sorted(ext(target))
                target.lbd_drops = 3
                unsat, rules, b, a = vivify_clause(s, target, s.config.vivify)
                if unsat:
                    break
                assert target.lbd_drops == 0
                if not target.deleted:
                    after_lits = sorted(ext(target))
                    rest = list(before_lits)
                    for l in after_lits:
                        rest.remove(l)      # raises if not a sub-multiset
                    assert table.is_consequence(after_lits)
                    assert target.lbd <= len(target)


class TestVivifyAll:
    def test_pass_counted_even_when_empty(self):
        s = make_solver("p cnf 3 1\n1 2 3 0\n")
        st = VivifyState(new_learnts=55)
        cfg = VivifyConfig(selection="maple")
        assert vivify_all(s, cfg, st)
        assert st.passes_done == 1
        assert st.new_learnts == 0
        assert s.metrics.clauses_checked == 0

    def test_second_pass_vivifies_nothing_under_maple(self):
        clauses = random_3sat(30, 128, 5)
        s = make_solver(dimacs_text(30, clauses), seed=2)
        res = s.solve()
        cfg = VivifyConfig(selection="maple")
        st = VivifyState()
        before = s.metrics.clauses_checked
        vivify_all(s, cfg, st)
        first = s.metrics.clauses_checked - before
        vivify_all(s, cfg, st)
        assert s.metrics.clauses_checked - before == first  # nothing new

    def test_learnts_before_originals(self):
        clauses = random_3sat(40, 170, 9)
        s = make_solver(dimacs_text(40, clauses), seed=2,
                        record_vivification_trace=True)
        s.solve()
        for c in s.originals:
            c.useful = True
        st = VivifyState()
        trace_start = len(s.vivification_trace)
        vivify_all(s, VivifyConfig(selection="live++"), st)
        kinds = [k for k, _, _ in s.vivification_trace[trace_start:]]
        if "learnt" in kinds and "original" in kinds:
            assert kinds.index("original") > len(kinds) - 1 - kinds[::-1].index("learnt") - 1

    def test_useful_cleared_on_processed_originals(self):
        s = make_solver("p cnf 3 2\n1 2 0\n1 2 3 0\n")
        target = s.originals[1]
        target.useful = True
        vivify_all(s, VivifyConfig(selection="live++"), VivifyState())
        assert not target.useful

    def test_satisfied_at_level0_deleted_not_checked(self):
        # the unit clause is recorded as a unit, not stored in the arena
        s = make_solver("p cnf 3 2\n1 0\n1 2 3 0\n")
        assert s.propagate() is None
        target = s.originals[0]
        target.useful = True
        vivify_all(s, VivifyConfig(selection="live++"), VivifyState())
        assert target.deleted
        assert s.metrics.clauses_checked == 0

    def test_level0_purity_after_pass(self):
        clauses = random_3sat(25, 107, 3)
        s = make_solver(dimacs_text(25, clauses), seed=4, debug_checks=True)
        s.solve()
        s.backtrack(0)
        for c in s.originals:
            c.useful = True
        assert vivify_all(s, VivifyConfig(selection="live++"), VivifyState())
        s.check_level0_purity()


class TestPreprocess:
    def test_cap_zero_vivifies_nothing(self):
        s = make_solver("p cnf 3 2\n1 2 0\n1 2 3 0\n")
        assert preprocess_vivify(s, cap=0)
        assert s.metrics.preprocess_clauses_checked == 0
        assert ext(s.originals[1]) == [1, 2, 3]

    def test_duplicate_kept_after_vivify(self):
        s = make_solver("p cnf 3 2\n1 2 0\n1 2 3 0\n")
        assert preprocess_vivify(s, cap=10 ** 6)
        live = [sorted(ext(c)) for c in s.originals if not c.deleted]
        assert live == [[1, 2], [1, 2]]    # subsumed duplicate is kept

    def test_counter_overshoot_bounded(self):
        clauses = random_3sat(120, 511, 13)
        s = make_solver(dimacs_text(120, clauses), seed=1)
        cap = 50
        assert preprocess_vivify(s, cap=cap)
        m = s.metrics
        assert m.preprocess_propagations <= cap + max(
            m.preprocess_last_clause_propagations, 1) + len(clauses[0])
        assert m.preprocess_propagations >= cap or \
            m.preprocess_clauses_checked == len(s.originals)

    def test_file_order(self):
        s = make_solver("p cnf 4 3\n1 2 0\n3 4 0\n1 2 3 4 0\n",
                        record_vivification_trace=True)
        preprocess_vivify(s, cap=10 ** 6)
        kinds = [tuple(sorted(ext(before)))
                 for _, before, _ in s.vivification_trace]
        assert kinds == [(1, 2), (3, 4), (1, 2, 3, 4)]


class TestEquisatisfiabilityMini:
    def test_policies_and_orders_agree(self):
        for seed in range(10):
            clauses = random_3sat(20, 86, seed + 1300)
            answers = set()
            for sel in ("ghalf", "maple", "live+", "live++"):
                for order in ("current", "reverse", "random"):
                    cfg = SolverConfig(seed=1, vivify=VivifyConfig(
                        activation="every", selection=sel, sort_order=order))
                    s = Solver(parse_dimacs(dimacs_text(20, clauses)), cfg)
                    answers.add(s.solve().status)
            cfg = SolverConfig(seed=1, vivify=VivifyConfig(enabled=False))
            s = Solver(parse_dimacs(dimacs_text(20, clauses)), cfg)
            answers.add(s.solve().status)
            assert len(answers) == 1
