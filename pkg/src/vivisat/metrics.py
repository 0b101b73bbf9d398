"""Run instrumentation: vivification impact/cost counters, rule breakdown,
clause-size reduction ratios split by clause kind, the learnt-clause LBD
cumulative distribution, and the core solver counters.

Percentages are derived from raw counters at report time only.
"""

import csv
import io
import json

RULE_CATEGORIES = ("noSimp", "rule_1", "rule_2", "rule_3", "rule_12", "rule_13")
KINDS = ("original", "learnt")

_CATEGORY_BY_RULES = {
    frozenset(): "noSimp",
    frozenset({1}): "rule_1",
    frozenset({2}): "rule_2",
    frozenset({3}): "rule_3",
    frozenset({1, 2}): "rule_12",
    frozenset({1, 3}): "rule_13",
}

LBD_CDF_MAX = 100


class MetricsAccumulator:
    """Raw counters for one solver run; read-only after solve returns."""

    def __init__(self):
        self.lits_before = {"original": 0, "learnt": 0}   # a, per clause kind
        self.lits_after = {"original": 0, "learnt": 0}    # b, per clause kind
        self.search_propagations = 0
        self.viv_propagations = 0
        self.clauses_checked = 0
        self.clauses_checked_by_kind = {"original": 0, "learnt": 0}
        self.clauses_vivified = 0
        self.clauses_vivified_by_kind = {"original": 0, "learnt": 0}
        self.total_learnt = 0
        self.rule_counts = {name: 0 for name in RULE_CATEGORIES}
        self.lbd_histogram = {}
        self.lbd_drop_events = {"original": 0, "learnt": 0}
        self.conflicts = 0
        self.decisions = 0
        self.restarts = 0
        self.reductions = 0
        self.viv_passes = 0
        self.preprocess_clauses_checked = 0
        self.preprocess_clauses_vivified = 0
        self.preprocess_propagations = 0
        self.preprocess_last_clause_propagations = 0
        self.preprocess_time = 0.0
        self.search_time = 0.0

    # ----- recording -----------------------------------------------------

    def record_vivify(self, kind: str, size_before: int, size_after: int,
                      rules) -> None:
        """Account one vivification attempt under its rule category."""
        if kind not in KINDS:
            raise ValueError("unknown clause kind %r" % kind)
        rules = frozenset(rules)
        if rules not in _CATEGORY_BY_RULES:
            raise ValueError("invalid rule combination %r" % set(rules))
        if not rules and size_after != size_before:
            raise ValueError("no rule fired but the clause changed size")
        if size_after > size_before:
            raise ValueError("vivification grew a clause")
        self.lits_before[kind] += size_before
        self.lits_after[kind] += size_after
        self.clauses_checked += 1
        self.clauses_checked_by_kind[kind] += 1
        if size_after < size_before:
            self.clauses_vivified += 1
            self.clauses_vivified_by_kind[kind] += 1
        self.rule_counts[_CATEGORY_BY_RULES[rules]] += 1

    # ----- derived quantities --------------------------------------------

    def reduction_ratio(self, kind: str) -> float:
        """(a - b) / a * 100 for one clause kind; 0.0 when undefined."""
        a = self.lits_before[kind]
        if a == 0:
            return 0.0
        return (a - self.lits_after[kind]) / a * 100.0

    def reduction_ratio_defined(self, kind: str) -> bool:
        return self.lits_before[kind] > 0

    def impact(self) -> float:
        a = self.lits_before["original"] + self.lits_before["learnt"]
        if a == 0:
            return 0.0
        b = self.lits_after["original"] + self.lits_after["learnt"]
        return (a - b) / a * 100.0

    def cost(self) -> float:
        """Vivification propagations per hundred search propagations."""
        if self.search_propagations == 0:
            return 0.0
        return self.viv_propagations / self.search_propagations * 100.0

    def livec(self) -> float:
        """Learnt clauses reached by the vivifier per hundred learnt."""
        if self.total_learnt == 0:
            return 0.0
        return self.clauses_checked_by_kind["learnt"] / self.total_learnt * 100.0

    def rule_percentages(self) -> dict:
        total = self.clauses_checked
        return {name: (self.rule_counts[name] / total * 100.0 if total else 0.0)
                for name in RULE_CATEGORIES}

    def lbd_cdf(self):
        """Points (x, pct of learnt clauses with LBD <= x) for x = 1..100."""
        total = sum(self.lbd_histogram.values())
        points = []
        running = 0
        for x in range(1, LBD_CDF_MAX + 1):
            running += self.lbd_histogram.get(x, 0)
            points.append((x, running / total * 100.0 if total else 0.0))
        return points

    # ----- reporting -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "impact_pct": self.impact(),
            "cost_pct": self.cost(),
            "livec_pct": self.livec(),
            "reduction_ratio_original_pct": self.reduction_ratio("original"),
            "reduction_ratio_original_defined": self.reduction_ratio_defined("original"),
            "reduction_ratio_learnt_pct": self.reduction_ratio("learnt"),
            "reduction_ratio_learnt_defined": self.reduction_ratio_defined("learnt"),
            "lits_before_original": self.lits_before["original"],
            "lits_before_learnt": self.lits_before["learnt"],
            "lits_after_original": self.lits_after["original"],
            "lits_after_learnt": self.lits_after["learnt"],
            "rule_counts": dict(self.rule_counts),
            "rule_percentages": self.rule_percentages(),
            "clauses_checked": self.clauses_checked,
            "clauses_checked_original": self.clauses_checked_by_kind["original"],
            "clauses_checked_learnt": self.clauses_checked_by_kind["learnt"],
            "clauses_vivified": self.clauses_vivified,
            "clauses_vivified_original": self.clauses_vivified_by_kind["original"],
            "clauses_vivified_learnt": self.clauses_vivified_by_kind["learnt"],
            "lbd_drop_events_original": self.lbd_drop_events["original"],
            "lbd_drop_events_learnt": self.lbd_drop_events["learnt"],
            "total_learnt": self.total_learnt,
            "conflicts": self.conflicts,
            "decisions": self.decisions,
            "restarts": self.restarts,
            "reductions": self.reductions,
            "viv_passes": self.viv_passes,
            "search_propagations": self.search_propagations,
            "viv_propagations": self.viv_propagations,
            "preprocess_clauses_checked": self.preprocess_clauses_checked,
            "preprocess_clauses_vivified": self.preprocess_clauses_vivified,
            "preprocess_propagations": self.preprocess_propagations,
            "preprocess_last_clause_propagations": self.preprocess_last_clause_propagations,
            "preprocess_time_s": self.preprocess_time,
            "search_time_s": self.search_time,
            "lbd_cdf": [[x, pct] for x, pct in self.lbd_cdf()],
        }

    def flatten(self) -> dict:
        """Scalar view shared by the CSV emitter and the schema check."""
        d = self.to_dict()
        flat = {}
        for key, value in d.items():
            if key == "rule_counts":
                for name in RULE_CATEGORIES:
                    flat["rule_count_%s" % name] = value[name]
            elif key == "rule_percentages":
                for name in RULE_CATEGORIES:
                    flat["rule_pct_%s" % name] = value[name]
            elif key == "lbd_cdf":
                for x, pct in value:
                    flat["lbd_cdf_%03d" % x] = pct
            else:
                flat[key] = value
        return flat

    def report(self, fmt: str = "human") -> str:
        if fmt == "json":
            return json.dumps(self.to_dict(), sort_keys=True)
        if fmt == "csv":
            flat = self.flatten()
            buf = io.StringIO()
            writer = csv.writer(buf)
            writer.writerow(list(flat.keys()))
            writer.writerow(list(flat.values()))
            return buf.getvalue()
        if fmt != "human":
            raise ValueError("unknown report format %r" % fmt)
        rp = self.rule_percentages()
        lines = [
            "impact      %7.2f%%" % self.impact(),
            "cost        %7.2f%%" % self.cost(),
            "livec       %7.2f%%" % self.livec(),
            "reduction   original %.2f%%  learnt %.2f%%" % (
                self.reduction_ratio("original"), self.reduction_ratio("learnt")),
            "rules       " + "  ".join(
                "%s %.1f%%" % (name, rp[name]) for name in RULE_CATEGORIES),
            "checked     %d (orig %d, learnt %d); shortened %d" % (
                self.clauses_checked,
                self.clauses_checked_by_kind["original"],
                self.clauses_checked_by_kind["learnt"],
                self.clauses_vivified),
            "conflicts   %d  decisions %d  restarts %d  reductions %d  passes %d" % (
                self.conflicts, self.decisions, self.restarts,
                self.reductions, self.viv_passes),
            "props       search %d  vivify %d  (preprocess %d)" % (
                self.search_propagations, self.viv_propagations,
                self.preprocess_propagations),
            "learnt      %d clauses" % self.total_learnt,
            "time        preprocess %.3fs  search %.3fs" % (
                self.preprocess_time, self.search_time),
        ]
        return "\n".join(lines) + "\n"
