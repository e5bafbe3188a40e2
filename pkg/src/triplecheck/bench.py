"""Benchmark loading, outcome classification, evaluation reports, and statistics.

The C1-C4 classification here is an automatic proxy for a manual protocol:
"validated" means rule A fired or some returned match scored at least tau.
The worksheet CSV exists so humans can override the automatic class.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field

from .rdf import Triple, iri, literal
from .validator import FactFailure, ValidationResult, validate_batch

GOLD_CORRECT = "correct"
GOLD_ERRONEOUS = "erroneous"
PARTS = ("persons", "places", "events", "other")
OUTCOMES = ("C1", "C2", "C3", "C4")
RULE_ROWS = ("A", "B-SP", "B-SO", "C")

HISTOGRAM_BIN_WIDTH = 0.05
# Two same-subject-predicate matches count as contradicting when their scores
# are this close and their objects and sources differ.
CONTRADICTION_SCORE_WINDOW = 0.01


class BenchmarkError(Exception):
    def __init__(self, path: str, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


@dataclass(frozen=True)
class BenchmarkRecord:
    fact: Triple
    gold: str
    entity: str
    part: str

    def __post_init__(self) -> None:
        if self.gold not in (GOLD_CORRECT, GOLD_ERRONEOUS):
            raise ValueError(f"gold must be correct|erroneous, got {self.gold!r}")
        if self.part not in PARTS:
            raise ValueError(f"part must be one of {PARTS}, got {self.part!r}")


def record_to_json(rec: BenchmarkRecord) -> dict:
    obj = rec.fact.object
    return {
        "s": rec.fact.subject.value,
        "p": rec.fact.predicate.value,
        "o": obj.value,
        "o_kind": "iri" if obj.is_iri else "literal",
        "gold": rec.gold,
        "entity": rec.entity,
        "part": rec.part,
    }


def load_benchmark(path: str) -> list[BenchmarkRecord]:
    """Read JSON-Lines benchmark records; any malformed line is a hard error."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BenchmarkError(path, lineno, f"invalid JSON: {exc}") from None
            try:
                o_kind = obj["o_kind"]
                if o_kind not in ("iri", "literal"):
                    raise ValueError(f"o_kind must be iri|literal, got {o_kind!r}")
                obj_term = iri(obj["o"]) if o_kind == "iri" else literal(obj["o"])
                records.append(BenchmarkRecord(
                    fact=Triple(iri(obj["s"]), iri(obj["p"]), obj_term),
                    gold=obj["gold"],
                    entity=obj["entity"],
                    part=obj["part"],
                ))
            except KeyError as exc:
                raise BenchmarkError(path, lineno, f"missing field {exc}") from None
            except (ValueError, TypeError) as exc:
                raise BenchmarkError(path, lineno, str(exc)) from None
    return records


def write_benchmark(path: str, records: list[BenchmarkRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_json(rec), sort_keys=True) + "\n")


def _contradicting(matches: tuple) -> bool:
    for i in range(len(matches)):
        for j in range(i + 1, len(matches)):
            a, b = matches[i], matches[j]
            ta, tb = a.triple.triple, b.triple.triple
            if ta.subject != tb.subject or ta.predicate != tb.predicate:
                continue
            if ta.object == tb.object:
                continue
            if a.triple.source == b.triple.source:
                continue
            if abs(a.score - b.score) <= CONTRADICTION_SCORE_WINDOW:
                return True
    return False


def classify(result: ValidationResult, gold: str, tau: float = 0.9) -> str:
    """Automatic C1-C4 proxy: crossing the gold label with 'validated'."""
    if not -1.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [-1, 1]")
    if result.rule == "A":
        validated = True
    else:
        validated = any(m.score >= tau for m in result.matches) and not _contradicting(result.matches)
    if gold == GOLD_CORRECT:
        return "C1" if validated else "C2"
    return "C3" if validated else "C4"


def _rule_row(result: ValidationResult, equivalence=None) -> str:
    """Rule-matrix row, splitting rule B by what the best match shared."""
    if result.rule != "B":
        return result.rule
    if not result.matches:
        return "B-SP"
    best = result.matches[0].triple.triple
    fact = result.fact
    if best.predicate == fact.predicate:
        return "B-SP"
    if equivalence is not None and equivalence.property_same(best.predicate, fact.predicate):
        return "B-SP"
    obj_equal = (
        best.object.value == fact.object.value
        if best.object.is_literal and fact.object.is_literal
        else best.object == fact.object
    )
    if obj_equal:
        return "B-SO"
    if equivalence is not None and equivalence.object_same(best.object, fact.object):
        return "B-SO"
    return "B-SP"


def _histogram_bin(score: float) -> int:
    idx = int((score + 1.0) / HISTOGRAM_BIN_WIDTH)
    return min(max(idx, 0), int(2.0 / HISTOGRAM_BIN_WIDTH) - 1)


@dataclass
class WorksheetRow:
    record: BenchmarkRecord
    result: ValidationResult | FactFailure
    outcome: str | None  # None when the record errored


@dataclass
class EvaluationReport:
    config: dict
    counts: dict[str, Counter] = field(default_factory=dict)  # part -> outcome counts
    rule_matrix: dict[str, Counter] = field(default_factory=dict)
    histogram: dict[str, Counter] = field(default_factory=dict)  # outcome -> bin index counts
    timing: dict[str, dict[str, float]] = field(default_factory=dict)
    rows: list[WorksheetRow] = field(default_factory=list)
    errored: int = 0

    # ---------------------------------------------------------------- views

    @property
    def parts(self) -> list[str]:
        return [p for p in PARTS if p in self.counts] + ["overall"]

    def outcome_counts(self, part: str) -> Counter:
        if part == "overall":
            total: Counter = Counter()
            for c in self.counts.values():
                total.update(c)
            return total
        return self.counts.get(part, Counter())

    def percentages(self, part: str) -> dict[str, float]:
        c = self.outcome_counts(part)
        correct = c["C1"] + c["C2"]
        erroneous = c["C3"] + c["C4"]
        return {
            "C1": round(100.0 * c["C1"] / correct, 2) if correct else 0.0,
            "C2": round(100.0 * c["C2"] / correct, 2) if correct else 0.0,
            "C3": round(100.0 * c["C3"] / erroneous, 2) if erroneous else 0.0,
            "C4": round(100.0 * c["C4"] / erroneous, 2) if erroneous else 0.0,
        }

    # -------------------------------------------------------------- outputs

    def to_json_dict(self, include_timings: bool = False) -> dict:
        bins = int(2.0 / HISTOGRAM_BIN_WIDTH)
        out = {
            "config": dict(self.config),
            "note": "C1-C4 are an automatic proxy (threshold tau), not manual annotation",
            "errored": self.errored,
            "outcomes": {
                part: {
                    "counts": {o: self.outcome_counts(part)[o] for o in OUTCOMES},
                    "percentages": self.percentages(part),
                }
                for part in self.parts
            },
            "rule_matrix": {
                rule: {**{o: self.rule_matrix.get(rule, Counter())[o] for o in OUTCOMES},
                       "total": sum(self.rule_matrix.get(rule, Counter()).values())}
                for rule in RULE_ROWS
            },
            "histogram": [
                {
                    "start": round(-1.0 + i * HISTOGRAM_BIN_WIDTH, 2),
                    "end": round(-1.0 + (i + 1) * HISTOGRAM_BIN_WIDTH, 2),
                    **{o: self.histogram.get(o, Counter())[i] for o in OUTCOMES},
                }
                for i in range(bins)
            ],
        }
        if include_timings:
            out["timing"] = {k: dict(v) for k, v in self.timing.items()}
        return out

    def render_text(self) -> str:
        lines = []
        cfg = self.config
        lines.append(f"Evaluation (K={cfg['k']}, tau={cfg['tau']}, backend={cfg['backend']}, "
                     f"encoder={cfg['encoder']}) -- automatic proxy classification")
        lines.append("")
        header = f"{'part':<10} {'C1':>6} {'C2':>6} {'C3':>6} {'C4':>6} {'C1%':>7} {'C2%':>7} {'C3%':>7} {'C4%':>7}"
        lines.append(header)
        lines.append("-" * len(header))
        for part in self.parts:
            c = self.outcome_counts(part)
            p = self.percentages(part)
            lines.append(f"{part:<10} {c['C1']:>6} {c['C2']:>6} {c['C3']:>6} {c['C4']:>6} "
                         f"{p['C1']:>7.2f} {p['C2']:>7.2f} {p['C3']:>7.2f} {p['C4']:>7.2f}")
        lines.append("")
        lines.append(f"{'rule':<6} {'C1':>6} {'C2':>6} {'C3':>6} {'C4':>6} {'total':>7}")
        for rule in RULE_ROWS:
            c = self.rule_matrix.get(rule, Counter())
            lines.append(f"{rule:<6} {c['C1']:>6} {c['C2']:>6} {c['C3']:>6} {c['C4']:>6} "
                         f"{sum(c.values()):>7}")
        if self.errored:
            lines.append("")
            lines.append(f"errored records (excluded from percentages): {self.errored}")
        return "\n".join(lines) + "\n"

    def write_worksheet_csv(self, path: str, k: int) -> None:
        """Annotation worksheet: the automatic class plus an empty human column."""
        fields = ["fact", "gold", "entity", "part", "rule", "fact_sentence"]
        for i in range(1, k + 1):
            fields += [f"match{i}_triple", f"match{i}_source", f"match{i}_score", f"match{i}_sentence"]
        fields += ["auto_class", "human_class"]
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(fields)
            for row in self.rows:
                rec = row.record
                if isinstance(row.result, FactFailure):
                    cells = [rec.fact.canonical(), rec.gold, rec.entity, rec.part,
                             "error", row.result.error]
                    cells += [""] * (4 * k)
                    cells += ["errored", ""]
                else:
                    res = row.result
                    cells = [rec.fact.canonical(), rec.gold, rec.entity, rec.part,
                             res.rule, res.fact_sentence]
                    for i in range(k):
                        if i < len(res.matches):
                            m = res.matches[i]
                            cells += [m.triple.triple.canonical(), m.triple.source,
                                      f"{m.score:.6f}", m.sentence]
                        else:
                            cells += ["", "", "", ""]
                    cells += [row.outcome or "", ""]
                writer.writerow(cells)

    def write_histogram_csv(self, path: str) -> None:
        bins = int(2.0 / HISTOGRAM_BIN_WIDTH)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin_start", "bin_end", "C1", "C2", "C3", "C4"])
            for i in range(bins):
                writer.writerow([
                    f"{-1.0 + i * HISTOGRAM_BIN_WIDTH:.2f}",
                    f"{-1.0 + (i + 1) * HISTOGRAM_BIN_WIDTH:.2f}",
                    *(self.histogram.get(o, Counter())[i] for o in OUTCOMES),
                ])


def evaluate(records: list[BenchmarkRecord], backend, enc, k: int = 3, tau: float = 0.9,
             parallelism: int = 1) -> EvaluationReport:
    """Validate every record, classify, and aggregate the evaluation report."""
    if not -1.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [-1, 1]")
    results = validate_batch([r.fact for r in records], backend, enc, k=k, parallelism=parallelism)
    equivalence = getattr(backend, "equivalence", None)

    report = EvaluationReport(config={
        "k": k,
        "tau": tau,
        "backend": getattr(backend, "name", "?"),
        "encoder": getattr(enc, "model_name", "?"),
    })
    rule_times: dict[str, list[float]] = {}
    part_times: dict[str, list[float]] = {}

    for rec, res in zip(records, results):
        if isinstance(res, FactFailure):
            report.errored += 1
            report.rows.append(WorksheetRow(rec, res, None))
            continue
        outcome = classify(res, rec.gold, tau)
        report.counts.setdefault(rec.part, Counter())[outcome] += 1
        report.rule_matrix.setdefault(_rule_row(res, equivalence), Counter())[outcome] += 1
        if res.matches:
            report.histogram.setdefault(outcome, Counter())[_histogram_bin(res.matches[0].score)] += 1
        total_time = sum(res.timings.values())
        rule_times.setdefault(res.rule, []).append(total_time)
        part_times.setdefault(rec.part, []).append(total_time)
        report.rows.append(WorksheetRow(rec, res, outcome))

    report.timing = {
        "per_rule": {r: sum(v) / len(v) for r, v in sorted(rule_times.items())},
        "per_part": {p: sum(v) / len(v) for p, v in sorted(part_times.items())},
    }
    return report


# --------------------------------------------------------------------- stats


@dataclass
class BenchmarkStats:
    totals: dict[str, dict]          # part -> {facts, correct, erroneous, ...}
    top_predicates: dict[str, list]  # part -> [(predicate, total, correct, erroneous)]
    dereferenceable: bool            # whether deref counts were computed

    def to_json_dict(self) -> dict:
        return {
            "totals": self.totals,
            "top_predicates": {
                part: [
                    {"predicate": p, "total": t, "correct": c, "erroneous": e}
                    for (p, t, c, e) in rows
                ]
                for part, rows in self.top_predicates.items()
            },
            "dereferenceability": "computed" if self.dereferenceable else "unavailable",
        }

    def render_text(self) -> str:
        lines = []
        header = (f"{'part':<10} {'facts':>6} {'correct':>16} {'erroneous':>16} "
                  f"{'uris (deref)':>14} {'props (deref)':>14}")
        lines.append(header)
        lines.append("-" * len(header))
        for part, row in self.totals.items():
            deref_u = f" ({row['dereferenceable_uris']})" if self.dereferenceable else ""
            deref_p = f" ({row['dereferenceable_properties']})" if self.dereferenceable else ""
            correct = f"{row['correct']} ({row['correct_pct']:.2f}%)"
            erroneous = f"{row['erroneous']} ({row['erroneous_pct']:.2f}%)"
            lines.append(
                f"{part:<10} {row['facts']:>6} {correct:>16} {erroneous:>16} "
                f"{str(row['unique_uris']) + deref_u:>14} "
                f"{str(row['unique_properties']) + deref_p:>14}")
        if not self.dereferenceable:
            lines.append("dereferenceability: unavailable (no endpoint given)")
        for part, rows in self.top_predicates.items():
            lines.append("")
            lines.append(f"top predicates ({part}):")
            for p, t, c, e in rows:
                lines.append(f"  {p:<60} total={t:<5} correct={c:<5} erroneous={e}")
        return "\n".join(lines) + "\n"


def benchmark_stats(records: list[BenchmarkRecord], deref=None, top_n: int = 10) -> BenchmarkStats:
    """Counts, splits, unique URI/property tallies, and predicate frequency tables.

    `deref` is an optional callable(uri) -> bool, wired to a SPARQL endpoint's
    dereferenceability ASK or a local graph's mention check.
    """
    parts = [p for p in PARTS if any(r.part == p for r in records)]
    totals: dict[str, dict] = {}
    top: dict[str, list] = {}
    deref_ok = deref is not None

    def summarize(name: str, group: list[BenchmarkRecord]) -> dict:
        nonlocal deref_ok
        facts = len(group)
        correct = sum(1 for r in group if r.gold == GOLD_CORRECT)
        uris = set()
        props = set()
        for r in group:
            uris.add(r.fact.subject.value)
            if r.fact.object.is_iri:
                uris.add(r.fact.object.value)
            props.add(r.fact.predicate.value)
        row = {
            "facts": facts,
            "correct": correct,
            "correct_pct": round(100.0 * correct / facts, 2) if facts else 0.0,
            "erroneous": facts - correct,
            "erroneous_pct": round(100.0 * (facts - correct) / facts, 2) if facts else 0.0,
            "unique_uris": len(uris),
            "unique_properties": len(props),
        }
        if deref is not None and deref_ok:
            try:
                row["dereferenceable_uris"] = sum(1 for u in sorted(uris) if deref(u))
                row["dereferenceable_properties"] = sum(1 for p in sorted(props) if deref(p))
            except Exception:
                deref_ok = False
        return row

    for part in parts:
        group = [r for r in records if r.part == part]
        totals[part] = summarize(part, group)
        freq: dict[str, list[int]] = {}
        for r in group:
            entry = freq.setdefault(r.fact.predicate.value, [0, 0, 0])
            entry[0] += 1
            entry[1 if r.gold == GOLD_CORRECT else 2] += 1
        ranked = sorted(freq.items(), key=lambda kv: (-kv[1][0], kv[0]))[:top_n]
        top[part] = [(p, t, c, e) for p, (t, c, e) in ranked]
    totals["overall"] = summarize("overall", records)

    if not deref_ok:
        for row in totals.values():
            row.pop("dereferenceable_uris", None)
            row.pop("dereferenceable_properties", None)
    return BenchmarkStats(totals=totals, top_predicates=top, dereferenceable=deref_ok)
