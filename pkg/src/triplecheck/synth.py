"""Synthetic fixtures: a seeded KG + benchmark with outcomes known by construction,
and a 2,000-fact file with the reference benchmark's exact part proportions.

Every seeded fact is built so its outcome class follows from construction
alone: validated cases verbalize to the identical sentence as their KG
counterpart (cosine exactly 1), not-validated cases either have no candidates
at all or candidates whose similarity is checked to sit far below the
threshold. The generator asserts those guarantees and refuses to emit a
benchmark that does not meet them.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field

from .bench import BenchmarkRecord, write_benchmark
from .encoders import FallbackEncoder, cosine
from .rdf import Triple, iri, literal
from .verbalize import convert_triple

DBR = "http://dbpedia.org/resource/"
DBO = "http://dbpedia.org/ontology/"
DBP = "http://dbpedia.org/property/"
YAGO = "http://yago-knowledge.org/resource/"
WKD = "http://www.wikidata.org/entity/"
WKP = "http://www.wikidata.org/prop/direct/"
OWL = "http://www.w3.org/2002/07/owl#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"

_WORDS = [
    "amber", "basalt", "cedar", "delta", "ember", "fjord", "garnet", "harbor",
    "iris", "juniper", "krill", "lantern", "meadow", "nectar", "onyx", "pylon",
    "quarry", "raven", "sable", "tundra", "umber", "velvet", "willow", "xenon",
    "yonder", "zephyr", "cobalt", "drift", "ellipse", "fathom",
]

# Disjoint spelling pool for the not-validated constructions, so fact and
# candidate objects share almost no character trigrams.
_ALT_WORDS = [
    "bloom", "crisp", "dargle", "equinox", "frost", "glyph", "hush", "ivory",
    "jolt", "knack", "lurk", "mirth", "nook", "oxbow", "plume", "quill",
    "rustic", "swoop", "thrum", "usher", "vix", "wisp", "yolk", "zig",
    "brindle", "clove", "dusk", "flick", "grotto", "haze",
]

# Keep the not-validated construction far away from the default tau of 0.9.
LOW_SCORE_CEILING = 0.8
PART_CYCLE = ("persons", "places", "events")


@dataclass
class SeededCase:
    record: BenchmarkRecord
    expected_class: str
    expected_rule: str  # matrix row: A, B-SP, B-SO, C


@dataclass
class SeededBenchmark:
    kg_files: dict[str, str]  # file stem -> N-Triples text
    cases: list[SeededCase]
    expected_overall: dict[str, int] = field(default_factory=dict)
    expected_by_part: dict[str, dict[str, int]] = field(default_factory=dict)
    expected_matrix: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def records(self) -> list[BenchmarkRecord]:
        return [c.record for c in self.cases]


class _Namer:
    """Deterministic unique local names built from a word pool."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.n = 0

    def entity(self) -> str:
        self.n += 1
        w1, w2 = self.rng.sample(_WORDS, 2)
        return f"{w1.capitalize()}_{w2.capitalize()}_{self.n}"

    def predicate(self) -> str:
        self.n += 1
        w1, w2 = self.rng.sample(_WORDS, 2)
        return f"{w1}{w2.capitalize()}{self.n}"

    def value(self) -> str:
        self.n += 1
        w1, w2 = self.rng.sample(_WORDS, 2)
        return f"{w1.capitalize()}_{w2.capitalize()}_v{self.n}"

    def phrase(self, words: int = 5) -> str:
        self.n += 1
        return " ".join(self.rng.sample(_WORDS, words)) + f" {self.n}"

    def alt_phrase(self, words: int = 5) -> str:
        self.n += 1
        return " ".join(self.rng.sample(_ALT_WORDS, words)) + f" {self.n}"


def build_seeded(seed: int = 20240916) -> SeededBenchmark:
    """30 facts per outcome class over ~60 entities and ~600 triples."""
    rng = random.Random(seed)
    names = _Namer(rng)
    enc = FallbackEncoder()

    kg: dict[str, list[Triple]] = {"core": [], "links": [], "filler": []}
    cases: list[SeededCase] = []
    entities: list[str] = []  # present entities, for filler attachment

    def sentence(t: Triple) -> str:
        return convert_triple(t).sentence

    def add_case(fact: Triple, gold: str, expected_class: str, expected_rule: str) -> None:
        part = PART_CYCLE[len(cases) % len(PART_CYCLE)]
        entity = fact.subject.value.rsplit("/", 1)[-1]
        cases.append(SeededCase(
            BenchmarkRecord(fact, gold, entity, part), expected_class, expected_rule))

    def assert_low(fact: Triple, candidates: list[Triple]) -> None:
        vecs = enc.encode([sentence(fact)] + [sentence(c) for c in candidates])
        worst = max(cosine(vecs[0], v) for v in vecs[1:])
        assert worst < LOW_SCORE_CEILING, (
            f"construction broke: candidate similarity {worst:.3f} too close to tau "
            f"for {fact.canonical()}")

    # --- C1 via rule A: each entity hosts one exact and one closure case -
    rule_a_entities = [names.entity() for _ in range(10)]
    entities.extend(rule_a_entities)
    for e in rule_a_entities:
        fact = Triple(iri(DBR + e), iri(DBO + names.predicate()), literal(names.phrase(3)))
        kg["core"].append(fact)
        add_case(fact, "correct", "C1", "A")

    for i, e in enumerate(rule_a_entities):
        p_local = names.predicate()
        q_subj = f"Q{9000 + names.n}"
        p_wkp = f"P{7000 + names.n}"
        if i < 6:
            v = names.value()
            q_obj = f"Q{5000 + names.n}"
            fact = Triple(iri(DBR + e), iri(DBO + p_local), iri(DBR + v))
            kg["core"].append(Triple(iri(WKD + q_subj), iri(WKP + p_wkp), iri(WKD + q_obj)))
            kg["links"].append(Triple(iri(DBR + v), iri(OWL + "sameAs"), iri(WKD + q_obj)))
        else:
            lex = names.phrase(3)
            fact = Triple(iri(DBR + e), iri(DBO + p_local), literal(lex))
            kg["core"].append(Triple(iri(WKD + q_subj), iri(WKP + p_wkp), literal(lex)))
        kg["links"].append(Triple(iri(DBR + e), iri(OWL + "sameAs"), iri(WKD + q_subj)))
        kg["links"].append(Triple(iri(DBO + p_local), iri(OWL + "equivalentProperty"), iri(WKP + p_wkp)))
        if i < 3:
            kg["links"].append(Triple(iri(WKD + q_subj), iri(RDFS + "label"), literal(e.replace("_", " "))))
        add_case(fact, "correct", "C1", "A")

    # --- C1 via rule B: lookalike across namespaces scores exactly 1 -----
    # Paired below with the first ten C3 rule-B cases on the same entities.
    b_entities = []
    for i in range(10):
        e = names.entity()
        entities.append(e)
        b_entities.append(e)
        if i < 5:  # same subject-predicate, object differs only by namespace
            p = iri(DBO + names.predicate())
            v = names.value()
            fact = Triple(iri(DBR + e), p, iri(DBR + v))
            match = Triple(iri(DBR + e), p, iri(YAGO + v))
            expected_rule = "B-SP"
        else:  # same subject-object, predicate differs only by namespace
            p_local = names.predicate()
            v = names.value()
            fact = Triple(iri(DBR + e), iri(DBO + p_local), iri(DBR + v))
            match = Triple(iri(DBR + e), iri(DBP + p_local), iri(DBR + v))
            expected_rule = "B-SO"
        assert sentence(fact) == sentence(match)
        kg["core"].append(match)
        add_case(fact, "correct", "C1", expected_rule)

    # --- C3 via rule B: same predicate, wrong-but-lookalike value --------
    c3b_fresh = [names.entity() for _ in range(5)]
    entities.extend(c3b_fresh)
    for i, e in enumerate(b_entities + c3b_fresh):
        p = iri(DBO + names.predicate())
        v = names.value()
        fact = Triple(iri(DBR + e), p, iri(DBR + v))
        match = Triple(iri(DBR + e), p, iri(YAGO + v))
        assert sentence(fact) == sentence(match)
        kg["core"].append(match)
        add_case(fact, "erroneous", "C3", "B-SP")

    # --- C3 via rule C: predicate and object both differ by namespace ----
    c3c_entities = [names.entity() for _ in range(10)]
    entities.extend(c3c_entities)
    for i, e in enumerate(c3b_fresh + c3c_entities):
        p_local = names.predicate()
        v = names.value()
        fact = Triple(iri(DBR + e), iri(DBO + p_local), iri(DBR + v))
        match = Triple(iri(DBR + e), iri(YAGO + p_local), iri(YAGO + v))
        assert sentence(fact) == sentence(match)
        kg["core"].append(match)
        add_case(fact, "erroneous", "C3", "C")

    # --- C2/C4 with no candidates: entities absent from the KG ----------
    for _ in range(10):
        e = names.entity()  # never added to `entities`, so never gets triples
        for gold, cls in (("correct", "C2"), ("erroneous", "C4")):
            fact = Triple(iri(DBR + e), iri(DBO + names.predicate()), literal(names.phrase(4)))
            add_case(fact, gold, cls, "C")

    # --- C2/C4 via rule B with one dissimilar same-predicate triple ------
    b_low_entities = [names.entity() for _ in range(10)]
    entities.extend(b_low_entities)
    for gold, cls in (("correct", "C2"), ("erroneous", "C4")):
        for e in b_low_entities:  # each host takes one C2 and one C4 fact
            p = iri(DBO + names.predicate())
            fact = Triple(iri(DBR + e), p, literal(names.alt_phrase(6)))
            match = Triple(iri(DBR + e), p, literal(names.phrase(6)))
            assert_low(fact, [match])
            kg["core"].append(match)
            add_case(fact, gold, cls, "B-SP")

    # --- C2/C4 via rule C over dissimilar entity triples -----------------
    c_low_fresh = [names.entity() for _ in range(10)]
    entities.extend(c_low_fresh)
    low_c_entities = c3c_entities + c_low_fresh  # C3-C hosts take a second fact
    for idx, (gold, cls) in enumerate([("correct", "C2")] * 10 + [("erroneous", "C4")] * 10):
        e = low_c_entities[idx]
        fact = Triple(iri(DBR + e), iri(DBO + names.predicate()), literal(names.alt_phrase(6)))
        add_case(fact, gold, cls, "C")

    # --- filler triples up to ~600, unique predicates and objects --------
    target_total = 600
    fillers_needed = max(0, target_total - sum(len(v) for v in kg.values()))
    for i in range(fillers_needed):
        kg["filler"].append(Triple(
            iri(DBR + entities[i % len(entities)]),
            iri(DBO + "padding" + names.predicate().capitalize()),
            literal(names.phrase(4)),
        ))

    # Every rule-C fact must stay below the threshold against all of its
    # entity's triples (fillers included).
    by_subject: dict[str, list[Triple]] = {}
    for tlist in kg.values():
        for t in tlist:
            by_subject.setdefault(t.subject.value, []).append(t)
    for case in cases:
        if case.expected_class in ("C2", "C4") and case.expected_rule == "C":
            cands = by_subject.get(case.record.fact.subject.value, [])
            if cands:
                assert_low(case.record.fact, cands)

    bench = SeededBenchmark(
        kg_files={name: "".join(t.canonical() + "\n" for t in triples)
                  for name, triples in kg.items()},
        cases=cases,
    )
    for case in cases:
        bench.expected_overall[case.expected_class] = bench.expected_overall.get(case.expected_class, 0) + 1
        part = bench.expected_by_part.setdefault(case.record.part, {})
        part[case.expected_class] = part.get(case.expected_class, 0) + 1
        row = bench.expected_matrix.setdefault(case.expected_rule, {})
        row[case.expected_class] = row.get(case.expected_class, 0) + 1
    return bench


def write_seeded(outdir: str, seed: int = 20240916) -> SeededBenchmark:
    """Materialize the seeded fixture: kg/*.nt, benchmark.jsonl, expected.json."""
    bench = build_seeded(seed)
    kg_dir = os.path.join(outdir, "kg")
    os.makedirs(kg_dir, exist_ok=True)
    for name, text in bench.kg_files.items():
        with open(os.path.join(kg_dir, name + ".nt"), "w", encoding="utf-8") as fh:
            fh.write(text)
    write_benchmark(os.path.join(outdir, "benchmark.jsonl"), bench.records)
    with open(os.path.join(outdir, "expected.json"), "w", encoding="utf-8") as fh:
        json.dump({
            "overall": bench.expected_overall,
            "by_part": bench.expected_by_part,
            "rule_matrix": bench.expected_matrix,
        }, fh, indent=2, sort_keys=True)
    return bench


# --------------------------------------------------- reference proportions

_PART_SHAPES = [
    # (part, total, correct, entity stem, predicate pool)
    ("persons", 1000, 812, "Greek_Person",
     ["occupation", "birthDate", "type", "deathDate", "birthPlace", "nationality",
      "deathPlace", "influenced", "notableWork", "field"]),
    ("places", 500, 319, "Greek_Place",
     ["type", "country", "elevation", "location", "population", "areaTotal",
      "timeZone", "settlement", "locatedIn", "length"]),
    ("events", 500, 330, "Greek_Event",
     ["date", "commander", "result", "type", "country", "magnitude",
      "casualties", "depth", "place", "combatant"]),
]


def reference_proportion_records(seed: int = 7) -> list[BenchmarkRecord]:
    """2,000 synthetic facts with the reference collection's exact splits:
    1000/500/500 facts and 812/319/330 correct per part."""
    rng = random.Random(seed)
    records = []
    for part, total, correct, stem, preds in _PART_SHAPES:
        for i in range(total):
            entity = f"{stem}_{i % 120}"
            pred = preds[i % len(preds)]
            gold = "correct" if i < correct else "erroneous"
            if i % 3 == 0:
                obj = iri(DBR + f"{stem}_Value_{rng.randrange(400)}")
            else:
                obj = literal(f"{rng.randrange(1800, 2024)}-0{1 + i % 9}-1{i % 10}")
            records.append(BenchmarkRecord(
                Triple(iri(DBR + entity), iri(DBO + pred), obj),
                gold, entity, part))
    return records


def write_reference_proportions(path: str, seed: int = 7) -> None:
    write_benchmark(path, reference_proportion_records(seed))
