import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rand_iri, rand_kg, rand_triple
from oracles import ClosureOracle, find_candidates_oracle, triples_of_entity_oracle, warshall_closure
from triplecheck.rdf import Triple, iri, literal
from triplecheck.store import LoadError, ProvenancedTriple, build, load, load_manifest

DBR = "http://dbpedia.org/resource/"
DBO = "http://dbpedia.org/ontology/"
WKD = "http://www.wikidata.org/entity/"
WKP = "http://www.wikidata.org/prop/direct/"
OWL = "http://www.w3.org/2002/07/owl#"


def pt(s, p, o, source="test"):
    return ProvenancedTriple(Triple(s, p, o), source)


def test_load_disjoint_files(tmp_path):
    (tmp_path / "a.nt").write_text(
        "dbr:A dbo:p dbr:B .\ndbr:C dbo:p dbr:D .\ndbr:E dbo:p dbr:F .\n")
    (tmp_path / "b.nt").write_text(
        "dbr:G dbo:p dbr:H .\ndbr:I dbo:p dbr:J .\ndbr:K dbo:p dbr:L .\n")
    kg = load([str(tmp_path / "a.nt"), str(tmp_path / "b.nt")])
    assert len(kg.triples) == 6
    assert kg.source_graphs == ("a", "b")


def test_load_missing_file_raises():
    with pytest.raises(LoadError, match="nope.nt"):
        load(["/does/not/exist/nope.nt"])


def test_sameas_merges_representatives(tmp_path):
    (tmp_path / "kg.nt").write_text("dbr:Aristotle owl:sameAs wkd:Q868 .\n")
    kg = load([str(tmp_path / "kg.nt")])
    res = kg.equivalence.resources
    assert res.representative(DBR + "Aristotle") == res.representative(WKD + "Q868")


def test_closure_chain_across_files(tmp_path):
    (tmp_path / "one.nt").write_text("dbr:A owl:sameAs dbr:B .\n")
    (tmp_path / "two.nt").write_text("dbr:B owl:sameAs dbr:C .\n")
    kg = load([str(tmp_path / "one.nt"), str(tmp_path / "two.nt")])
    groups = kg.equivalence.resources.groups()
    expected = warshall_closure([(DBR + "A", DBR + "B"), (DBR + "B", DBR + "C")])
    assert groups == expected


def test_triples_of_entity_example():
    a, b, c, d = (iri(DBR + x) for x in "ABCD")
    p, q = iri(DBO + "p"), iri(DBO + "q")
    kg = build([pt(a, p, b), pt(c, q, a), pt(c, q, d)])
    hits = {x.triple for x in kg.triples_of_entity(a)}
    assert hits == {Triple(a, p, b), Triple(c, q, a)}


def test_triples_of_entity_unknown_is_empty():
    kg = build([pt(iri(DBR + "A"), iri(DBO + "p"), iri(DBR + "B"))])
    assert kg.triples_of_entity(iri(DBR + "Nowhere")) == []


def test_triples_of_entity_rejects_non_iri():
    kg = build([])
    with pytest.raises(ValueError):
        kg.triples_of_entity(literal("x"))


def test_triples_of_entity_through_sameas():
    a, a2, b = iri(DBR + "A"), iri(DBR + "A_prime"), iri(DBR + "B")
    kg = build([
        pt(a, iri(OWL + "sameAs"), a2),
        pt(a2, iri(DBO + "p"), b),
    ])
    hits = {x.triple for x in kg.triples_of_entity(a)}
    assert Triple(a2, iri(DBO + "p"), b) in hits


def test_find_equivalent_through_full_closure():
    # Aristotle's birth date expressed with Wikidata identifiers plus links.
    fact = Triple(iri(DBO + "Aristotle"), iri(DBO + "birthDate"), literal("384 BC"))
    kg = build([
        pt(iri(WKD + "Q868"), iri(WKP + "P569"), literal("384 BC"), "wikidata"),
        pt(iri(DBO + "Aristotle"), iri(OWL + "sameAs"), iri(WKD + "Q868"), "links"),
        pt(iri(DBO + "birthDate"), iri(OWL + "equivalentProperty"), iri(WKP + "P569"), "links"),
    ])
    hit = kg.find_equivalent(fact)
    assert hit is not None
    assert hit.triple.subject == iri(WKD + "Q868")
    assert hit.source == "wikidata"


def test_find_equivalent_verbatim():
    t = Triple(iri(DBR + "A"), iri(DBO + "p"), iri(DBR + "B"))
    kg = build([pt(t.subject, t.predicate, t.object)])
    assert kg.find_equivalent(t).triple == t


def test_find_equivalent_literal_mismatch_absent():
    g = iri(DBR + "Georgios_Papanikolaou")
    kg = build([pt(g, iri(DBO + "birthDate"), literal("1886-05-13"))])
    probe = Triple(g, iri(DBO + "birthDate"), literal("1883-05-13"))
    assert kg.find_equivalent(probe) is None


def test_literal_equality_ignores_datatype_tags():
    g = iri(DBR + "G")
    kg = build([pt(g, iri(DBO + "d"), literal("1886-05-13",
                                              datatype="http://www.w3.org/2001/XMLSchema#date"))])
    probe = Triple(g, iri(DBO + "d"), literal("1886-05-13"))
    assert kg.find_equivalent(probe) is not None


def test_sp_candidates_same_predicate():
    g = iri(DBR + "G")
    bd = iri(DBO + "birthDate")
    kg = build([pt(g, bd, literal("1883-05-13"))])
    got = kg.sp_so_candidates(g, bd, literal("1886-05-13"))
    assert [x.triple.object.value for x in got] == ["1883-05-13"]


def test_so_candidates_same_object():
    g = iri(DBR + "Aristophanes")
    lys = iri(DBR + "Lysistrata")
    kg = build([pt(g, iri(DBO + "author"), lys)])
    got = kg.sp_so_candidates(g, iri(DBO + "notableWorks"), lys)
    assert [x.triple.predicate.value for x in got] == [DBO + "author"]


def test_sp_so_no_shared_pair_is_empty():
    g = iri(DBR + "G")
    kg = build([pt(g, iri(DBO + "p"), literal("x"))])
    assert kg.sp_so_candidates(g, iri(DBO + "q"), literal("y")) == []


def test_sp_so_dedups_equivalent_triples():
    g = iri(DBR + "G")
    p, p2 = iri(DBO + "p"), iri(WKP + "P1")
    kg = build([
        pt(g, p, literal("v"), "alpha"),
        pt(g, p2, literal("v"), "beta"),
        pt(p, iri(OWL + "equivalentProperty"), p2, "links"),
    ])
    got = kg.sp_so_candidates(g, p, literal("other"))
    assert len(got) == 1  # the two stored triples are equivalent to each other


def test_property_links_never_merge_resources():
    kg = build([pt(iri(DBO + "p"), iri(OWL + "equivalentProperty"), iri(DBO + "q"))])
    assert not kg.equivalence.entity_same(iri(DBO + "p"), iri(DBO + "q"))
    assert kg.equivalence.property_same(iri(DBO + "p"), iri(DBO + "q"))


def test_mixed_kind_sameas_is_diagnosed():
    p = iri(DBO + "usedAsProperty")
    kg = build([
        pt(iri(DBR + "A"), p, iri(DBR + "B")),
        pt(p, iri(OWL + "sameAs"), iri(DBR + "C")),
    ])
    assert any("also used as a property" in d.message for _, d in kg.diagnostics)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(5, 120))
def test_triples_of_entity_matches_full_scan(seed, size):
    rng = random.Random(seed)
    triples = rand_kg(rng, size)
    kg = build(triples)
    oracle = ClosureOracle([x.triple for x in triples])
    e = rand_iri(rng)
    assert kg.triples_of_entity(e) == triples_of_entity_oracle(triples, oracle, e)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(5, 120))
def test_find_equivalent_matches_bruteforce(seed, size):
    rng = random.Random(seed)
    triples = rand_kg(rng, size)
    kg = build(triples)
    fact = rand_triple(rng)
    rule, cands = find_candidates_oracle(triples, fact)
    got = kg.find_equivalent(fact)
    if rule == "A":
        assert got == cands[0]
    else:
        assert got is None


def test_query_monotonicity_under_unrelated_insert():
    rng = random.Random(7)
    triples = rand_kg(rng, 60)
    kg = build(triples)
    e = rand_iri(rng)
    before = set(kg.triples_of_entity(e))
    extra = pt(iri("http://elsewhere.org/X1"), iri("http://elsewhere.org/rel"),
               iri("http://elsewhere.org/X2"), "delta")
    bigger = build(triples + [extra])
    after = set(bigger.triples_of_entity(e))
    assert before <= after


def test_load_manifest(tmp_path):
    (tmp_path / "facts.nt").write_text("dbr:A dbo:p dbr:B .\n")
    (tmp_path / "kg.manifest").write_text("# sources\ndbpedia=facts.nt\n")
    entries = load_manifest(str(tmp_path / "kg.manifest"))
    kg = load(entries)
    assert kg.source_graphs == ("dbpedia",)


def test_label_for_picks_smallest():
    q = iri(WKD + "Q868")
    rdfs_label = iri("http://www.w3.org/2000/01/rdf-schema#label")
    kg = build([
        pt(q, rdfs_label, literal("Aristotle")),
        pt(q, rdfs_label, literal("Aristoteles")),
    ])
    assert kg.label_for(q) == "Aristoteles"  # lexicographically smallest
    assert kg.label_for(iri(WKD + "Q1")) is None
