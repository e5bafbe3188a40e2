"""Independent brute-force oracles the implementation is checked against.

Nothing here reuses the package's union-find, indexes, or candidate logic:
closure is Floyd-Warshall over a boolean matrix, retrieval rules are literal
set comprehensions over full scans, ranking is score-everything-then-sort.
"""

from __future__ import annotations

from triplecheck.encoders import cosine
from triplecheck.rdf import (
    OWL_EQUIVALENT_CLASS,
    OWL_EQUIVALENT_PROPERTY,
    OWL_SAME_AS,
    Term,
    Triple,
)
from triplecheck.store import ProvenancedTriple
from triplecheck.verbalize import convert_triple


def warshall_closure(edges: list[tuple[str, str]]) -> list[frozenset[str]]:
    """Transitive-symmetric-reflexive closure; classes with two or more members."""
    nodes = sorted({x for e in edges for x in e})
    idx = {x: i for i, x in enumerate(nodes)}
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for i in range(n):
        reach[i][i] = True
    for a, b in edges:
        reach[idx[a]][idx[b]] = True
        reach[idx[b]][idx[a]] = True
    for k in range(n):
        rk = reach[k]
        for i in range(n):
            if reach[i][k]:
                ri = reach[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    classes = {}
    for i, x in enumerate(nodes):
        members = frozenset(nodes[j] for j in range(n) if reach[i][j])
        if len(members) > 1:
            classes[min(members)] = members
    return sorted(classes.values(), key=min)


class ClosureOracle:
    """Equivalence tests backed by Warshall closure over explicit edge lists."""

    def __init__(self, triples: list[Triple]):
        entity_edges = []
        property_edges = []
        for t in triples:
            if not (t.subject.is_iri and t.object.is_iri):
                continue
            if t.predicate.value == OWL_SAME_AS:
                entity_edges.append((t.subject.value, t.object.value))
            elif t.predicate.value == OWL_EQUIVALENT_CLASS:
                entity_edges.append((t.subject.value, t.object.value))
            elif t.predicate.value == OWL_EQUIVALENT_PROPERTY:
                property_edges.append((t.subject.value, t.object.value))
        self._entity = {}
        for group in warshall_closure(entity_edges):
            for member in group:
                self._entity[member] = group
        self._property = {}
        for group in warshall_closure(property_edges):
            for member in group:
                self._property[member] = group

    def entity_same(self, a: Term, b: Term) -> bool:
        if a.kind != b.kind:
            return False
        if a.is_literal or a.is_blank:
            return a.value == b.value
        if a.value == b.value:
            return True
        return b.value in self._entity.get(a.value, frozenset())

    def property_same(self, a: Term, b: Term) -> bool:
        if not (a.is_iri and b.is_iri):
            return False
        if a.value == b.value:
            return True
        return b.value in self._property.get(a.value, frozenset())

    def object_same(self, a: Term, b: Term) -> bool:
        if a.is_literal or b.is_literal:
            return a.is_literal and b.is_literal and a.value == b.value
        return self.entity_same(a, b)

    def triple_equivalent(self, t: Triple, u: Triple) -> bool:
        return (self.entity_same(t.subject, u.subject)
                and self.property_same(t.predicate, u.predicate)
                and self.object_same(t.object, u.object))

    def entity_class_key(self, term: Term) -> object:
        if term.is_iri:
            group = self._entity.get(term.value)
            return ("iri", min(group) if group else term.value)
        return (term.kind, term.value)

    def property_class_key(self, value: str) -> str:
        group = self._property.get(value)
        return min(group) if group else value


def triples_of_entity_oracle(kg: list[ProvenancedTriple], oracle: ClosureOracle,
                             e: Term) -> list[ProvenancedTriple]:
    """Full-scan T_KG(e): [s] = e or [o] = e."""
    return sorted(
        (pt for pt in kg
         if oracle.entity_same(pt.triple.subject, e) or oracle.entity_same(pt.triple.object, e)),
        key=ProvenancedTriple.sort_key,
    )


def find_candidates_oracle(kg: list[ProvenancedTriple], fact: Triple
                           ) -> tuple[str, list[ProvenancedTriple]]:
    """Literal rules A, B, C over full scans, with matching dedup and order."""
    oracle = ClosureOracle([pt.triple for pt in kg])
    entity_triples = triples_of_entity_oracle(kg, oracle, fact.subject)

    equivalents = sorted(
        (pt for pt in entity_triples if oracle.triple_equivalent(fact, pt.triple)),
        key=ProvenancedTriple.sort_key,
    )
    if equivalents:
        return "A", [equivalents[0]]

    picked: dict[object, ProvenancedTriple] = {}
    for pt in entity_triples:
        t = pt.triple
        if not oracle.entity_same(t.subject, fact.subject):
            continue
        if not (oracle.property_same(t.predicate, fact.predicate)
                or oracle.object_same(t.object, fact.object)):
            continue
        key = (oracle.entity_class_key(t.subject),
               oracle.property_class_key(t.predicate.value),
               oracle.entity_class_key(t.object) if not t.object.is_literal
               else ("lit", t.object.value))
        if key not in picked or pt.sort_key() < picked[key].sort_key():
            picked[key] = pt
    if picked:
        return "B", sorted(picked.values(), key=ProvenancedTriple.sort_key)

    return "C", entity_triples


def rank_oracle(fact: Triple, candidates: list[ProvenancedTriple], enc, k: int,
                label_source=None) -> list[tuple[ProvenancedTriple, float]]:
    """Score every candidate one by one, sort by (-score, canonical, source), cut K."""
    fact_vec = enc.encode([convert_triple(fact, label_source).sentence])[0]
    scored = []
    for pt in candidates:
        vec = enc.encode([convert_triple(pt.triple, label_source).sentence])[0]
        scored.append((pt, cosine(fact_vec, vec)))
    scored.sort(key=lambda pair: (-pair[1], pair[0].triple.canonical(), pair[0].source))
    return scored[:k]
