"""In-memory knowledge graph with provenance and equivalence closure.

Loads N-Triples files, keeps one source-graph name per file, builds the
sameAs / equivalentProperty / equivalentClass closure with union-find, and
answers the three candidate-retrieval rules locally.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .rdf import (
    OWL_EQUIVALENT_CLASS,
    OWL_EQUIVALENT_PROPERTY,
    OWL_SAME_AS,
    RDFS_LABEL,
    Diagnostic,
    PrefixMap,
    Term,
    Triple,
    parse_triples,
)


class LoadError(Exception):
    """A knowledge-graph input file could not be read."""


@dataclass(frozen=True, slots=True)
class ProvenancedTriple:
    triple: Triple
    source: str

    def __post_init__(self) -> None:
        if not self.source:
            raise ValueError("source-graph name must be non-empty")

    def sort_key(self) -> tuple[str, str]:
        return (self.triple.canonical(), self.source)


class UnionFind:
    """Disjoint sets over strings with path compression and canonical (min) members."""

    def __init__(self) -> None:
        self._parent: dict[str, str] = {}
        self._size: dict[str, int] = {}
        self._min: dict[str, str] = {}

    def find(self, x: str) -> str:
        parent = self._parent
        if x not in parent:
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        for x in (a, b):
            if x not in self._parent:
                self._parent[x] = x
                self._size[x] = 1
                self._min[x] = x
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        self._min[ra] = min(self._min[ra], self._min[rb])

    def same(self, a: str, b: str) -> bool:
        if a == b:
            return True
        if a not in self._parent or b not in self._parent:
            return False
        return self.find(a) == self.find(b)

    def representative(self, x: str) -> str:
        """The lexicographically smallest member of x's class (x itself if unseen)."""
        if x not in self._parent:
            return x
        return self._min[self.find(x)]

    def groups(self) -> list[frozenset[str]]:
        """All classes with two or more members, for closure comparisons."""
        by_root: dict[str, set[str]] = {}
        for x in self._parent:
            by_root.setdefault(self.find(x), set()).add(x)
        return sorted(
            (frozenset(g) for g in by_root.values() if len(g) > 1),
            key=lambda g: min(g),
        )


class EquivalenceIndex:
    """Partitions realizing [x]: resources by sameAs, properties by equivalentProperty,
    classes by equivalentClass. Literals are equivalent only by exact lexical form."""

    def __init__(self) -> None:
        self.resources = UnionFind()
        self.properties = UnionFind()
        self.classes = UnionFind()

    def add_statement(self, t: Triple) -> bool:
        """Fold an equivalence statement into the partitions; True if it was one."""
        if not (t.subject.is_iri and t.object.is_iri):
            return False
        p = t.predicate.value
        if p == OWL_SAME_AS:
            self.resources.union(t.subject.value, t.object.value)
        elif p == OWL_EQUIVALENT_PROPERTY:
            self.properties.union(t.subject.value, t.object.value)
        elif p == OWL_EQUIVALENT_CLASS:
            self.classes.union(t.subject.value, t.object.value)
        else:
            return False
        return True

    def entity_keys(self, term: Term) -> tuple[str, ...]:
        """Index keys for a term in an entity (subject/object) position.

        IRIs key under their resource-partition representative and, when it
        differs, their class-partition representative; the partitions stay
        separate so a stray sameAs can never merge property classes.
        """
        if term.is_iri:
            keys = {"iri:" + self.resources.representative(term.value),
                    "iri:" + self.classes.representative(term.value)}
            return tuple(sorted(keys))
        if term.is_blank:
            return ("bnode:" + term.value,)
        return ("lit:" + term.value,)

    def entity_same(self, a: Term, b: Term) -> bool:
        if a.kind != b.kind:
            return False
        if a.is_literal:
            return a.value == b.value
        return bool(set(self.entity_keys(a)) & set(self.entity_keys(b)))

    def property_same(self, a: Term, b: Term) -> bool:
        return a.is_iri and b.is_iri and self.properties.same(a.value, b.value)

    def object_same(self, a: Term, b: Term) -> bool:
        if a.is_literal or b.is_literal:
            return a.is_literal and b.is_literal and a.value == b.value
        return self.entity_same(a, b)

    def triple_equivalent(self, t: Triple, u: Triple) -> bool:
        return (
            self.entity_same(t.subject, u.subject)
            and self.property_same(t.predicate, u.predicate)
            and self.object_same(t.object, u.object)
        )


@dataclass
class KnowledgeGraph:
    """Immutable after load; indexes subjects and objects by representative keys."""

    triples: tuple[ProvenancedTriple, ...]
    equivalence: EquivalenceIndex
    diagnostics: tuple[tuple[str, Diagnostic], ...] = ()
    name: str = "local"
    _subject_index: dict[str, list[ProvenancedTriple]] = field(default_factory=dict, repr=False)
    _object_index: dict[str, list[ProvenancedTriple]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for pt in self.triples:
            for key in self.equivalence.entity_keys(pt.triple.subject):
                self._subject_index.setdefault(key, []).append(pt)
            for key in self.equivalence.entity_keys(pt.triple.object):
                self._object_index.setdefault(key, []).append(pt)

    @property
    def source_graphs(self) -> tuple[str, ...]:
        return tuple(sorted({pt.source for pt in self.triples}))

    def triples_of_entity(self, e: Term) -> list[ProvenancedTriple]:
        """All triples where e (up to equivalence) appears as subject or object."""
        if not e.is_iri:
            raise ValueError("entity lookups require an IRI")
        hits: set[ProvenancedTriple] = set()
        for key in self.equivalence.entity_keys(e):
            hits.update(self._subject_index.get(key, ()))
            hits.update(self._object_index.get(key, ()))
        return sorted(hits, key=ProvenancedTriple.sort_key)

    def find_equivalent(self, t: Triple) -> ProvenancedTriple | None:
        """Rule A: the same or an equivalent triple, minimal under canonical order."""
        if not t.subject.is_iri:
            raise ValueError("rule A requires an IRI subject")
        eq = self.equivalence
        for pt in self.triples_of_entity(t.subject):
            if eq.triple_equivalent(t, pt.triple):
                return pt
        return None

    def sp_so_candidates(self, e: Term, p: Term, o: Term) -> list[ProvenancedTriple]:
        """Rule B: triples with subject ~ e sharing the predicate or the object,
        deduplicated by equivalence-canonical form."""
        if not e.is_iri:
            raise ValueError("rule B requires an IRI subject")
        eq = self.equivalence
        picked: dict[tuple, ProvenancedTriple] = {}
        for pt in self.triples_of_entity(e):
            t = pt.triple
            if not eq.entity_same(t.subject, e):
                continue
            if not (eq.property_same(t.predicate, p) or eq.object_same(t.object, o)):
                continue
            key = self._canonical_key(t)
            held = picked.get(key)
            if held is None or pt.sort_key() < held.sort_key():
                picked[key] = pt
        return sorted(picked.values(), key=ProvenancedTriple.sort_key)

    def _canonical_key(self, t: Triple) -> tuple:
        eq = self.equivalence
        obj = t.object
        if obj.is_iri:
            okey: tuple = self.equivalence.entity_keys(obj)
        elif obj.is_blank:
            okey = ("bnode:" + obj.value,)
        else:
            okey = ("lit:" + obj.value,)
        return (eq.entity_keys(t.subject), eq.properties.representative(t.predicate.value), okey)

    def all_triples_of(self, e: Term) -> tuple[list[ProvenancedTriple], bool]:
        """Rule C backend hook: every triple of the entity, never truncated locally."""
        return self.triples_of_entity(e), False

    def label_for(self, term: Term) -> str | None:
        """Lexicographically smallest rdfs:label of the term's equivalence class."""
        if not term.is_iri:
            return None
        labels = [
            pt.triple.object.value
            for pt in self.triples_of_entity(term)
            if pt.triple.predicate.value == RDFS_LABEL
            and pt.triple.object.is_literal
            and self.equivalence.entity_same(pt.triple.subject, term)
        ]
        return min(labels) if labels else None

    def mentions(self, uri: str) -> bool:
        """True if any triple uses the URI as subject, predicate, or object."""
        for pt in self.triples:
            t = pt.triple
            if (t.subject.is_iri and t.subject.value == uri) \
                    or t.predicate.value == uri \
                    or (t.object.is_iri and t.object.value == uri):
                return True
        return False


def build(triples: list[ProvenancedTriple],
          diagnostics: list[tuple[str, Diagnostic]] | None = None) -> KnowledgeGraph:
    """Index a triple list into a queryable graph.

    Equivalence statements found among the triples feed the closure and stay
    stored as ordinary triples too.
    """
    diagnostics = list(diagnostics or [])
    equivalence = EquivalenceIndex()
    for pt in triples:
        equivalence.add_statement(pt.triple)

    predicates = {pt.triple.predicate.value for pt in triples}
    for pt in triples:
        t = pt.triple
        if t.predicate.value == OWL_SAME_AS:
            for end in (t.subject, t.object):
                if end.is_iri and end.value in predicates:
                    diagnostics.append((pt.source, Diagnostic(
                        0, "warning",
                        f"sameAs links {end.value}, which is also used as a property; "
                        "partitions are kept separate by kind")))

    return KnowledgeGraph(
        triples=tuple(sorted(set(triples), key=ProvenancedTriple.sort_key)),
        equivalence=equivalence,
        diagnostics=tuple(diagnostics),
    )


def load(files: list[tuple[str, str]] | list[str], prefixes: PrefixMap | None = None) -> KnowledgeGraph:
    """Load N-Triples files into one graph; each entry is a path or (path, name).

    Parse problems surface as diagnostics, never as load failures.
    """
    triples: list[ProvenancedTriple] = []
    diagnostics: list[tuple[str, Diagnostic]] = []

    for entry in files:
        if isinstance(entry, tuple):
            path, source = entry
        else:
            path, source = entry, os.path.splitext(os.path.basename(entry))[0]
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise LoadError(f"cannot read knowledge-graph file {path}: {exc}") from exc
        report = parse_triples(text, prefixes)
        diagnostics.extend((source, d) for d in report.diagnostics)
        triples.extend(ProvenancedTriple(t, source) for t in report.triples)

    return build(triples, diagnostics)


def load_manifest(path: str) -> list[tuple[str, str]]:
    """Read a `name=path` manifest; relative paths resolve against the manifest."""
    base = os.path.dirname(os.path.abspath(path))
    out: list[tuple[str, str]] = []
    try:
        with open(path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"bad manifest line (expected name=path): {line!r}")
                name, p = line.split("=", 1)
                p = p.strip()
                if not os.path.isabs(p):
                    p = os.path.join(base, p)
                out.append((p, name.strip()))
    except OSError as exc:
        raise LoadError(f"cannot read manifest {path}: {exc}") from exc
    return out
