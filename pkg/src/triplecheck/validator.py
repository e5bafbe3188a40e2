"""Candidate retrieval (rules A/B/C), ranking by cosine similarity, top-K results.

Rules are tried strictly in order: A (same or equivalent triple), B (same
subject-predicate or subject-object), C (every triple of the entity). The
winner's candidates are verbalized, encoded in one batch, scored against the
fact's vector, and the K best come back with provenance and scores.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .encoders import cosine
from .rdf import Triple
from .store import ProvenancedTriple
from .verbalize import convert_triple

RULE_A = "A"
RULE_B = "B"
RULE_C = "C"


class BlankSubjectError(ValueError):
    """Facts anchored on a blank node cannot be looked up in a knowledge graph."""


@dataclass(frozen=True)
class CandidateSet:
    rule: str
    candidates: tuple[ProvenancedTriple, ...]
    truncated: bool = False

    def __post_init__(self) -> None:
        if self.rule == RULE_A and len(self.candidates) != 1:
            raise ValueError("rule A carries exactly one candidate")
        if self.rule == RULE_B and not self.candidates:
            raise ValueError("rule B requires at least one candidate")


@dataclass(frozen=True)
class RankedMatch:
    triple: ProvenancedTriple
    score: float
    sentence: str

    def to_dict(self) -> dict:
        return {
            "triple": self.triple.triple.canonical(),
            "source": self.triple.source,
            "score": self.score,
            "sentence": self.sentence,
        }


@dataclass(frozen=True)
class ValidationResult:
    fact: Triple
    fact_sentence: str
    rule: str
    matches: tuple[RankedMatch, ...]
    timings: dict[str, float] = field(default_factory=dict)
    backend_name: str = ""
    truncated: bool = False

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {
            "fact": self.fact.canonical(),
            "fact_sentence": self.fact_sentence,
            "rule": self.rule,
            "backend": self.backend_name,
            "truncated": self.truncated,
            "matches": [m.to_dict() for m in self.matches],
        }
        if include_timings:
            out["timings"] = dict(self.timings)
        return out


@dataclass(frozen=True)
class FactFailure:
    """In-slot record for a fact that could not be validated inside a batch."""

    fact: Triple | None
    error: str

    def to_dict(self, include_timings: bool = False) -> dict:
        return {"fact": self.fact.canonical() if self.fact else None, "error": self.error}


def _check_fact(fact: Triple) -> None:
    if fact.subject.is_blank:
        raise BlankSubjectError(f"fact has a blank-node subject: {fact.canonical()}")


def find_candidates(fact: Triple, backend) -> CandidateSet:
    """Apply rules A, B, C in order and return the first that yields candidates."""
    _check_fact(fact)
    hit = backend.find_equivalent(fact)
    if hit is not None:
        return CandidateSet(RULE_A, (hit,))
    same_pairs = backend.sp_so_candidates(fact.subject, fact.predicate, fact.object)
    if same_pairs:
        return CandidateSet(RULE_B, tuple(same_pairs))
    everything, truncated = backend.all_triples_of(fact.subject)
    return CandidateSet(RULE_C, tuple(everything), truncated)


def rank(fact: Triple, cands: CandidateSet, enc, k: int, label_source=None,
         _timings: dict[str, float] | None = None) -> list[RankedMatch]:
    """Score every candidate against the fact, return the top-K.

    Sorted by score descending; ties break on the candidate's canonical
    serialization, then its source graph, so results are reproducible.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not cands.candidates:
        return []
    t0 = time.perf_counter()
    fact_sentence = convert_triple(fact, label_source).sentence
    sentences = [convert_triple(pt.triple, label_source).sentence for pt in cands.candidates]
    vectors = enc.encode([fact_sentence] + sentences)
    t1 = time.perf_counter()
    fact_vec = vectors[0]
    scored = [
        RankedMatch(pt, cosine(fact_vec, vec), sentence)
        for pt, vec, sentence in zip(cands.candidates, vectors[1:], sentences)
    ]
    scored.sort(key=lambda m: (-m.score, m.triple.triple.canonical(), m.triple.source))
    t2 = time.perf_counter()
    if _timings is not None:
        _timings["encoding"] = t1 - t0
        _timings["ranking"] = t2 - t1
    return scored[:k]


def fact_sentence(fact: Triple, label_source=None) -> str:
    return convert_triple(fact, label_source).sentence


def validate(fact: Triple, backend, enc, k: int = 3) -> ValidationResult:
    """Run the full pipeline for one fact."""
    _check_fact(fact)
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    cands = find_candidates(fact, backend)
    timings["candidate-retrieval"] = time.perf_counter() - t0
    timings["encoding"] = 0.0
    timings["ranking"] = 0.0
    matches = rank(fact, cands, enc, k, label_source=backend, _timings=timings)
    return ValidationResult(
        fact=fact,
        fact_sentence=fact_sentence(fact, backend),
        rule=cands.rule,
        matches=tuple(matches),
        timings=timings,
        backend_name=backend.name,
        truncated=cands.truncated,
    )


def validate_batch(facts: list[Triple], backend, enc, k: int = 3,
                   parallelism: int = 1) -> list[ValidationResult | FactFailure]:
    """Validate many facts; output order matches input order at any parallelism.

    Per-fact errors land in their slot as FactFailure instead of aborting the
    whole batch.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be at least 1")

    def one(fact: Triple) -> ValidationResult | FactFailure:
        try:
            return validate(fact, backend, enc, k)
        except Exception as exc:
            return FactFailure(fact, f"{type(exc).__name__}: {exc}")

    if not facts:
        return []
    if parallelism == 1:
        return [one(f) for f in facts]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(one, facts))
