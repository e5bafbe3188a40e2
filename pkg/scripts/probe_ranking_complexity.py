#!/usr/bin/env python3
"""Measure ranking time against candidate-set size.

Candidate scoring plus the final sort should grow like n log n; prints the
wall time per size and the growth ratio between decades.
"""

import argparse
import random
import time

from triplecheck.encoders import FallbackEncoder
from triplecheck.rdf import Triple, iri, literal
from triplecheck.store import ProvenancedTriple
from triplecheck.validator import CandidateSet, rank


def probe(sizes: list[int], repeats: int) -> dict[int, float]:
    enc = FallbackEncoder()
    rng = random.Random(777)
    fact = Triple(iri("http://example.org/probe"), iri("http://example.org/rel"),
                  literal("probe value"))
    timing = {}
    for n in sizes:
        cands = tuple(
            ProvenancedTriple(
                Triple(iri(f"http://example.org/e{i}"),
                       iri(f"http://example.org/p{i % 97}"),
                       literal(f"object {i} {rng.randrange(1000)}")),
                "bench")
            for i in range(n))
        cs = CandidateSet("C", cands)
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            rank(fact, cs, enc, 3)
            best = min(best, time.perf_counter() - t0)
        timing[n] = best
    return timing


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 10000])
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    timing = probe(args.sizes, args.repeats)
    prev = None
    for n, seconds in timing.items():
        ratio = f"  (x{seconds / timing[prev]:.1f} over n={prev})" if prev else ""
        print(f"n={n:>6}: {seconds * 1000:8.2f} ms{ratio}")
        prev = n


if __name__ == "__main__":
    main()
