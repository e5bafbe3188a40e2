#!/usr/bin/env python3
"""Generate the 2,000-fact benchmark file with the reference part proportions
(1000/500/500 facts; 812/319/330 correct), for `triplecheck bench stats`."""

import argparse

from triplecheck.synth import write_reference_proportions


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("path", help="output JSON-Lines file")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    write_reference_proportions(args.path, seed=args.seed)
    print(f"wrote 2000 records to {args.path}")
    print(f"inspect with:\n  triplecheck bench stats --benchmark {args.path}")


if __name__ == "__main__":
    main()
