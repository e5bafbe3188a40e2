#!/usr/bin/env python3
"""Generate the seeded knowledge graph + 120-fact benchmark with known outcomes.

Writes kg/*.nt, benchmark.jsonl, and expected.json into the output directory,
then prints the CLI invocation that reproduces the constructed C1-C4 counts.
"""

import argparse

from triplecheck.synth import write_seeded


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outdir", help="directory to write the fixture into")
    parser.add_argument("--seed", type=int, default=20240916)
    args = parser.parse_args()

    seeded = write_seeded(args.outdir, seed=args.seed)
    print(f"wrote {len(seeded.records)} facts over {len(seeded.kg_files)} KG files to {args.outdir}")
    print("expected outcome counts:", seeded.expected_overall)
    kg_flags = " ".join(f"--kg {args.outdir}/kg/{name}.nt" for name in seeded.kg_files)
    print("reproduce with:")
    print(f"  triplecheck bench run --benchmark {args.outdir}/benchmark.jsonl "
          f"--out-dir {args.outdir}/out {kg_flags} --tau 0.9")


if __name__ == "__main__":
    main()
