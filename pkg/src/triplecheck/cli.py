"""Command-line surface: validate facts, ask an LLM and validate its output,
run or inspect benchmarks.

Exit codes: 0 all facts processed, 1 configuration or input-file error,
2 at least one per-fact error. Output is byte-stable across runs; timings
are only included with --timings.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bench as benchmod
from . import llm as llmmod
from .encoders import open_encoder
from .rdf import DEFAULT_PREFIXES, load_prefix_file, parse_fact
from .remote import FACT_SERVICE, SPARQL, EndpointConfig, open_backend
from .store import load as load_kg
from .store import load_manifest
from .validator import FactFailure, validate_batch

CONFIG_ERROR = 1
FACT_ERROR = 2


class CliError(Exception):
    """Configuration problem; maps to exit code 1."""


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kg", action="append", default=[], metavar="FILE",
                   help="N-Triples file for the local backend (repeatable)")
    p.add_argument("--manifest", metavar="FILE",
                   help="name=path manifest of N-Triples files")
    p.add_argument("--sparql", metavar="URL", help="SPARQL endpoint URL")
    p.add_argument("--fact-service", metavar="URL", help="fact-service endpoint URL")
    p.add_argument("--encoder", default="fallback", metavar="SPEC",
                   help="'fallback' or a sidecar address host:port (default: fallback)")
    p.add_argument("--prefixes", metavar="FILE", help="prefix map file (label=namespace lines)")
    p.add_argument("--k", type=int, default=3, help="top-K matches to return (default 3)")
    p.add_argument("--tau", type=float, default=0.9,
                   help="validation threshold for benchmark classification (default 0.9)")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--output", choices=["json", "text"], default="text")
    p.add_argument("--timings", action="store_true", help="include timings in JSON output")


def _prefixes(args):
    if args.prefixes:
        return load_prefix_file(args.prefixes)
    return DEFAULT_PREFIXES


def _backend(args, prefixes):
    chosen = [bool(args.kg or args.manifest), bool(args.sparql), bool(args.fact_service)]
    if sum(chosen) != 1:
        raise CliError("select exactly one backend: --kg/--manifest, --sparql, or --fact-service")
    if args.k < 1:
        raise CliError("--k must be at least 1")
    if not -1.0 <= args.tau <= 1.0:
        raise CliError("--tau must lie in [-1, 1]")
    if args.parallelism < 1:
        raise CliError("--parallelism must be at least 1")
    if args.sparql:
        return open_backend(EndpointConfig(args.sparql, kind=SPARQL, name="sparql"))
    if args.fact_service:
        return open_backend(EndpointConfig(args.fact_service, kind=FACT_SERVICE, name="fact-service"))
    files = list(load_manifest(args.manifest)) if args.manifest else []
    files += args.kg
    return load_kg(files, prefixes)


def _print_results(args, results, out=None) -> None:
    out = out or sys.stdout
    if args.output == "json":
        payload = {"results": [r.to_dict(include_timings=args.timings) for r in results]}
        json.dump(payload, out, indent=2, sort_keys=True)
        out.write("\n")
        return
    for r in results:
        if isinstance(r, FactFailure):
            fact = r.fact.canonical() if r.fact else "<unparsed>"
            out.write(f"fact: {fact}\n  error: {r.error}\n\n")
            continue
        out.write(f"fact: {r.fact.canonical()}\n")
        out.write(f"  sentence: {r.fact_sentence}\n")
        out.write(f"  rule: {r.rule}" + ("  (truncated candidates)" if r.truncated else "") + "\n")
        if not r.matches:
            out.write("  no matches\n")
        for i, m in enumerate(r.matches, start=1):
            out.write(f"  match {i}: score={m.score:.4f} source={m.triple.source}\n")
            out.write(f"    triple: {m.triple.triple.canonical()}\n")
            out.write(f"    sentence: {m.sentence}\n")
        out.write("\n")


def _cmd_validate(args) -> int:
    prefixes = _prefixes(args)
    backend = _backend(args, prefixes)
    enc = open_encoder(args.encoder)

    texts: list[str] = []
    if args.facts_file:
        with open(args.facts_file, encoding="utf-8") as fh:
            texts = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if args.fact:
        texts.append(args.fact)
    if not texts:
        raise CliError("nothing to validate: pass a fact or --facts-file")

    facts = []
    failures: list[FactFailure] = []
    for text in texts:
        try:
            facts.append(parse_fact(text, prefixes))
        except ValueError as exc:
            failures.append(FactFailure(None, f"parse error: {exc} in {text!r}"))

    results = validate_batch(facts, backend, enc, k=args.k, parallelism=args.parallelism)
    all_results = list(results) + failures
    _print_results(args, all_results)
    return FACT_ERROR if any(isinstance(r, FactFailure) for r in all_results) else 0


def _cmd_ask(args) -> int:
    prefixes = _prefixes(args)
    backend = _backend(args, prefixes)
    enc = open_encoder(args.encoder)
    try:
        llm_cfg = llmmod.LlmClientConfig(
            mode=args.llm,
            fixtures_dir=args.fixtures,
            model_name=args.model,
            base_url=args.llm_url,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None

    spec = llmmod.PromptSpec(args.shape, args.payload, args.format)
    prompt = llmmod.build_prompt(spec)
    try:
        response = llmmod.fetch_response(llm_cfg, prompt)
    except llmmod.NoFixtureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FACT_ERROR

    report = llmmod.extract_facts(response, prefixes)
    if not report.triples:
        print(f"prompt {llmmod.prompt_key(prompt)[:12]}: 0 facts extracted "
              f"({len(report.skipped)} lines skipped)")
        return 0
    print(f"prompt {llmmod.prompt_key(prompt)[:12]}: {len(report.triples)} facts extracted, "
          f"{len(report.skipped)} lines skipped")
    results = validate_batch(list(report.triples), backend, enc,
                             k=args.k, parallelism=args.parallelism)
    _print_results(args, results)
    return FACT_ERROR if any(isinstance(r, FactFailure) for r in results) else 0


def _cmd_bench(args) -> int:
    prefixes = _prefixes(args)
    try:
        records = benchmod.load_benchmark(args.benchmark)
    except benchmod.BenchmarkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG_ERROR

    if args.bench_cmd == "stats":
        deref = None
        if args.sparql:
            deref = open_backend(EndpointConfig(args.sparql, kind=SPARQL, name="sparql")).check_dereferencable
        elif args.kg or args.manifest:
            deref = _backend(args, prefixes).mentions
        stats = benchmod.benchmark_stats(records, deref=deref)
        if args.out_dir:
            os.makedirs(args.out_dir, exist_ok=True)
            with open(os.path.join(args.out_dir, "stats.json"), "w", encoding="utf-8") as fh:
                json.dump(stats.to_json_dict(), fh, indent=2, sort_keys=True)
        print(stats.render_text(), end="")
        return 0

    backend = _backend(args, prefixes)
    enc = open_encoder(args.encoder)
    report = benchmod.evaluate(records, backend, enc, k=args.k, tau=args.tau,
                               parallelism=args.parallelism)
    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report.to_json_dict(include_timings=args.timings), fh, indent=2, sort_keys=True)
    with open(os.path.join(args.out_dir, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(report.render_text())
    report.write_worksheet_csv(os.path.join(args.out_dir, "worksheet.csv"), k=args.k)
    report.write_histogram_csv(os.path.join(args.out_dir, "histogram.csv"))
    print(report.render_text(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triplecheck",
        description="Validate RDF facts against knowledge graphs with similarity-ranked evidence.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="validate a fact (or file of facts)")
    _add_common_flags(p_val)
    p_val.add_argument("fact", nargs="?", help="one statement, N-Triples or prefixed form")
    p_val.add_argument("--facts-file", metavar="FILE", help="file with one statement per line")
    p_val.set_defaults(func=_cmd_validate)

    p_ask = sub.add_parser("ask", help="prompt an LLM for facts and validate them")
    _add_common_flags(p_ask)
    p_ask.add_argument("payload", help="entity name, source text, or question")
    p_ask.add_argument("--shape", choices=["entity", "text", "question"], default="question")
    p_ask.add_argument("--format", default="DBpedia", help="format name used in the prompt")
    p_ask.add_argument("--llm", choices=["replay", "http"], default="replay")
    p_ask.add_argument("--fixtures", metavar="DIR", help="fixture directory for replay mode")
    p_ask.add_argument("--model", default="gpt-3.5-turbo")
    p_ask.add_argument("--llm-url", default="https://api.openai.com/v1")
    p_ask.set_defaults(func=_cmd_ask)

    p_bench = sub.add_parser("bench", help="benchmark evaluation and statistics")
    bench_sub = p_bench.add_subparsers(dest="bench_cmd", required=True)
    for name, help_text in (("run", "run the evaluation and write report files"),
                            ("stats", "benchmark composition statistics")):
        bp = bench_sub.add_parser(name, help=help_text)
        _add_common_flags(bp)
        bp.add_argument("--benchmark", required=True, metavar="FILE")
        bp.add_argument("--out-dir", metavar="DIR",
                        **({"required": True} if name == "run" else {}))
        bp.set_defaults(func=_cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
