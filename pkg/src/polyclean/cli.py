"""Command-line entry point.

Subcommands: clean, parallel-filter, multiway, canaries, probe, stats,
unimax, audit-serve. Exit codes: 0 success, 2 config error, 3 data
error, 4 stage failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import canaries as can
from . import memorization as mem
from . import parallel as par
from .core import read_jsonl
from .pipeline import (
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_OK,
    EXIT_STAGE,
    ConfigError,
    PipelineConfig,
    StageFailure,
    emit_stats,
    load_config,
    run_pipeline,
    unimax_weights,
)
from .tokenizers import ToyTokenizer


def _common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", help="pipeline config file (JSON or key=value)")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--shards", type=int, default=None)
    sub.add_argument("--input")
    sub.add_argument("--output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyclean")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("clean", help="run the monolingual cleaning pipeline")
    _common(p)
    p.add_argument("--audit-decisions", help="decisions JSON from the audit service")
    p.add_argument("--reports", help="write the per-stage report chain here")

    p = subs.add_parser("parallel-filter", help="filter a TSV of sentence pairs")
    _common(p)
    p.add_argument("--report", help="write filter reports JSON here")
    p.add_argument("--no-dedup", action="store_true")
    p.add_argument("--toxicity", help="JSON mapping lang -> wordlist path")

    p = subs.add_parser("multiway", help="mine cross bitexts through English pivots")
    _common(p)
    p.add_argument("--predicate", choices=["exact", "ngram", "both"], default="both")
    p.add_argument("--report")

    p = subs.add_parser("canaries", help="plan and generate canaries")
    _common(p)
    p.add_argument("--counts", help="JSON mapping lang -> sample count")
    p.add_argument(
        "--setting",
        choices=["monolingual", "parallel", "pairwise", "generic"],
        default="monolingual",
    )
    p.add_argument("--vocab-size", type=int, default=4096)
    p.add_argument("--plan-only", action="store_true", help="emit specs without payloads")
    p.add_argument("--report")

    p = subs.add_parser("probe", help="memorization extraction probes")
    _common(p)
    p.add_argument("--lang", required=True)
    p.add_argument("--mode", choices=[mem.TRANSLATE_COPY, mem.TRANSLATE_DIFF],
                   default=mem.TRANSLATE_COPY)
    p.add_argument("--n", type=int, default=mem.DEFAULT_PROBES_PER_LANG)
    p.add_argument("--prompt-len", type=int, default=mem.DEFAULT_PROMPT_LEN)
    p.add_argument("--delta", type=int, default=mem.DEFAULT_DELTA)
    p.add_argument("--model", default="replay",
                   help="replay, random, or an http(s):// generation endpoint")
    p.add_argument("--vocab-size", type=int, default=4096)
    p.add_argument("--report")

    p = subs.add_parser("stats", help="corpus statistics JSON")
    _common(p)

    p = subs.add_parser("unimax", help="compute UniMax mixture weights")
    _common(p)
    p.add_argument("--counts", required=True, help="JSON mapping lang -> token count")
    p.add_argument("--budget", type=float, required=True)
    p.add_argument("--epochs", type=int, default=10)

    p = subs.add_parser("audit-serve", help="start the audit HTTP service")
    _common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--verdicts", required=True)
    p.add_argument("--listen", default="127.0.0.1:8765")

    return parser


def _write_or_print(path: str | None, payload: str):
    if path:
        Path(path).write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)


def cmd_clean(args) -> int:
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = PipelineConfig()
    if args.input:
        cfg.input = args.input
    if args.output:
        cfg.output = args.output
    if args.shards is not None:
        cfg.shards = args.shards
    if args.seed is not None:
        cfg.seed = args.seed
    if args.audit_decisions:
        cfg.audit_decisions = args.audit_decisions
    if not cfg.input:
        raise ConfigError("no input configured")
    result = run_pipeline(cfg)
    if args.reports:
        Path(args.reports).write_text(result.reports_json() + "\n", encoding="utf-8")
    print(f"documents in: {result.n_input}  out: {result.n_output}")
    return EXIT_OK


def cmd_parallel_filter(args) -> int:
    pairs = list(par.read_pairs(args.input))
    wordlists = None
    if args.toxicity:
        mapping = json.loads(Path(args.toxicity).read_text(encoding="utf-8"))
        wordlists = par.load_toxicity_wordlists(mapping)
    survivors, reports = par.apply_pair_filters(
        pairs, wordlists=wordlists, dedup=not args.no_dedup
    )
    par.write_pairs(args.output, survivors)
    if args.report:
        payload = json.dumps([json.loads(r.to_json()) for r in reports], sort_keys=True)
        Path(args.report).write_text(payload + "\n", encoding="utf-8")
    print(f"pairs in: {len(pairs)}  out: {len(survivors)}")
    return EXIT_OK


def cmd_multiway(args) -> int:
    pairs = list(par.read_pairs(args.input))
    report = par.MiningReport()
    mined = par.mine_multiway(pairs, predicate=args.predicate, report=report)
    par.write_pairs(args.output, mined)
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
    print(f"pivot pairs in: {len(pairs)}  mined: {len(mined)}")
    return EXIT_OK


def cmd_canaries(args) -> int:
    seed = args.seed if args.seed is not None else 0
    if args.setting == "generic":
        specs, report = can.plan_generic_canaries(seed)
    elif args.setting == "pairwise":
        specs, report = can.plan_pairwise_canaries(seed)
    else:
        if not args.counts:
            raise ConfigError("--counts is required for per-language canaries")
        counts = json.loads(Path(args.counts).read_text(encoding="utf-8"))
        table = can.load_tier_table(args.setting)
        specs, report = can.build_canary_plan(counts, table, seed)

    tokenizer = ToyTokenizer(args.vocab_size)
    if not args.plan_only:
        source = can.SyntheticDocSource(args.vocab_size)
        specs = can.realize_plan(specs, source, args.vocab_size, report)
    with open(args.output, "w", encoding="utf-8") as f:
        for spec in specs:
            f.write(spec.to_json(None if args.plan_only else tokenizer) + "\n")
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
    print(
        f"canaries: {len(specs)} unique, {sum(s.repeats for s in specs)} instances"
    )
    return EXIT_OK


def cmd_probe(args) -> int:
    tokenizer = ToyTokenizer(args.vocab_size)
    sequences = [
        tokenizer.encode(d.text) for d in read_jsonl(args.input)
        if str(d.lang) == args.lang or not args.lang
    ]
    probes = mem.sample_probes(
        sequences, args.lang, n=args.n, prompt_len=args.prompt_len,
        seed=args.seed or 0, mode=args.mode,
    )
    if not probes:
        print("warning: no eligible sequences", file=sys.stderr)
    if args.model == "replay":
        model = mem.ReplayModel.from_probes(probes)
    elif args.model == "random":
        model = mem.RandomModel(args.vocab_size, args.seed or 0)
    elif args.model.startswith(("http://", "https://")):
        model = mem.HttpModel(args.model)
    else:
        raise ConfigError(f"unknown model: {args.model}")
    results = mem.run_probes(probes, model, delta=args.delta)
    report = mem.extraction_report({args.lang: results})
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            for probe, res in zip(probes, results):
                f.write(json.dumps({
                    "lang": probe.lang, "mode": probe.mode,
                    "verbatim": res.verbatim, "approximate": res.approximate,
                    "similarity": res.similarity, "truncated": res.truncated,
                }, sort_keys=True) + "\n")
    _write_or_print(args.report, report.to_json())
    return EXIT_OK


def cmd_stats(args) -> int:
    payload = emit_stats(read_jsonl(args.input))
    _write_or_print(args.output, payload)
    return EXIT_OK


def cmd_unimax(args) -> int:
    counts = json.loads(Path(args.counts).read_text(encoding="utf-8"))
    weights = unimax_weights(counts, args.budget, args.epochs)
    _write_or_print(args.output, weights.to_json())
    return EXIT_OK


def cmd_audit_serve(args) -> int:
    from .audit import serve

    serve(args.corpus, args.verdicts, args.listen)
    return EXIT_OK


_COMMANDS = {
    "clean": cmd_clean,
    "parallel-filter": cmd_parallel_filter,
    "multiway": cmd_multiway,
    "canaries": cmd_canaries,
    "probe": cmd_probe,
    "stats": cmd_stats,
    "unimax": cmd_unimax,
    "audit-serve": cmd_audit_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, can.TierTableError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageFailure as exc:
        print(f"stage failure: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
