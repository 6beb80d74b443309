"""Command-line surface: synth, parse, sample, export, eval, fuzz.

Every subcommand is a thin wrapper over the library with the same arguments.
Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 round-trip
or invariant failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import random
import sys

from . import __version__
from .corpus import RATIOS, export_training_file, load_multiwoz, sample_fewshot, write_atomic
from .destate import StateExtractor
from .errors import StatesumError
from .metrics import evaluate_run
from .ontology import TemplateConfig, load_ontology, random_state
from .summarize import state_to_summary

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INVARIANT = 3

DATA_DIR_ENV = "DS2_DATA_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_template_flags(parser):
    parser.add_argument("--unnatural", action="store_true",
                        help="use the flat '{value} as {slot} of {domain}' format")
    parser.add_argument("--no-paraphrase", action="store_true",
                        help="repeat the same sentence subject instead of paraphrasing")
    parser.add_argument("--no-dontcare-concat", action="store_true",
                        help="emit dontcare as a separate sentence")
    parser.add_argument("--order", choices=["canonical", "shuffled"], default="canonical",
                        help="domain sentence order (default: canonical)")
    parser.add_argument("--seed", type=int, default=0, help="seed for any shuffling")


def _config_from(args) -> TemplateConfig:
    return TemplateConfig(
        naturalness=not args.unnatural,
        paraphrasing=not args.unnatural and not args.no_paraphrase,
        dontcare_concat=not args.unnatural and not args.no_dontcare_concat,
        domain_order=args.order,
    )


def _add_corpus_flags(parser):
    parser.add_argument("--corpus", help=f"corpus directory or zip (default: ${DATA_DIR_ENV})")
    parser.add_argument("--version", choices=["2.0", "2.1"], default="2.1")


def _corpus_from(args):
    path = args.corpus or os.environ.get(DATA_DIR_ENV)
    if not path:
        raise UsageError(f"--corpus is required (or set ${DATA_DIR_ENV})")
    return load_multiwoz(path, args.version)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="statesum", description=__doc__)
    parser.add_argument("--ontology", help="schema file (default: built-in)")
    parser.add_argument("-V", "--version-info", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="state JSON on stdin -> summary JSON on stdout")
    _add_template_flags(synth)

    parse = commands.add_parser("parse", help="summary JSON on stdin -> state JSON on stdout")
    _add_template_flags(parse)

    sample = commands.add_parser("sample", help="print a few-shot split manifest")
    _add_corpus_flags(sample)
    sample.add_argument("--mode", choices=["cd", "ct", "md"], required=True)
    sample.add_argument("--domain", help="target domain (cd/ct modes)")
    sample.add_argument("--ratio", type=float, required=True)
    sample.add_argument("--seed", type=int, required=True)
    sample.add_argument("--out", help="write the manifest here instead of stdout")

    export = commands.add_parser("export", help="write the training-label JSONL for a split")
    _add_corpus_flags(export)
    export.add_argument("--mode", choices=["cd", "ct", "md"], required=True)
    export.add_argument("--domain")
    export.add_argument("--ratio", type=float, required=True)
    _add_template_flags(export)
    export.add_argument("--out", required=True)

    evaluate = commands.add_parser("eval", help="score a prediction file and write a report")
    _add_corpus_flags(evaluate)
    evaluate.add_argument("--predictions", required=True)
    _add_template_flags(evaluate)
    evaluate.add_argument("--out", required=True)
    evaluate.add_argument("--diagnostics", help="optional per-turn diagnostics JSONL")

    fuzz = commands.add_parser("fuzz", help="run seeded round-trip trials")
    fuzz.add_argument("--trials", type=int, default=10000)
    fuzz.add_argument("--seed", type=int, default=0)
    fuzz.add_argument("--max-domains", type=int, default=5)
    fuzz.add_argument("--all-configs", action="store_true",
                      help="rotate through every natural template variant")
    return parser


def _check_ratio(ratio: float):
    if not any(math.isclose(ratio, r) for r in RATIOS):
        raise UsageError(f"--ratio must be one of {', '.join(str(r) for r in RATIOS)}")


def _cmd_synth(args, ontology) -> int:
    state = json.load(sys.stdin)
    cfg = _config_from(args)
    rng = random.Random(args.seed) if args.order == "shuffled" else None
    summary = state_to_summary(state, ontology, cfg, rng)
    json.dump({"summary": summary}, sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_parse(args, ontology) -> int:
    payload = json.load(sys.stdin)
    summary = payload["summary"] if isinstance(payload, dict) else str(payload)
    extractor = StateExtractor(ontology)
    result = extractor.parse(summary, _config_from(args))
    json.dump({"state": result.state, "diagnostics": result.diagnostics}, sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_sample(args, ontology) -> int:
    _check_ratio(args.ratio)
    corpus = _corpus_from(args)
    split = sample_fewshot(corpus, args.mode, args.domain, args.ratio, args.seed)
    manifest = json.dumps(split.to_dict(), indent=2) + "\n"
    if args.out:
        write_atomic(args.out, manifest)
    else:
        sys.stdout.write(manifest)
    return EXIT_OK


def _cmd_export(args, ontology) -> int:
    _check_ratio(args.ratio)
    corpus = _corpus_from(args)
    split = sample_fewshot(corpus, args.mode, args.domain, args.ratio, args.seed)
    diagnostics: list[str] = []
    written = export_training_file(
        split, corpus, ontology, _config_from(args), args.out, diagnostics
    )
    print(f"wrote {written} records to {args.out} ({len(diagnostics)} turns skipped)")
    return EXIT_OK


def _cmd_eval(args, ontology) -> int:
    corpus = _corpus_from(args)
    report = evaluate_run(
        args.predictions, corpus, ontology, _config_from(args),
        out=args.out, diagnostics_out=args.diagnostics,
    )
    print(
        f"scored {report.n_turns} turns: JGA {report.all_domain_jga:.4f}, "
        f"BLEU-4 {report.bleu4:.4f} -> {args.out}"
    )
    return EXIT_OK


def _cmd_fuzz(args, ontology) -> int:
    configs = [TemplateConfig()]
    if args.all_configs:
        configs = [
            TemplateConfig(paraphrasing=p, dontcare_concat=c)
            for p in (True, False)
            for c in (True, False)
        ]
    extractor = StateExtractor(ontology)
    failures = 0
    for trial in range(args.trials):
        state = random_state(ontology, seed=args.seed + trial, max_domains=args.max_domains)
        cfg = configs[trial % len(configs)]
        summary = state_to_summary(state, ontology, cfg)
        recovered = extractor.parse(summary, cfg).state
        if recovered != state:
            failures += 1
            print(f"round-trip failure at seed {args.seed + trial}:", file=sys.stderr)
            print(f"  state:     {state}", file=sys.stderr)
            print(f"  summary:   {summary}", file=sys.stderr)
            print(f"  recovered: {recovered}", file=sys.stderr)
    print(f"{args.trials - failures}/{args.trials} round-trips ok")
    return EXIT_OK if failures == 0 else EXIT_INVARIANT


_COMMANDS = {
    "synth": _cmd_synth,
    "parse": _cmd_parse,
    "sample": _cmd_sample,
    "export": _cmd_export,
    "eval": _cmd_eval,
    "fuzz": _cmd_fuzz,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        ontology = load_ontology(args.ontology)
        return _COMMANDS[args.command](args, ontology)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StatesumError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
