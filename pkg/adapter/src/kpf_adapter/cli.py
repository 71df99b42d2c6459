"""Command-line entry points: finetune, train-scorer, serve."""

from __future__ import annotations

import argparse
import sys

from .data import read_candidates_file, read_corpus_file, read_split_file
from .generator import FinetuneConfig, finetune_generator, load_generator
from .scorer import CrossTrainConfig, load_scorer, train_cross_encoder
from .serve import serve


def _cmd_finetune(args: argparse.Namespace) -> int:
    samples = [s for s in read_split_file(args.split) if s.kind == args.kind] if args.filter_kind \
        else read_split_file(args.split)
    defaults = FinetuneConfig.defaults_for(args.kind)
    config = FinetuneConfig(
        kind=args.kind,
        epochs=args.epochs if args.epochs is not None else defaults.epochs,
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        base_model=args.base_model,
    )
    out = finetune_generator(samples, config, args.out, seed=args.seed)
    print(out)
    return 0


def _cmd_train_scorer(args: argparse.Namespace) -> int:
    docs = read_corpus_file(args.corpus)
    candidates = read_candidates_file(args.candidates)
    config = CrossTrainConfig(
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        epochs=args.epochs,
        negative_filtering=not args.no_negative_filtering,
    )
    out = train_cross_encoder(docs, candidates, config, args.out, seed=args.seed)
    print(out)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    generators = {}
    if args.present_model:
        generators["present"] = load_generator(args.present_model)
    if args.absent_model:
        generators["absent"] = load_generator(args.absent_model)
    if not generators:
        raise ValueError("serve needs --present-model and/or --absent-model")
    scorer = load_scorer(args.scorer)
    return serve(generators, scorer, beams=args.beams)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kpf-adapter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finetune", help="finetune one generator on one kind's split file")
    p.add_argument("--split", required=True, help="split file (id/input/targets/kind records)")
    p.add_argument("--kind", choices=["present", "absent"], required=True)
    p.add_argument("--out", required=True, help="artifact directory")
    p.add_argument("--epochs", type=int, default=None, help="default: 4 present, 8 absent")
    p.add_argument("--learning-rate", type=float, default=1e-5)
    p.add_argument("--batch-size", type=int, default=12)
    p.add_argument("--base-model", default="tiny-random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--filter-kind",
        action="store_true",
        help="drop records of the other kind instead of rejecting them",
    )
    p.set_defaults(func=_cmd_finetune)

    p = sub.add_parser("train-scorer", help="train the cross-encoder on labeled candidates")
    p.add_argument("--corpus", required=True, help="corpus file with reference keyphrases")
    p.add_argument("--candidates", required=True, help="candidates file to label and train on")
    p.add_argument("--out", required=True, help="artifact directory")
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--learning-rate", type=float, default=5e-6)
    p.add_argument("--batch-size", type=int, default=24)
    p.add_argument("--no-negative-filtering", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train_scorer)

    p = sub.add_parser("serve", help="speak the wire protocol on stdin/stdout")
    p.add_argument("--present-model", help="generator artifact for present requests")
    p.add_argument("--absent-model", help="generator artifact for absent requests")
    p.add_argument("--scorer", required=True, help="cross-encoder artifact")
    p.add_argument("--beams", type=int, default=5)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    import os

    # keep stderr usable as a log stream for the wire protocol
    os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"kpf-adapter: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
