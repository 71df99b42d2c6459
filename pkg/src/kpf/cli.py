"""Command-line pipeline orchestration.

Subcommands mirror the pipeline stages (split, augment, idf, generate,
rank, eval, report) plus `pipeline`, which runs them end to end from a
flat key=value config file, persisting every intermediate in the output
directory. All randomness flows from one seed, so identical inputs and
flags produce byte-identical output trees.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from .augment import AugmentConfig, expansion_report, shuffle_expand
from .corpus import CorpusError, Dataset, load_corpus
from .evaluate import (
    MatchConfig,
    MetricReport,
    evaluate_dataset,
    read_records,
    render_report,
    write_records,
)
from .generate import AdapterError, GenResponse, baseline_extract, run_adapter
from .scoring import (
    FusionConfig,
    IdfTable,
    ScoredCandidate,
    build_idf,
    doc_term_stats,
    rank,
    read_idf,
    tfidf_from_stats,
    write_idf,
)
from .splitter import KeyphraseKind, split_dataset, write_splits
from .textnorm import stem_key

SEED_ENV_VAR = "KPF_SEED"

_CONFIG_KEYS = {
    "train", "test", "out_dir", "shuffles", "seed", "alpha", "epsilon",
    "adapter_present", "adapter_absent", "pad_at_k", "top_k", "label",
}


@dataclass
class PipelineConfig:
    train_path: Path
    test_path: Path
    out_dir: Path
    shuffles: int = 1
    seed: int = 0
    alpha: float = 0.7
    epsilon: float = 1e-9
    adapter_present: str | None = None
    adapter_absent: str | None = None
    pad_at_k: bool = False
    top_k: int = 5
    label: str | None = None

    def validate(self) -> None:
        for path in (self.train_path, self.test_path):
            if not path.is_file():
                raise ValueError(f"corpus file not found: {path}")
        FusionConfig(alpha=self.alpha, epsilon=self.epsilon)
        AugmentConfig(shuffles=self.shuffles, seed=self.seed)
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")

    def effective_label(self) -> str:
        if self.label:
            return self.label
        generator = "adapter" if (self.adapter_present or self.adapter_absent) else "baseline"
        return f"{generator}-shuffle{self.shuffles}-alpha{self.alpha:g}"


def _parse_bool(value: str, key: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"config key {key!r}: expected a boolean, got {value!r}")


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat key=value config; '#' starts a comment, unknown keys are rejected."""
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"config file not found: {path}")
    values: dict[str, str] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = value
    return values


def _resolve_seed(flag_seed: int | None, config_seed: str | None) -> int:
    if flag_seed is not None:
        return flag_seed
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            return int(env_seed)
        except ValueError:
            raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}") from None
    if config_seed is not None:
        return int(config_seed)
    return 0


def load_pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    raw = read_config_file(args.config)
    base = Path(args.config).parent

    def path_of(key: str) -> Path | None:
        if key not in raw:
            return None
        p = Path(raw[key])
        return p if p.is_absolute() else base / p

    train = path_of("train")
    test = path_of("test")
    out_dir = path_of("out_dir")
    if train is None or test is None:
        raise ValueError("config must set both 'train' and 'test' corpus paths")

    config = PipelineConfig(
        train_path=train,
        test_path=test,
        out_dir=Path(args.out_dir) if args.out_dir else (out_dir or Path("out")),
        shuffles=args.shuffles if args.shuffles is not None else int(raw.get("shuffles", "1")),
        seed=_resolve_seed(args.seed, raw.get("seed")),
        alpha=args.alpha if args.alpha is not None else float(raw.get("alpha", "0.7")),
        epsilon=args.epsilon if args.epsilon is not None else float(raw.get("epsilon", "1e-9")),
        adapter_present=args.adapter_present or raw.get("adapter_present"),
        adapter_absent=args.adapter_absent or raw.get("adapter_absent"),
        pad_at_k=args.pad_at_k or _parse_bool(raw.get("pad_at_k", "false"), "pad_at_k"),
        top_k=args.top_k if args.top_k is not None else int(raw.get("top_k", "5")),
        label=args.label or raw.get("label"),
    )
    config.validate()
    return config


# ---------------------------------------------------------------------------
# Intermediate file formats (all line-delimited JSON)
# ---------------------------------------------------------------------------


def _write_candidates(responses: dict[str, GenResponse], path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for doc_id, response in responses.items():
            record = {
                "id": doc_id,
                "candidates": [{"phrase": p, "score": s} for p, s in response.candidates],
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _read_candidates(path: Path) -> dict[str, list[tuple[str, float]]]:
    if not path.is_file():
        raise ValueError(f"candidates file not found: {path}")
    out: dict[str, list[tuple[str, float]]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out[obj["id"]] = [(c["phrase"], float(c["score"])) for c in obj["candidates"]]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad candidates record: {exc}") from None
    return out


def _write_ranked(per_doc: dict[str, list[ScoredCandidate]], path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for doc_id, candidates in per_doc.items():
            record = {
                "id": doc_id,
                "candidates": [
                    {
                        "phrase": c.phrase,
                        "cross_score": c.cross_score,
                        "tfidf_score": c.tfidf_score,
                        "fused_log_score": c.fused_log_score,
                    }
                    for c in candidates
                ],
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _read_ranked_phrases(path: Path) -> dict[str, list[str]]:
    if not path.is_file():
        raise ValueError(f"ranked file not found: {path}")
    out: dict[str, list[str]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out[obj["id"]] = [c["phrase"] for c in obj["candidates"]]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad ranked record: {exc}") from None
    return out


# ---------------------------------------------------------------------------
# Stage implementations shared by subcommands and the pipeline
# ---------------------------------------------------------------------------


def _generate_stage(
    dataset: Dataset,
    kind: KeyphraseKind,
    idf: IdfTable | None,
    adapter_command: str | None,
    top_k: int,
) -> dict[str, GenResponse]:
    if adapter_command:
        return run_adapter(dataset, kind, adapter_command)
    if kind is KeyphraseKind.PRESENT:
        if idf is None:
            raise ValueError("the baseline generator needs an --idf table")
        return {doc.id: baseline_extract(doc, idf, top_k) for doc in dataset}
    # the baseline is purely extractive, so it cannot propose absent phrases
    return {doc.id: GenResponse(doc_id=doc.id, candidates=()) for doc in dataset}


def _rank_stage(
    dataset: Dataset,
    kind: KeyphraseKind,
    candidates: dict[str, list[tuple[str, float]]],
    idf: IdfTable,
    fusion: FusionConfig,
) -> dict[str, list[ScoredCandidate]]:
    known = {doc.id for doc in dataset}
    for doc_id in candidates:
        if doc_id not in known:
            raise ValueError(f"candidates refer to unknown doc id {doc_id!r}")
    ranked: dict[str, list[ScoredCandidate]] = {}
    for doc in dataset:
        counts, total = doc_term_stats(doc)
        scored = [
            ScoredCandidate(
                phrase=phrase,
                kind=kind,
                cross_score=cross,
                tfidf_score=tfidf_from_stats(stem_key(phrase), counts, total, idf),
            )
            for phrase, cross in candidates.get(doc.id, [])
        ]
        ranked[doc.id] = rank(scored, fusion)
    return ranked


@contextmanager
def _stage(name: str):
    try:
        yield
    except Exception as exc:
        raise RuntimeError(f"{name}: {exc}") from exc


def run_pipeline(config: PipelineConfig) -> tuple[MetricReport, MetricReport]:
    """split -> augment -> idf -> generate -> rank -> eval -> report."""
    config.validate()
    out = config.out_dir
    (out / "splits").mkdir(parents=True, exist_ok=True)
    (out / "augmented").mkdir(parents=True, exist_ok=True)
    fusion = FusionConfig(alpha=config.alpha, epsilon=config.epsilon)
    label = config.effective_label()

    with _stage("split"):
        train = load_corpus(config.train_path)
        test = load_corpus(config.test_path)
        by_kind = dict(zip((KeyphraseKind.PRESENT, KeyphraseKind.ABSENT), split_dataset(train)))
        for kind, samples in by_kind.items():
            write_splits(samples, out / "splits" / f"{kind.value}.split")

    with _stage("augment"):
        aug_config = AugmentConfig(shuffles=config.shuffles, seed=config.seed)
        for kind, samples in by_kind.items():
            expanded = shuffle_expand(samples, aug_config)
            write_splits(expanded, out / "augmented" / f"{kind.value}.split")
            rep = expansion_report(samples, expanded)
            print(f"augment {kind.value}: before={rep.n_before} after={rep.n_after} ratio={rep.ratio:.4f}")

    with _stage("idf"):
        idf = build_idf(train)
        write_idf(idf, out / "idf.table")

    entries: list[tuple[str, MetricReport]] = []
    for kind in (KeyphraseKind.PRESENT, KeyphraseKind.ABSENT):
        adapter_command = (
            config.adapter_present if kind is KeyphraseKind.PRESENT else config.adapter_absent
        )
        with _stage(f"generate.{kind.value}"):
            responses = _generate_stage(test, kind, idf, adapter_command, config.top_k)
            _write_candidates(responses, out / f"candidates.{kind.value}")
        with _stage(f"rank.{kind.value}"):
            candidates = {doc_id: list(r.candidates) for doc_id, r in responses.items()}
            ranked = _rank_stage(test, kind, candidates, idf, fusion)
            _write_ranked(ranked, out / f"ranked.{kind.value}")
        with _stage(f"eval.{kind.value}"):
            predictions = {doc_id: [c.phrase for c in cands] for doc_id, cands in ranked.items()}
            report = evaluate_dataset(predictions, test, kind, MatchConfig(pad_at_k=config.pad_at_k))
            entries.append((label, report))

    with _stage("report"):
        write_records(entries, out / "report.records")
        text = render_report(entries)
        (out / "report.txt").write_text(text, encoding="utf-8")
        print(text, end="")

    return entries[0][1], entries[1][1]


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_split(args: argparse.Namespace) -> int:
    dataset = load_corpus(args.input)
    present, absent = split_dataset(dataset)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_splits(present, out_dir / "present.split")
    write_splits(absent, out_dir / "absent.split")
    print(f"split {dataset.name}: present={len(present)} absent={len(absent)}")
    return 0


def _cmd_augment(args: argparse.Namespace) -> int:
    from .splitter import read_splits

    samples = read_splits(args.input)
    config = AugmentConfig(shuffles=args.shuffles, seed=_resolve_seed(args.seed, None))
    expanded = shuffle_expand(samples, config)
    write_splits(expanded, args.output)
    rep = expansion_report(samples, expanded)
    print(f"before={rep.n_before} after={rep.n_after} ratio={rep.ratio:.4f}")
    return 0


def _cmd_idf(args: argparse.Namespace) -> int:
    dataset = load_corpus(args.input)
    write_idf(build_idf(dataset), args.output)
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    dataset = load_corpus(args.corpus)
    kind = KeyphraseKind(args.kind)
    idf = read_idf(args.idf) if args.idf else None
    responses = _generate_stage(dataset, kind, idf, args.adapter, args.top_k)
    _write_candidates(responses, Path(args.output))
    print(f"generate {kind.value}: {len(responses)} documents")
    return 0


def _cmd_rank(args: argparse.Namespace) -> int:
    fusion = FusionConfig(alpha=args.alpha, epsilon=args.epsilon)
    dataset = load_corpus(args.corpus)
    kind = KeyphraseKind(args.kind)
    idf = read_idf(args.idf)
    candidates = _read_candidates(Path(args.input))
    ranked = _rank_stage(dataset, kind, candidates, idf, fusion)
    _write_ranked(ranked, Path(args.output))
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    if not args.pred_present and not args.pred_absent:
        raise ValueError("eval needs --pred-present and/or --pred-absent")
    dataset = load_corpus(args.corpus)
    cfg = MatchConfig(pad_at_k=args.pad_at_k)
    entries: list[tuple[str, MetricReport]] = []
    for kind, path in (
        (KeyphraseKind.PRESENT, args.pred_present),
        (KeyphraseKind.ABSENT, args.pred_absent),
    ):
        if not path:
            continue
        predictions = _read_ranked_phrases(Path(path))
        report = evaluate_dataset(predictions, dataset, kind, cfg)
        entries.append((args.label, report))
        print(
            f"{args.label} {dataset.name} {kind.value}: "
            f"F1@5={report.f1_at_5:.4f} F1@M={report.f1_at_m:.4f} docs={report.n_docs_evaluated}"
        )
    write_records(entries, args.output)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    entries = read_records(args.records)
    text = render_report(entries)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    print(text, end="")
    return 0


def _cmd_pipeline(args: argparse.Namespace) -> int:
    config = load_pipeline_config(args)
    run_pipeline(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kpf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="partition corpus keyphrases into present/absent samples")
    p.add_argument("--in", dest="input", required=True, help="corpus file")
    p.add_argument("--out-dir", required=True, help="directory for present.split/absent.split")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("augment", help="append shuffled copies of sample phrase lists")
    p.add_argument("--in", dest="input", required=True, help="split file")
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--shuffles", type=int, default=1)
    p.add_argument("--seed", type=int, default=None, help=f"falls back to ${SEED_ENV_VAR}, then 0")
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("idf", help="build corpus document-frequency table")
    p.add_argument("--in", dest="input", required=True, help="corpus file")
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=_cmd_idf)

    p = sub.add_parser("generate", help="produce candidates via an adapter or the baseline")
    p.add_argument("--in", dest="corpus", required=True, help="corpus file")
    p.add_argument("--kind", choices=[k.value for k in KeyphraseKind], required=True)
    p.add_argument("--idf", help="idf table (needed by the baseline generator)")
    p.add_argument("--adapter", help="adapter command; omitted means baseline")
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("rank", help="fuse cross and TF-IDF scores, order candidates")
    p.add_argument("--in", dest="input", required=True, help="candidates file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--idf", required=True)
    p.add_argument("--kind", choices=[k.value for k in KeyphraseKind], required=True)
    p.add_argument("--alpha", type=float, default=0.7)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("eval", help="macro-averaged F1@5/F1@M per keyphrase kind")
    p.add_argument("--corpus", required=True, help="test corpus file")
    p.add_argument("--pred-present", help="ranked file for present predictions")
    p.add_argument("--pred-absent", help="ranked file for absent predictions")
    p.add_argument("--pad-at-k", action="store_true")
    p.add_argument("--label", default="run")
    p.add_argument("--out", dest="output", required=True, help="records file")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("report", help="format a records file as aligned tables")
    p.add_argument("--records", required=True)
    p.add_argument("--out", dest="output")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("pipeline", help="run all stages from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", help="overrides out_dir from the config")
    p.add_argument("--seed", type=int, default=None, help=f"falls back to ${SEED_ENV_VAR}")
    p.add_argument("--shuffles", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--adapter-present", dest="adapter_present")
    p.add_argument("--adapter-absent", dest="adapter_absent")
    p.add_argument("--pad-at-k", action="store_true")
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--label")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CorpusError, AdapterError, RuntimeError, ValueError, OSError) as exc:
        print(f"kpf: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
