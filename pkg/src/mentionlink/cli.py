"""Command line: ``link``, ``score`` and ``bench``.

Exit codes: 0 success, 2 validation error, 3 stage failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench as bench_mod
from .clustering import dump_blocks
from .context import dump_contexts
from .embedding import ExternalEncoder, make_encoder
from .errors import MentionLinkError, StageError, ValidationError
from .metrics import evaluate
from .model import (
    MODES,
    Labeling,
    PipelineConfig,
    dump_labeling,
    parse_config_text,
    parse_gold,
    parse_labeling,
    parse_mentions,
)
from .pipeline import run_pipeline

log = logging.getLogger("mentionlink")

EXIT_OK, EXIT_VALIDATION, EXIT_STAGE = 0, 2, 3

# CLI flag -> PipelineConfig field
_OVERRIDES = {
    "mode": "mode",
    "high_threshold": "high_threshold",
    "medium_threshold": "medium_threshold",
    "epsilon": "epsilon",
    "min_cluster_size": "min_cluster_size",
    "min_samples": "min_samples",
    "block_limit": "block_limit",
    "embed_dim": "embed_dim",
    "seed": "seed",
    "batch_size": "batch_size",
}


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc.strerror}") from None


def _config(args, default_mode: str | None = None) -> PipelineConfig:
    values = parse_config_text(_read(args.config)) if args.config else {}
    if default_mode and "mode" not in values:
        values["mode"] = default_mode
    for flag, key in _OVERRIDES.items():
        val = getattr(args, flag, None)
        if val is not None:
            values[key] = val
    return PipelineConfig(**values)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--encoder", default="reference", help="reference | external:<command>")
    p.add_argument("--high-threshold", type=float)
    p.add_argument("--medium-threshold", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--min-cluster-size", type=int)
    p.add_argument("--min-samples", type=int)
    p.add_argument("--block-limit", type=int)
    p.add_argument("--embed-dim", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--batch-size", type=int)


def _load_inputs(args):
    train = parse_mentions(_read(args.train))
    gold = parse_gold(_read(args.gold), universe=[m.id for m in train])
    test = parse_mentions(_read(args.test))
    return train, gold, test


def cmd_link(args) -> int:
    cfg = _config(args)
    train, gold, test = _load_inputs(args)
    encoder = make_encoder(args.encoder, cfg.embed_dim)
    try:
        result = run_pipeline(cfg, train, gold, test, encoder)
    finally:
        if isinstance(encoder, ExternalEncoder):
            encoder.close()
    _write(args.out, dump_labeling(result.labeling.as_labeling(), [m.id for m in test]))
    if args.dump_abbrev:
        _write(args.dump_abbrev, result.abbreviations.dump())
    if args.dump_contexts:
        _write(args.dump_contexts, dump_contexts(result.contexts))
    if args.trace_assign:
        _write(args.trace_assign, "".join(a.trace_line() for a in result.assignments))
    if args.dump_blocks:
        _write(args.dump_blocks, dump_blocks(result.blocks))
    if args.save_kb:
        result.kb.save(args.save_kb)
    t = result.timings
    log.info(
        "stage seconds: embed %.3f | kb_match %.3f | canon %.3f | clustering %.3f | merge %.3f | total %.3f",
        t.embed_s, t.kb_match_s, t.canonicalization_s, t.clustering_s, t.merge_s, t.total_s,
    )
    return EXIT_OK


def cmd_score(args) -> int:
    gold = parse_gold(_read(args.gold))
    pred: Labeling = parse_labeling(_read(args.pred))
    sys.stdout.write(evaluate(gold, pred).format())
    return EXIT_OK


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def cmd_bench(args) -> int:
    cfg = _config(args, default_mode="subtask3")
    if args.synthetic:
        from .synthetic import scaled_corpus

        corpus = scaled_corpus(args.synthetic, seed=cfg.seed)
        train, gold, test = corpus.train, corpus.train_gold, corpus.test
    elif args.train and args.gold and args.test:
        train, gold, test = _load_inputs(args)
    else:
        raise ValidationError("bench needs --train/--gold/--test or --synthetic N")
    encoder = make_encoder(args.encoder, cfg.embed_dim)
    try:
        report = bench_mod.benchmark(
            cfg, train, gold, test, encoder,
            fractions=_floats(args.fractions), seeds=_ints(args.seeds),
            full_repeats=args.full_repeats,
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    finally:
        if isinstance(encoder, ExternalEncoder):
            encoder.close()
    paths = bench_mod.emit_report(report, args.out, figure=args.figure)
    sys.stdout.write(bench_mod.format_table(report))
    for kind, path in paths.items():
        log.info("wrote %s: %s", kind, path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mentionlink", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("link", help="resolve test mentions into clusters")
    _add_config_flags(p)
    p.add_argument("--train", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dump-abbrev")
    p.add_argument("--dump-contexts")
    p.add_argument("--trace-assign")
    p.add_argument("--dump-blocks")
    p.add_argument("--save-kb")
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("score", help="MUC / B3 / CEAF-e / CoNLL against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bench", help="stage timings over sampled corpus fractions")
    _add_config_flags(p)
    p.add_argument("--fractions", default=",".join(f"{f:g}" for f in bench_mod.DEFAULT_FRACTIONS))
    p.add_argument("--seeds", default=",".join(map(str, bench_mod.DEFAULT_SEEDS)))
    p.add_argument("--full-repeats", type=int, default=2)
    p.add_argument("--out", required=True)
    p.add_argument("--train")
    p.add_argument("--gold")
    p.add_argument("--test")
    p.add_argument("--synthetic", type=int, metavar="N", help="generate an N-mention test corpus")
    p.add_argument("--figure", action="store_true", help="also render runtime_vs_size.png")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MentionLinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
