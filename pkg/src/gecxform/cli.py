"""Command-line pipelines: induce, encode, apply, evaluate, analyze, corrupt.

Every command is deterministic given its flags and seed; a JSON manifest with
flag values and input digests is written next to each output file. Exit codes:
0 success, 1 internal error, 2 usage or format error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import traceback
from pathlib import Path

from . import __version__
from .corpus import (
    CorruptionConfig,
    corrupt_corpus,
    load_corpus,
    load_corruption_config,
    serialize_tsv,
)
from .errors import FormatError
from .evaluate import analyze, pair_gold_edits, rows_to_tsv, score
from .textnorm import CasingMode
from .tokenizer import TokenizerMode, load_vocab
from .transform import (
    GranularityMode,
    LabeledSentence,
    apply_labels,
    dumps_dictionary,
    encode,
    induce,
    load_dictionary,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2

MODE_CHOICES = ["char-at-subword", "char-at-word", "string-at-subword", "string-at-word"]


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_path: Path, command: str, args: argparse.Namespace, inputs: list[Path]) -> None:
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "tool": "gecxform",
        "version": __version__,
        "command": command,
        "flags": {k: str(v) if isinstance(v, Path) else v for k, v in flags.items()},
        "inputs": {str(p): _sha256(Path(p)) for p in inputs},
        "output": str(out_path),
    }
    path = Path(str(out_path) + ".manifest.json")
    path.write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def _tokenizer_from_args(args: argparse.Namespace, casing: CasingMode) -> TokenizerMode:
    if args.tokenizer == "word":
        return TokenizerMode.word()
    if args.tokenizer == "chars":
        return TokenizerMode.char_chunks(args.chunk_size)
    if not args.vocab:
        raise FormatError("--tokenizer vocab requires --vocab")
    return TokenizerMode.vocab_greedy(load_vocab(args.vocab, casing))


def _load_pairs(paths: list[str], annotator: int):
    pairs = []
    for path in paths:
        pairs.extend(load_corpus(path, annotator=annotator))
    return pairs


def _add_tokenizer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--tokenizer", choices=["word", "vocab", "chars"], default="word",
        help="subword segmentation strategy (default: word)",
    )
    parser.add_argument("--vocab", help="vocabulary file for --tokenizer vocab")
    parser.add_argument(
        "--chunk-size", type=int, default=1,
        help="characters per piece for --tokenizer chars (default: 1)",
    )


def cmd_induce(args: argparse.Namespace) -> int:
    casing = CasingMode.parse(args.casing)
    tokenizer = _tokenizer_from_args(args, casing)
    pairs = _load_pairs(args.corpus, args.annotator)
    synthetic = load_corpus(args.synthetic, annotator=args.annotator) if args.synthetic else []
    dictionary = induce(
        pairs,
        GranularityMode.parse(args.mode),
        casing,
        min_count=args.min_count,
        synthetic_pairs=synthetic,
        synthetic_limit=args.synthetic_limit,
        seed=args.seed,
        tokenizer=tokenizer,
    )
    out = Path(args.out)
    out.write_text(dumps_dictionary(dictionary), encoding="utf-8")
    inputs = [Path(p) for p in args.corpus] + ([Path(args.synthetic)] if args.synthetic else [])
    _write_manifest(out, "induce", args, inputs)
    print(f"induced {dictionary.size} transformations -> {out}")
    return EXIT_OK


def cmd_encode(args: argparse.Namespace) -> int:
    dictionary = load_dictionary(args.dictionary)
    if args.mode and GranularityMode.parse(args.mode) != dictionary.mode:
        raise FormatError(
            f"dictionary mode {dictionary.mode.label} does not match requested {args.mode}"
        )
    tokenizer = _tokenizer_from_args(args, dictionary.casing)
    pairs = _load_pairs(args.corpus, args.annotator)
    out = Path(args.out)
    uncorrectable = 0
    with out.open("w", encoding="utf-8") as handle:
        for idx, pair in enumerate(pairs):
            labeled = encode(
                pair.source, pair.gold, dictionary, tokenizer, rng_seed=args.seed ^ idx
            )
            uncorrectable += sum(1 for l in labeled.labels if l == 0)
            record = {
                "source": pair.source,
                "units": list(labeled.units),
                "labels": list(labeled.labels),
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    inputs = [Path(p) for p in args.corpus] + [Path(args.dictionary)]
    _write_manifest(out, "encode", args, inputs)
    print(f"encoded {len(pairs)} sentences ({uncorrectable} uncorrectable labels) -> {out}")
    return EXIT_OK


def cmd_apply(args: argparse.Namespace) -> int:
    dictionary = load_dictionary(args.dictionary)
    out = Path(args.out)
    count = 0
    with Path(args.labels).open(encoding="utf-8") as src, out.open("w", encoding="utf-8") as dst:
        for lineno, line in enumerate(src, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                labeled = LabeledSentence(
                    tuple(record["units"]), tuple(record["labels"])
                )
            except (KeyError, ValueError) as exc:
                raise FormatError(f"{args.labels}:{lineno}: {exc}") from None
            dst.write(apply_labels(record.get("source", ""), labeled, dictionary) + "\n")
            count += 1
    _write_manifest(out, "apply", args, [Path(args.labels), Path(args.dictionary)])
    print(f"applied labels to {count} sentences -> {out}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    pairs = _load_pairs(args.corpus, args.annotator)
    hypothesis_lines = Path(args.hypothesis).read_text(encoding="utf-8").splitlines()
    if len(hypothesis_lines) != len(pairs):
        raise FormatError(
            f"hypothesis has {len(hypothesis_lines)} lines, corpus has {len(pairs)}"
        )
    counts = score(
        (pair.source, hyp, pair_gold_edits(pair, args.annotator))
        for pair, hyp in zip(pairs, hypothesis_lines)
    )
    report = (
        "tp\tfp\tfn\tprecision\trecall\tf0.5\n"
        f"{counts.tp}\t{counts.fp}\t{counts.fn}\t{counts.precision:.4f}"
        f"\t{counts.recall:.4f}\t{counts.f_half:.4f}\n"
    )
    if args.out:
        out = Path(args.out)
        out.write_text(report, encoding="utf-8")
        _write_manifest(out, "evaluate", args, [Path(p) for p in args.corpus] + [Path(args.hypothesis)])
    else:
        sys.stdout.write(report)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    casing = CasingMode.parse(args.casing)
    tokenizer = _tokenizer_from_args(args, casing)
    pairs = _load_pairs(args.corpus, args.annotator)
    rows = analyze(
        pairs,
        casing,
        tokenizer,
        min_counts=tuple(args.min_counts),
        iteration_counts=tuple(args.iterations),
        seed=args.seed,
        annotator=args.annotator,
    )
    out = Path(args.out)
    out.write_text(rows_to_tsv(rows), encoding="utf-8")
    _write_manifest(out, "analyze", args, [Path(p) for p in args.corpus])
    print(f"wrote {len(rows)} analysis rows -> {out}")
    return EXIT_OK


def cmd_corrupt(args: argparse.Namespace) -> int:
    config = load_corruption_config(args.config) if args.config else CorruptionConfig()
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, seed=args.seed)
    golds = [
        line for line in Path(args.input).read_text(encoding="utf-8").splitlines() if line.strip()
    ]
    pairs = corrupt_corpus(golds, config)
    out = Path(args.out)
    out.write_text(serialize_tsv(pairs), encoding="utf-8")
    inputs = [Path(args.input)] + ([Path(args.config)] if args.config else [])
    _write_manifest(out, "corrupt", args, inputs)
    print(f"corrupted {len(pairs)} sentences -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gecxform",
        description="Induce correction transformations from parallel GEC corpora, "
        "encode and decode sentences as per-unit labels, and run oracle analyses.",
    )
    parser.add_argument("--version", action="version", version=f"gecxform {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("induce", help="induce a transformation dictionary from a corpus")
    p.add_argument("corpus", nargs="+", help="corpus files (.m2 or TSV)")
    p.add_argument("--mode", choices=MODE_CHOICES, required=True)
    p.add_argument("--casing", choices=["cased", "uncased"], default="uncased")
    p.add_argument("--min-count", type=int, default=1, dest="min_count")
    p.add_argument("--synthetic", help="synthetic corpus file pooled into induction")
    p.add_argument("--synthetic-limit", type=int, default=1000, dest="synthetic_limit")
    p.add_argument("--annotator", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(func=cmd_induce)

    p = sub.add_parser("encode", help="encode gold corrections as label files")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--dict", required=True, dest="dictionary")
    p.add_argument("--mode", choices=MODE_CHOICES, help="cross-check against the dictionary")
    p.add_argument("--annotator", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("apply", help="decode a label file back to corrected text")
    p.add_argument("labels", help="JSON-lines label file from encode")
    p.add_argument("--dict", required=True, dest="dictionary")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("evaluate", help="score a hypothesis file against gold edits")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--hypothesis", required=True)
    p.add_argument("--annotator", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("analyze", help="oracle upper-bound sweep over all granularities")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--casing", choices=["cased", "uncased"], default="uncased")
    p.add_argument("--min-counts", type=int, nargs="+", default=[1, 2, 3], dest="min_counts")
    p.add_argument("--iterations", type=int, nargs="+", default=[1, 4])
    p.add_argument("--annotator", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("corrupt", help="generate a synthetic parallel corpus from gold text")
    p.add_argument("input", help="text file with one gold sentence per line")
    p.add_argument("--config", help="flat key=value corruption config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_corrupt)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
