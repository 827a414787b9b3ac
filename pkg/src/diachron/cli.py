"""Command-line front end: one verb per pipeline stage, plus a query REPL.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Every failure prints a single ``error: <kind>: <detail>`` line to stderr.
Progress chatter goes to stderr; stdout carries only the requested output and
is byte-identical across repeated runs on identical inputs.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import __version__
from .align import (
    align_series,
    load_aligned,
    load_aligned_epoch,
    read_aligned_reference,
    save_aligned,
    shared_vocabulary_counts,
)
from .errors import ToolError, UsageError
from .preprocess import drop_zero_rows, normalize_rows, vocab_stats
from .query import similar_by_vector, temporal_analogues
from .report import TableSpec, emit_analogy_table, emit_vocab_stats
from .store import (
    Epoch,
    EmbeddingSeries,
    load_embedding,
    load_series,
    save_embedding,
    vector_of,
    write_manifest,
)
from .synth import gen_series, load_plan

_FORMAT_ALIASES = {"csv": "csv", "md": "markdown", "latex": "latex"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("usage", message)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _u64(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _build_parser() -> _Parser:
    parser = _Parser(prog="diachron", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="translate between the text and native formats")
    p.add_argument("--in", dest="inp", required=True, metavar="PATH")
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--epoch", type=int, default=0, metavar="YEAR")

    p = sub.add_parser("clean", help="drop all-zero embedding rows")
    p.add_argument("--in", dest="inp", required=True, metavar="PATH")
    p.add_argument("--epoch", type=int, required=True, metavar="YEAR")
    p.add_argument("--out", required=True, metavar="PATH")

    p = sub.add_parser("stats", help="post-cleaning words per epoch")
    p.add_argument("--manifest", required=True, metavar="PATH")
    p.add_argument("--format", choices=sorted(_FORMAT_ALIASES), default="csv")

    p = sub.add_parser("align", help="rotate every epoch into a reference epoch")
    p.add_argument("--manifest", required=True, metavar="PATH")
    p.add_argument("--target", type=int, required=True, metavar="YEAR")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--no-normalize", action="store_true",
                   help="diagnostic: skip input row normalization")

    p = sub.add_parser("query", help="nearest neighbors of a word in one epoch")
    p.add_argument("--aligned", required=True, metavar="DIR")
    p.add_argument("--word", required=True, metavar="TOKEN")
    p.add_argument("--epoch", type=int, required=True, metavar="YEAR")
    p.add_argument("--ref-epoch", type=int, default=None, metavar="YEAR",
                   help="epoch supplying the query vector (default: alignment reference)")
    p.add_argument("--top", type=_positive_int, default=10, metavar="N")
    p.add_argument("--exclude-self", action="store_true")

    p = sub.add_parser("trace", help="one word's analogues across every epoch")
    p.add_argument("--aligned", required=True, metavar="DIR")
    p.add_argument("--word", required=True, metavar="TOKEN")
    p.add_argument("--top", type=_positive_int, default=2, metavar="N")
    p.add_argument("--format", choices=sorted(_FORMAT_ALIASES), default="md")
    p.add_argument("--ref-epoch", type=int, default=None, metavar="YEAR")
    p.add_argument("--exclude-self", action="store_true")

    p = sub.add_parser("report", help="multi-concept analogy tables")
    p.add_argument("--aligned", required=True, metavar="DIR")
    p.add_argument("--word", action="append", required=True, metavar="TOKEN",
                   help="concept column; repeat for more columns")
    p.add_argument("--top", type=_positive_int, default=2, metavar="N")
    p.add_argument("--format", choices=sorted(_FORMAT_ALIASES), default="csv")
    p.add_argument("--ref-epoch", type=int, default=None, metavar="YEAR")
    p.add_argument("--exclude-self", action="store_true")

    p = sub.add_parser("synth", help="generate a synthetic series from a plan file")
    p.add_argument("--plan", required=True, metavar="PATH")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--seed", type=_u64, default=None, help="override the plan's seed")

    p = sub.add_parser("repl", help="interactive query loop over an aligned series")
    p.add_argument("--aligned", required=True, metavar="DIR")

    return parser


def _cmd_convert(args) -> int:
    e = load_embedding(args.inp, Epoch(args.epoch))
    save_embedding(e, args.out)
    return 0


def _cmd_clean(args) -> int:
    e = load_embedding(args.inp, Epoch(args.epoch))
    cleaned, removed = drop_zero_rows(e)
    save_embedding(cleaned, args.out)
    print(f"removed {removed}", file=sys.stderr)
    return 0


def _cmd_stats(args) -> int:
    series = load_series(args.manifest)
    cleaned = EmbeddingSeries(drop_zero_rows(e)[0] for e in series)
    emit_vocab_stats(vocab_stats(cleaned), _FORMAT_ALIASES[args.format], sys.stdout)
    return 0


def _cmd_align(args) -> int:
    series = load_series(args.manifest)
    target = Epoch(args.target)
    counts = shared_vocabulary_counts(series, target)
    if not args.no_normalize:
        series = EmbeddingSeries(normalize_rows(e) for e in series)
    aligned = align_series(series, target)
    for epoch in aligned.epochs:
        print(f"aligned {epoch} (shared {counts[epoch]})", file=sys.stderr)
    save_aligned(aligned, args.out)
    print(f"wrote {len(aligned)} epochs to {args.out}", file=sys.stderr)
    return 0


def _print_neighbors(neighbors) -> None:
    for nb in neighbors:
        print(f"{nb.word}\t{nb.score:.6f}")


def _cmd_query(args) -> int:
    ref_year = args.ref_epoch
    if ref_year is None:
        ref_year = read_aligned_reference(args.aligned).start_year
    ref = load_aligned_epoch(args.aligned, Epoch(ref_year))
    vec = vector_of(ref, args.word)
    if vec is None or not vec.any():
        raise ToolError(
            "out-of-vocabulary", f"word {args.word!r} absent or zero in epoch {ref_year}"
        )
    target = (
        ref if args.epoch == ref_year else load_aligned_epoch(args.aligned, Epoch(args.epoch))
    )
    exclude = {args.word} if args.exclude_self else None
    _print_neighbors(similar_by_vector(target, vec, args.top, exclude))
    return 0


def _analogy_tables(args, concepts) -> list:
    aligned = load_aligned(args.aligned)
    ref = Epoch(args.ref_epoch) if args.ref_epoch is not None else None
    return [
        temporal_analogues(
            aligned, word, args.top, query_epoch=ref, exclude_concept=args.exclude_self
        )
        for word in concepts
    ]


def _cmd_trace(args) -> int:
    tables = _analogy_tables(args, [args.word])
    spec = TableSpec((args.word,), args.top, _FORMAT_ALIASES[args.format])
    emit_analogy_table(tables, spec, sys.stdout)
    return 0


def _cmd_report(args) -> int:
    tables = _analogy_tables(args, args.word)
    spec = TableSpec(tuple(args.word), args.top, _FORMAT_ALIASES[args.format])
    emit_analogy_table(tables, spec, sys.stdout)
    return 0


def _cmd_synth(args) -> int:
    plan = load_plan(args.plan)
    if args.seed is not None:
        plan = dataclasses.replace(plan, seed=args.seed)
    series = gen_series(plan)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for e in series:
        name = f"{e.epoch.start_year}.dwe"
        save_embedding(e, out / name)
        entries.append((e.epoch, name))
    write_manifest(entries, out / "manifest.tsv")
    print(f"wrote {len(entries)} epochs to {out}", file=sys.stderr)
    return 0


def _cmd_repl(args) -> int:
    aligned = load_aligned(args.aligned)
    ref = aligned[aligned.reference]
    top = 10
    print(
        f"loaded {len(aligned)} epochs, reference {aligned.reference}; "
        "commands: q <word> [epoch] | t <word> | n <count> | quit",
        file=sys.stderr,
    )
    while True:
        print("> ", end="", file=sys.stderr, flush=True)
        line = sys.stdin.readline()
        if not line:
            return 0
        parts = line.split()
        if not parts:
            continue
        try:
            cmd = parts[0]
            if cmd == "quit":
                return 0
            if cmd == "n" and len(parts) == 2:
                value = int(parts[1])
                if value < 1:
                    raise UsageError("usage", "count must be >= 1")
                top = value
            elif cmd == "q" and len(parts) in (2, 3):
                word = parts[1]
                epoch = Epoch(int(parts[2])) if len(parts) == 3 else aligned.reference
                vec = vector_of(ref, word)
                if vec is None or not vec.any():
                    raise ToolError(
                        "out-of-vocabulary",
                        f"word {word!r} absent or zero in epoch {aligned.reference}",
                    )
                _print_neighbors(similar_by_vector(aligned[epoch], vec, top))
            elif cmd == "t" and len(parts) == 2:
                table = temporal_analogues(aligned, parts[1], top)
                emit_analogy_table(
                    [table], TableSpec((parts[1],), top, "markdown"), sys.stdout
                )
            else:
                raise UsageError("usage", f"unrecognized command {line.strip()!r}")
        except ValueError:
            print("error: usage: expected an integer argument", file=sys.stderr)
        except ToolError as exc:
            print(f"error: {exc.kind}: {exc.detail}", file=sys.stderr)
        sys.stdout.flush()


_COMMANDS = {
    "convert": _cmd_convert,
    "clean": _cmd_clean,
    "stats": _cmd_stats,
    "align": _cmd_align,
    "query": _cmd_query,
    "trace": _cmd_trace,
    "report": _cmd_report,
    "synth": _cmd_synth,
    "repl": _cmd_repl,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ToolError as exc:
        print(f"error: {exc.kind}: {exc.detail}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
