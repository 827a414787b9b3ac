"""Table emission: analogy tables and vocabulary statistics.

Three formats share one layout: a header row naming the columns, then one row
per epoch ascending, the epoch rendered as its bare start year.  Each analogy
cell joins the cell's top-n words with ", ".  CSV uses RFC-4180 quoting (the
comma inside a cell forces quotes), Markdown emits pipe tables, LaTeX emits a
booktabs tabular as plain text.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import TextIO

from .errors import DataError
from .preprocess import VocabStats
from .query import AnalogyTable

_FORMATS = ("csv", "markdown", "latex")

_LATEX_SPECIALS = {
    "&": r"\&",
    "%": r"\%",
    "$": r"\$",
    "#": r"\#",
    "_": r"\_",
    "{": r"\{",
    "}": r"\}",
    "~": r"\textasciitilde{}",
    "^": r"\textasciicircum{}",
    "\\": r"\textbackslash{}",
}


@dataclass(frozen=True)
class TableSpec:
    """Which concepts to tabulate, how many words per cell, which format."""

    concepts: tuple[str, ...]
    n: int
    format: str

    def __post_init__(self):
        object.__setattr__(self, "concepts", tuple(self.concepts))
        if not self.concepts:
            raise DataError("empty-concepts", "need at least one concept column")
        if self.n < 1:
            raise DataError("bad-count", f"words per cell must be >= 1, got {self.n}")
        if self.format not in _FORMATS:
            raise DataError(
                "bad-format", f"format must be one of {', '.join(_FORMATS)}"
            )


def _latex_escape(text: str) -> str:
    return "".join(_LATEX_SPECIALS.get(ch, ch) for ch in text)


def _emit_rows(header: list[str], rows: list[list[str]], fmt: str, sink: TextIO) -> None:
    if fmt == "csv":
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    elif fmt == "markdown":
        md_escape = lambda s: s.replace("|", "\\|")
        sink.write("| " + " | ".join(md_escape(h) for h in header) + " |\n")
        sink.write("|" + "|".join(" --- " for _ in header) + "|\n")
        for row in rows:
            sink.write("| " + " | ".join(md_escape(c) for c in row) + " |\n")
    else:
        sink.write("\\begin{tabular}{" + "l" * len(header) + "}\n")
        sink.write("\\toprule\n")
        sink.write(" & ".join(_latex_escape(h) for h in header) + " \\\\\n")
        sink.write("\\midrule\n")
        for row in rows:
            sink.write(" & ".join(_latex_escape(c) for c in row) + " \\\\\n")
        sink.write("\\bottomrule\n")
        sink.write("\\end{tabular}\n")


def emit_analogy_table(
    tables: list[AnalogyTable], spec: TableSpec, sink: TextIO
) -> None:
    """Write one row per epoch and one column per concept.

    All tables must cover the same epochs; each cell holds that concept's top
    ``spec.n`` words for the row's epoch, joined with ", ".
    """
    if len(tables) != len(spec.concepts):
        raise DataError(
            "table-count-mismatch",
            f"{len(spec.concepts)} concepts but {len(tables)} tables",
        )
    epoch_rows = [tuple(ep for ep, _ in t.per_epoch) for t in tables]
    for t, epochs in zip(tables, epoch_rows):
        if epochs != epoch_rows[0]:
            raise DataError(
                "epoch-mismatch", f"table for {t.concept!r} covers different epochs"
            )
    header = ["epoch", *spec.concepts]
    rows = []
    for i, epoch in enumerate(epoch_rows[0]):
        cells = [str(epoch)]
        for t in tables:
            neighbors = t.per_epoch[i][1][: spec.n]
            cells.append(", ".join(nb.word for nb in neighbors))
        rows.append(cells)
    _emit_rows(header, rows, spec.format, sink)


def emit_vocab_stats(stats: VocabStats, fmt: str, sink: TextIO) -> None:
    """Write (epoch, word count) pairs ascending in the chosen format."""
    if fmt not in _FORMATS:
        raise DataError("bad-format", f"format must be one of {', '.join(_FORMATS)}")
    header = ["epoch", "word_count"]
    rows = [[str(ep), str(count)] for ep, count in stats.per_epoch]
    _emit_rows(header, rows, fmt, sink)
