"""Domain types for per-epoch embeddings and their on-disk formats.

Two interchangeable formats are supported:

* text: line 1 is ``<count> <dim>``, then one ``<token> <f1> ... <fdim>`` line
  per word, single-space separated, ``\\n`` terminated, UTF-8.  Floats are
  written with the shortest decimal that round-trips 32-bit precision.
* native ``DWE1``: magic ``DWE1``, u16 LE version (1), u32 LE dim, u64 LE
  count, then per word a u16 LE token byte length, the UTF-8 token bytes and
  dim IEEE-754 binary32 LE values.  No padding anywhere.

A series manifest is a UTF-8 text file with one ``<start_year>\\t<path>`` line
per epoch, years strictly ascending, paths relative to the manifest.

All types are immutable after construction and safe for concurrent reads.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

import numpy as np

from . import linalg
from .errors import DataError, ParseError

_MAGIC = b"DWE1"
_VERSION = 1


@dataclass(frozen=True, order=True)
class Epoch:
    """One time slice, labeled by its starting year (1800 means the 1800s)."""

    start_year: int

    def __str__(self) -> str:
        return str(self.start_year)


def _check_token(token: str) -> str | None:
    """Return a reason string if ``token`` is not a legal vocabulary entry."""
    if not token:
        return "empty token"
    if any(ch.isspace() for ch in token):
        return f"token {token!r} contains whitespace"
    return None


class Vocabulary:
    """Ordered, unique word list with an inverse token -> position index."""

    __slots__ = ("words", "index")

    def __init__(self, words: Iterable[str]):
        words = tuple(words)
        index: dict[str, int] = {}
        for i, w in enumerate(words):
            reason = _check_token(w)
            if reason is not None:
                raise DataError("bad-token", f"{reason} (position {i})")
            if w in index:
                raise DataError("duplicate-token", f"token {w!r} repeats (position {i})")
            index[w] = i
        self.words = words
        self.index = index

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def __getitem__(self, i: int) -> str:
        return self.words[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.words == other.words

    def __repr__(self) -> str:
        return f"Vocabulary({len(self.words)} words)"


@dataclass(frozen=True, eq=False)
class EpochEmbedding:
    """One epoch's vocabulary and its float32 embedding matrix (row per word)."""

    epoch: Epoch
    vocab: Vocabulary
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2:
            raise DataError("shape-mismatch", f"embedding matrix must be 2-D, got {m.shape}")
        if m.shape[1] < 1:
            raise DataError("shape-mismatch", "embedding dimension must be at least 1")
        m = np.ascontiguousarray(m, dtype=np.float32)
        if not np.isfinite(m).all():
            raise DataError("non-finite-value", "embedding matrix contains NaN or Inf")
        if m.shape[0] != len(self.vocab):
            raise DataError(
                "count-mismatch",
                f"{len(self.vocab)} words but {m.shape[0]} matrix rows",
            )
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    @cached_property
    def row_sq_norms(self) -> np.ndarray:
        """Float64 squared row norms under the pinned sequential fold."""
        sq = linalg.seq_sq_norms(self.matrix)
        sq.flags.writeable = False
        return sq

    @cached_property
    def row_norms(self) -> np.ndarray:
        norms = np.sqrt(self.row_sq_norms)
        norms.flags.writeable = False
        return norms


class EmbeddingSeries:
    """Epoch embeddings keyed by epoch, iterated in ascending epoch order."""

    __slots__ = ("_members",)

    def __init__(self, members: Iterable[EpochEmbedding]):
        by_epoch: dict[Epoch, EpochEmbedding] = {}
        for e in members:
            if e.epoch in by_epoch:
                raise DataError("duplicate-epoch", f"epoch {e.epoch} appears twice")
            by_epoch[e.epoch] = e
        dims = {e.dim for e in by_epoch.values()}
        if len(dims) > 1:
            raise DataError("dim-mismatch", f"mixed embedding dimensions {sorted(dims)}")
        self._members = dict(sorted(by_epoch.items()))

    @property
    def epochs(self) -> tuple[Epoch, ...]:
        return tuple(self._members)

    @property
    def dim(self) -> int | None:
        for e in self._members.values():
            return e.dim
        return None

    def __len__(self) -> int:
        return len(self._members)

    def __contains__(self, epoch: Epoch) -> bool:
        return epoch in self._members

    def __getitem__(self, epoch: Epoch) -> EpochEmbedding:
        try:
            return self._members[epoch]
        except KeyError:
            raise DataError("missing-epoch", f"epoch {epoch} not in series") from None

    def __iter__(self) -> Iterator[EpochEmbedding]:
        return iter(self._members.values())


def format_f32_shortest(value) -> str:
    """Shortest decimal string that parses back to the same float32 bits."""
    v = np.float32(value)
    if not np.isfinite(v):
        raise ValueError(f"cannot format non-finite value {value!r}")
    fv = float(v)
    target = v.tobytes()
    with np.errstate(over="ignore"):
        for prec in range(1, 10):
            s = "%.*g" % (prec, fv)
            if np.float32(float(s)).tobytes() == target:
                return s
    raise AssertionError(f"no 9-digit decimal round-trips {value!r}")


def _read_all(source: BinaryIO | str | Path) -> bytes:
    if isinstance(source, (str, Path)):
        return Path(source).read_bytes()
    return source.read()


def _parse_header_int(field: str) -> int | None:
    if field and all(c in "0123456789" for c in field):
        return int(field)
    return None


def load_text(source: BinaryIO | str | Path, epoch: Epoch) -> EpochEmbedding:
    """Parse the text interchange format; vocab order is file order."""
    data = _read_all(source)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError("bad-encoding", str(exc)) from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("malformed-header", "empty stream", line=1)

    head = lines[0].split(" ")
    counts = [_parse_header_int(f) for f in head]
    if len(counts) != 2 or None in counts:
        raise ParseError(
            "malformed-header", f"expected '<count> <dim>', got {lines[0]!r}", line=1
        )
    count, dim = counts
    if dim < 1:
        raise ParseError("malformed-header", "dimension must be at least 1", line=1)
    if len(lines) - 1 != count:
        raise ParseError(
            "count-mismatch",
            f"header declares {count} rows, body has {len(lines) - 1}",
            line=min(count, len(lines) - 1) + 2,
        )

    words: list[str] = []
    seen: set[str] = set()
    matrix = np.empty((count, dim), dtype=np.float32)
    for lineno, line in enumerate(lines[1:], start=2):
        if "\r" in line:
            raise ParseError(
                "malformed-value", "carriage return in line (expected \\n endings)",
                line=lineno,
            )
        fields = line.split(" ")
        token = fields[0]
        reason = _check_token(token)
        if reason is not None:
            raise ParseError("bad-token", reason, line=lineno)
        if token in seen:
            raise ParseError("duplicate-token", f"token {token!r} repeats", line=lineno)
        if len(fields) - 1 != dim:
            raise ParseError(
                "dim-mismatch",
                f"expected {dim} values, got {len(fields) - 1}",
                line=lineno,
            )
        try:
            row = np.array(fields[1:], dtype=np.float64)
        except ValueError:
            raise ParseError("malformed-value", "unparseable float field", line=lineno) from None
        with np.errstate(over="ignore"):
            row32 = row.astype(np.float32)
        if not np.isfinite(row32).all():
            raise ParseError(
                "non-finite-value", "NaN, Inf, or out-of-range value", line=lineno
            )
        seen.add(token)
        words.append(token)
        matrix[lineno - 2] = row32
    return EpochEmbedding(epoch, Vocabulary(words), matrix)


def save_text(e: EpochEmbedding, sink: BinaryIO) -> None:
    """Write the text interchange format; load_text(save_text(e)) is lossless."""
    parts = [f"{len(e.vocab)} {e.dim}\n"]
    for i, word in enumerate(e.vocab.words):
        row = e.matrix[i]
        parts.append(word)
        for v in row:
            parts.append(" ")
            parts.append(format_f32_shortest(v))
        parts.append("\n")
    sink.write("".join(parts).encode("utf-8"))


def load_native(source: BinaryIO | str | Path, epoch: Epoch) -> EpochEmbedding:
    """Parse the DWE1 binary format; bit-exact counterpart of save_native."""
    buf = _read_all(source)

    def need(offset: int, size: int, what: str) -> int:
        if offset + size > len(buf):
            raise ParseError("truncated", f"stream ends inside {what}")
        return offset + size

    pos = need(0, 4, "magic")
    if buf[:4] != _MAGIC:
        raise ParseError("bad-magic", f"expected {_MAGIC!r}, got {buf[:4]!r}")
    end = need(pos, 14, "header")
    version, dim, count = struct.unpack_from("<HIQ", buf, pos)
    pos = end
    if version != _VERSION:
        raise ParseError("bad-version", f"unsupported version {version}")
    if dim < 1:
        raise ParseError("malformed-header", "dimension must be at least 1")

    words: list[str] = []
    seen: set[str] = set()
    matrix = np.empty((count, dim), dtype=np.float32)
    row_bytes = 4 * dim
    for i in range(count):
        end = need(pos, 2, f"record {i} token length")
        (tok_len,) = struct.unpack_from("<H", buf, pos)
        pos = end
        end = need(pos, tok_len, f"record {i} token")
        try:
            token = buf[pos:end].decode("utf-8")
        except UnicodeDecodeError:
            raise ParseError("bad-token", f"record {i}: invalid UTF-8") from None
        pos = end
        reason = _check_token(token)
        if reason is not None:
            raise ParseError("bad-token", f"record {i}: {reason}")
        if token in seen:
            raise ParseError("duplicate-token", f"record {i}: token {token!r} repeats")
        end = need(pos, row_bytes, f"record {i} vector")
        row = np.frombuffer(buf, dtype="<f4", count=dim, offset=pos)
        pos = end
        if not np.isfinite(row).all():
            raise ParseError("non-finite-value", f"record {i}: NaN or Inf component")
        seen.add(token)
        words.append(token)
        matrix[i] = row
    if pos != len(buf):
        raise ParseError("trailing-bytes", f"{len(buf) - pos} bytes after last record")
    return EpochEmbedding(epoch, Vocabulary(words), matrix)


def save_native(e: EpochEmbedding, sink: BinaryIO) -> None:
    """Write the DWE1 binary format."""
    out = bytearray()
    out += struct.pack("<4sHIQ", _MAGIC, _VERSION, e.dim, len(e.vocab))
    matrix = np.ascontiguousarray(e.matrix, dtype="<f4")
    for i, word in enumerate(e.vocab.words):
        tok = word.encode("utf-8")
        if len(tok) > 0xFFFF:
            raise DataError("bad-token", f"token longer than 65535 bytes (row {i})")
        out += struct.pack("<H", len(tok))
        out += tok
        out += matrix[i].tobytes()
    sink.write(bytes(out))


def vector_of(e: EpochEmbedding, word: str) -> np.ndarray | None:
    """The word's embedding row, or None when absent; never raises."""
    i = e.vocab.index.get(word)
    if i is None:
        return None
    return e.matrix[i]


def sniff_format(path: str | Path) -> str:
    """Classify a file as 'native' or 'text' by its leading magic bytes."""
    with open(path, "rb") as fh:
        return "native" if fh.read(4) == _MAGIC else "text"


def load_embedding(path: str | Path, epoch: Epoch) -> EpochEmbedding:
    """Load either on-disk format, dispatching on the magic bytes."""
    loader = load_native if sniff_format(path) == "native" else load_text
    return loader(path, epoch)


def save_embedding(e: EpochEmbedding, path: str | Path) -> None:
    """Save by path suffix: ``.dwe`` means native, anything else text."""
    saver = save_native if Path(path).suffix == ".dwe" else save_text
    with open(path, "wb") as fh:
        saver(e, fh)


def read_manifest(path: str | Path) -> list[tuple[Epoch, Path]]:
    """Parse a series manifest into (epoch, absolute path) pairs."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    entries: list[tuple[Epoch, Path]] = []
    prev_year: int | None = None
    for lineno, line in enumerate(lines, start=1):
        fields = line.split("\t")
        if len(fields) != 2 or not fields[1]:
            raise ParseError(
                "malformed-manifest", f"expected '<year>\\t<path>', got {line!r}",
                line=lineno,
            )
        try:
            year = int(fields[0])
        except ValueError:
            raise ParseError(
                "malformed-manifest", f"bad year {fields[0]!r}", line=lineno
            ) from None
        if prev_year is not None and year <= prev_year:
            raise ParseError(
                "manifest-order", f"year {year} not ascending", line=lineno
            )
        prev_year = year
        entries.append((Epoch(year), path.parent / fields[1]))
    return entries


def write_manifest(entries: Iterable[tuple[Epoch, str]], path: str | Path) -> None:
    """Write a series manifest; paths must already be manifest-relative."""
    rows = list(entries)
    years = [ep.start_year for ep, _ in rows]
    if years != sorted(set(years)):
        raise DataError("manifest-order", "epochs must be strictly ascending")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for ep, rel in rows:
            fh.write(f"{ep.start_year}\t{rel}\n")


def load_series(manifest_path: str | Path) -> EmbeddingSeries:
    """Load every epoch named by a manifest into one series."""
    return EmbeddingSeries(
        load_embedding(p, ep) for ep, p in read_manifest(manifest_path)
    )


__all__ = [
    "Epoch",
    "Vocabulary",
    "EpochEmbedding",
    "EmbeddingSeries",
    "format_f32_shortest",
    "load_text",
    "save_text",
    "load_native",
    "save_native",
    "vector_of",
    "sniff_format",
    "load_embedding",
    "save_embedding",
    "read_manifest",
    "write_manifest",
    "load_series",
]
