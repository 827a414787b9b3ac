"""Decade conversion: npy matrix + pickled vocabulary to the text format.

Output files follow the toolkit's text interchange contract: header
``<count> <dim>``, then one ``<token> <f1> ... <fdim>`` line per word,
single-space separated, newline terminated, UTF-8.  Token order is the
upstream vocabulary order.  Tokens the text format cannot carry (empty,
whitespace inside, repeated) are dropped with a logged warning naming the
row index; everything else survives bit-exactly at float32 precision.
"""
from __future__ import annotations

import logging
import pickle
from dataclasses import dataclass
from pathlib import Path

import numpy as np

logger = logging.getLogger("histwords_convert")


class ConvertError(Exception):
    """Conversion failure with a machine-readable kind (CLI exit code 2)."""

    def __init__(self, kind: str, detail: str):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail


@dataclass(frozen=True)
class UpstreamDecade:
    """One decade of the upstream layout: matrix file plus vocabulary file."""

    year: int
    matrix_path: Path
    vocab_path: Path


def _shortest_f32(value: np.float32) -> str:
    """Shortest decimal whose float32 parse reproduces the exact bits."""
    target = value.tobytes()
    fv = float(value)
    with np.errstate(over="ignore"):
        for prec in range(1, 10):
            s = "%.*g" % (prec, fv)
            if np.float32(float(s)).tobytes() == target:
                return s
    raise AssertionError(f"no 9-digit decimal reproduces {value!r}")


def _load_matrix(decade: UpstreamDecade) -> np.ndarray:
    try:
        matrix = np.load(decade.matrix_path, allow_pickle=False)
    except OSError as exc:
        raise ConvertError("io", f"decade {decade.year}: {exc}") from None
    except ValueError as exc:
        raise ConvertError(
            "bad-matrix", f"decade {decade.year}: {decade.matrix_path.name}: {exc}"
        ) from None
    if matrix.ndim != 2 or matrix.shape[1] < 1:
        raise ConvertError(
            "bad-matrix",
            f"decade {decade.year}: expected a 2-D matrix, got shape {matrix.shape}",
        )
    with np.errstate(over="ignore"):
        matrix = np.ascontiguousarray(matrix, dtype=np.float32)
    if not np.isfinite(matrix).all():
        raise ConvertError(
            "non-finite-value", f"decade {decade.year}: matrix contains NaN or Inf"
        )
    return matrix


def _load_vocab(decade: UpstreamDecade) -> list[str]:
    try:
        raw = decade.vocab_path.read_bytes()
    except OSError as exc:
        raise ConvertError("io", f"decade {decade.year}: {exc}") from None
    try:
        vocab = pickle.loads(raw)
    except Exception:
        # older distributions carry py2 str pickles
        try:
            vocab = pickle.loads(raw, encoding="latin1")
        except Exception as exc:
            raise ConvertError(
                "bad-vocab", f"decade {decade.year}: unreadable pickle: {exc}"
            ) from None
    if not isinstance(vocab, (list, tuple)):
        raise ConvertError(
            "bad-vocab",
            f"decade {decade.year}: expected a token list, got {type(vocab).__name__}",
        )
    tokens = []
    for i, token in enumerate(vocab):
        if isinstance(token, bytes):
            try:
                token = token.decode("utf-8")
            except UnicodeDecodeError:
                raise ConvertError(
                    "bad-vocab", f"decade {decade.year}: token {i} is not UTF-8"
                ) from None
        elif not isinstance(token, str):
            raise ConvertError(
                "bad-vocab",
                f"decade {decade.year}: token {i} is {type(token).__name__}, not str",
            )
        tokens.append(token)
    return tokens


def convert_decade(decade: UpstreamDecade, out_path: Path | str) -> tuple[int, int]:
    """Convert one decade; returns (words written, dimension).

    Untransportable tokens (empty, internal whitespace, duplicates) are
    dropped together with their rows, each logged with its index.
    """
    matrix = _load_matrix(decade)
    vocab = _load_vocab(decade)
    if len(vocab) != matrix.shape[0]:
        raise ConvertError(
            "count-mismatch",
            f"decade {decade.year}: {matrix.shape[0]} matrix rows vs "
            f"{len(vocab)} vocabulary tokens",
        )

    dim = matrix.shape[1]
    seen: set[str] = set()
    lines: list[str] = []
    for i, token in enumerate(vocab):
        if not token or any(ch.isspace() for ch in token):
            logger.warning(
                "decade %d: dropping token %d (%r): not representable",
                decade.year, i, token,
            )
            continue
        if token in seen:
            logger.warning(
                "decade %d: dropping token %d (%r): duplicate", decade.year, i, token
            )
            continue
        seen.add(token)
        values = " ".join(_shortest_f32(v) for v in matrix[i])
        lines.append(f"{token} {values}\n")

    out_path = Path(out_path)
    with open(out_path, "wb") as fh:
        fh.write(f"{len(lines)} {dim}\n".encode("utf-8"))
        fh.write("".join(lines).encode("utf-8"))
    return len(lines), dim


def find_decades(directory: Path | str) -> list[UpstreamDecade]:
    """Scan a directory for ``<year>-w.npy`` / ``<year>-vocab.pkl`` pairs."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ConvertError("io", f"not a directory: {directory}")
    decades = []
    for matrix_path in sorted(directory.glob("*-w.npy")):
        stem = matrix_path.name[: -len("-w.npy")]
        if not stem.isdigit():
            continue
        vocab_path = directory / f"{stem}-vocab.pkl"
        if not vocab_path.is_file():
            raise ConvertError(
                "missing-vocab", f"decade {stem}: no {vocab_path.name} next to {matrix_path.name}"
            )
        decades.append(UpstreamDecade(int(stem), matrix_path, vocab_path))
    decades.sort(key=lambda d: d.year)
    return decades


def convert_all(
    in_dir: Path | str, out_dir: Path | str, manifest_path: Path | str
) -> list[tuple[int, int, int]]:
    """Convert every decade found in ``in_dir``; returns (year, words, dim) rows.

    Output files are named ``<year>.txt`` inside ``out_dir`` and listed in a
    manifest (``<year>\\t<year>.txt`` per line, ascending) the main toolkit
    consumes directly.  Any per-decade failure aborts the run naming that
    decade.
    """
    decades = find_decades(in_dir)
    if not decades:
        raise ConvertError("no-decades-found", f"no <year>-w.npy files in {in_dir}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = Path(manifest_path)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)

    summary = []
    manifest_lines = []
    for decade in decades:
        words, dim = convert_decade(decade, out_dir / f"{decade.year}.txt")
        logger.info("decade %d: %d words, dim %d", decade.year, words, dim)
        summary.append((decade.year, words, dim))
        try:
            rel = (out_dir / f"{decade.year}.txt").relative_to(manifest_path.parent)
        except ValueError:
            rel = out_dir / f"{decade.year}.txt"
        manifest_lines.append(f"{decade.year}\t{rel}\n")
    dims = {dim for _, _, dim in summary}
    if len(dims) > 1:
        raise ConvertError("dim-mismatch", f"decades disagree on dimension: {sorted(dims)}")
    manifest_path.write_text("".join(manifest_lines), encoding="utf-8")
    return summary
