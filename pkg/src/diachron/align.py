"""Rotation fitting and whole-series alignment to a reference epoch.

The fit finds the orthogonal matrix Q minimizing ``||A @ Q - B||_F`` for the
paired shared-vocabulary rows A (source epoch) and B (target epoch): with the
SVD ``A.T @ B = U S V.T``, the minimizer is ``Q = U @ V.T``.  The rotation is
fitted on shared words only but applied to every row of the source epoch, so
queries can still reach words the reference decade never saw.  Each epoch is
aligned directly to the reference, never chained epoch to epoch.

An aligned series persists as a directory: ``manifest.tsv`` (the store
manifest schema), one ``<year>.dwe`` native embedding per epoch, one
``<year>.rot`` rotation per epoch (magic ``ROT1``, u32 LE dim, then dim*dim
IEEE-754 binary64 LE values row-major), and ``reference.txt`` holding the
reference start year.
"""
from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO

import numpy as np

from . import linalg
from .errors import DataError, NonUniqueRotationWarning, ParseError
from .preprocess import normalize_rows, paired_submatrices, shared_vocabulary
from .store import (
    Epoch,
    EmbeddingSeries,
    EpochEmbedding,
    load_native,
    read_manifest,
    save_native,
    write_manifest,
)

_ROT_MAGIC = b"ROT1"

# Construction-time orthogonality gate for fitted rotations.
_MAX_DEFECT = 1e-4


@dataclass(frozen=True, eq=False)
class RotationMatrix:
    """Orthogonal map carrying one epoch's rows into the target epoch's space."""

    q: np.ndarray
    source_epoch: Epoch | None = None
    target_epoch: Epoch | None = None

    def __post_init__(self):
        q = np.ascontiguousarray(self.q, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise DataError("shape-mismatch", f"rotation must be square, got {q.shape}")
        defect = linalg.orthogonality_defect(q)
        if defect >= _MAX_DEFECT:
            raise DataError(
                "not-orthogonal", f"rotation defect {defect:.3e} exceeds {_MAX_DEFECT}"
            )
        if (
            self.source_epoch is not None
            and self.source_epoch == self.target_epoch
            and not np.array_equal(q, np.eye(q.shape[0]))
        ):
            raise DataError(
                "not-identity", f"self-rotation for epoch {self.source_epoch} must be identity"
            )
        q.flags.writeable = False
        object.__setattr__(self, "q", q)

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    @classmethod
    def identity(cls, dim: int, epoch: Epoch) -> "RotationMatrix":
        return cls(np.eye(dim), epoch, epoch)


class AlignedSeries:
    """All epochs rotated into the reference epoch's coordinates.

    Matrices are row-normalized; the reference epoch's rotation is the
    identity.  Immutable once built.
    """

    __slots__ = ("reference", "_members", "_rotations")

    def __init__(
        self,
        reference: Epoch,
        members: dict[Epoch, EpochEmbedding],
        rotations: dict[Epoch, RotationMatrix],
    ):
        if reference not in members:
            raise DataError("missing-reference-epoch", f"epoch {reference} not present")
        if set(members) != set(rotations):
            raise DataError("epoch-mismatch", "rotation set differs from epoch set")
        dims = {e.dim for e in members.values()}
        if len(dims) > 1:
            raise DataError("dim-mismatch", f"mixed dimensions {sorted(dims)}")
        ref_rot = rotations[reference]
        if not np.array_equal(ref_rot.q, np.eye(ref_rot.dim)):
            raise DataError("not-identity", "reference epoch rotation must be identity")
        for ep, e in members.items():
            norms = e.row_norms
            nonzero = norms > 0.0
            if nonzero.any() and np.abs(norms[nonzero] - 1.0).max() > 1e-5:
                raise DataError(
                    "not-normalized", f"epoch {ep} has rows off unit norm by > 1e-5"
                )
        self.reference = reference
        self._members = dict(sorted(members.items()))
        self._rotations = dict(sorted(rotations.items()))

    @property
    def epochs(self) -> tuple[Epoch, ...]:
        return tuple(self._members)

    def __len__(self) -> int:
        return len(self._members)

    def __contains__(self, epoch: Epoch) -> bool:
        return epoch in self._members

    def __getitem__(self, epoch: Epoch) -> EpochEmbedding:
        try:
            return self._members[epoch]
        except KeyError:
            raise DataError("missing-epoch", f"epoch {epoch} not in aligned series") from None

    def __iter__(self):
        return iter(self._members.values())

    def rotation(self, epoch: Epoch) -> RotationMatrix:
        try:
            return self._rotations[epoch]
        except KeyError:
            raise DataError("missing-epoch", f"epoch {epoch} not in aligned series") from None


def procrustes(
    a: np.ndarray,
    b: np.ndarray,
    source_epoch: Epoch | None = None,
    target_epoch: Epoch | None = None,
) -> RotationMatrix:
    """Fit the orthogonal Q minimizing ``||a @ Q - b||_F``.

    ``a`` and ``b`` must be equal-shape matrices with paired rows.  A
    rank-deficient cross-covariance still yields an orthogonal Q, with a
    NonUniqueRotationWarning recording that the minimizer is not unique.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape != b.shape:
        raise DataError(
            "shape-mismatch", f"paired matrices differ: {a.shape} vs {b.shape}"
        )
    if a.shape[0] < 1:
        raise DataError("shape-mismatch", "need at least one paired row")
    m = linalg.matmul_t(a, b)
    res = linalg.svd(m)
    d = m.shape[0]
    if res.sigma[-1] <= res.sigma[0] * d * np.finfo(np.float64).eps:
        warnings.warn(
            "cross-covariance is rank deficient; fitted rotation is not unique",
            NonUniqueRotationWarning,
            stacklevel=2,
        )
    q = res.u @ res.v.T
    return RotationMatrix(q, source_epoch, target_epoch)


def apply_rotation(e: EpochEmbedding, rot: RotationMatrix) -> EpochEmbedding:
    """Rotate every row of an epoch: row -> row @ Q, float64 inside."""
    if rot.dim != e.dim:
        raise DataError("dim-mismatch", f"rotation is {rot.dim}-d, epoch is {e.dim}-d")
    if rot.source_epoch is not None and rot.source_epoch != e.epoch:
        raise DataError(
            "epoch-mismatch",
            f"rotation maps epoch {rot.source_epoch}, embedding is epoch {e.epoch}",
        )
    out = np.empty_like(e.matrix)
    chunk = 16384
    for lo in range(0, e.matrix.shape[0], chunk):
        block = e.matrix[lo : lo + chunk].astype(np.float64)
        out[lo : lo + chunk] = (block @ rot.q).astype(np.float32)
    return EpochEmbedding(e.epoch, e.vocab, out)


def align_series(series: EmbeddingSeries, reference: Epoch) -> AlignedSeries:
    """Align every epoch of a cleaned, normalized series to the reference.

    Each non-reference epoch is fitted on its vocabulary shared with the
    reference and rotated wholesale; outputs are re-normalized.  Raises when
    the reference is absent or an epoch shares no vocabulary with it.
    """
    if reference not in series:
        raise DataError("missing-reference-epoch", f"epoch {reference} not in series")
    ref = series[reference]
    members: dict[Epoch, EpochEmbedding] = {}
    rotations: dict[Epoch, RotationMatrix] = {}
    for e in series:
        if e.epoch == reference:
            rot = RotationMatrix.identity(ref.dim, reference)
            members[e.epoch] = normalize_rows(e)
        else:
            shared = shared_vocabulary(e, ref)
            if not shared:
                raise DataError(
                    "empty-shared-vocabulary",
                    f"epoch {e.epoch} shares no words with reference {reference}",
                )
            a, b = paired_submatrices(e, ref, shared)
            rot = procrustes(a, b, source_epoch=e.epoch, target_epoch=reference)
            members[e.epoch] = normalize_rows(apply_rotation(e, rot))
        rotations[e.epoch] = rot
    return AlignedSeries(reference, members, rotations)


def shared_vocabulary_counts(series: EmbeddingSeries, reference: Epoch) -> dict[Epoch, int]:
    """Diagnostic: shared-word count between every epoch and the reference."""
    if reference not in series:
        raise DataError("missing-reference-epoch", f"epoch {reference} not in series")
    ref = series[reference]
    return {e.epoch: len(shared_vocabulary(e, ref)) for e in series}


def save_rotation(rot: RotationMatrix, sink: BinaryIO) -> None:
    """Write the ROT1 binary rotation format."""
    sink.write(struct.pack("<4sI", _ROT_MAGIC, rot.dim))
    sink.write(np.ascontiguousarray(rot.q, dtype="<f8").tobytes())


def load_rotation(
    source: BinaryIO | str | Path,
    source_epoch: Epoch | None = None,
    target_epoch: Epoch | None = None,
) -> RotationMatrix:
    """Read the ROT1 binary rotation format."""
    if isinstance(source, (str, Path)):
        buf = Path(source).read_bytes()
    else:
        buf = source.read()
    if len(buf) < 4 or buf[:4] != _ROT_MAGIC:
        raise ParseError("bad-magic", f"expected {_ROT_MAGIC!r}, got {buf[:4]!r}")
    if len(buf) < 8:
        raise ParseError("truncated", "stream ends inside rotation header")
    (dim,) = struct.unpack_from("<I", buf, 4)
    expected = 8 + 8 * dim * dim
    if len(buf) < expected:
        raise ParseError("truncated", f"expected {expected} bytes, got {len(buf)}")
    if len(buf) > expected:
        raise ParseError("trailing-bytes", f"{len(buf) - expected} bytes after matrix")
    q = np.frombuffer(buf, dtype="<f8", count=dim * dim, offset=8).reshape(dim, dim)
    return RotationMatrix(q.copy(), source_epoch, target_epoch)


def save_aligned(aligned: AlignedSeries, directory: str | Path) -> None:
    """Persist an aligned series as the documented directory layout."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for epoch in aligned.epochs:
        year = epoch.start_year
        with open(directory / f"{year}.dwe", "wb") as fh:
            save_native(aligned[epoch], fh)
        with open(directory / f"{year}.rot", "wb") as fh:
            save_rotation(aligned.rotation(epoch), fh)
        entries.append((epoch, f"{year}.dwe"))
    write_manifest(entries, directory / "manifest.tsv")
    (directory / "reference.txt").write_text(
        f"{aligned.reference.start_year}\n", encoding="utf-8"
    )


def read_aligned_reference(directory: str | Path) -> Epoch:
    """The reference epoch recorded in an aligned-series directory."""
    ref_path = Path(directory) / "reference.txt"
    if not ref_path.is_file():
        raise DataError("missing-reference-epoch", f"no reference.txt in {directory}")
    try:
        return Epoch(int(ref_path.read_text(encoding="utf-8").strip()))
    except ValueError:
        raise ParseError("malformed-manifest", f"bad year in {ref_path}") from None


def load_aligned(directory: str | Path) -> AlignedSeries:
    """Load a directory written by save_aligned."""
    directory = Path(directory)
    reference = read_aligned_reference(directory)
    members: dict[Epoch, EpochEmbedding] = {}
    rotations: dict[Epoch, RotationMatrix] = {}
    for epoch, path in read_manifest(directory / "manifest.tsv"):
        members[epoch] = load_native(path, epoch)
        rotations[epoch] = load_rotation(
            directory / f"{epoch.start_year}.rot", epoch, reference
        )
    return AlignedSeries(reference, members, rotations)


def load_aligned_epoch(directory: str | Path, epoch: Epoch) -> EpochEmbedding:
    """Load a single epoch from an aligned-series directory."""
    directory = Path(directory)
    for ep, path in read_manifest(directory / "manifest.tsv"):
        if ep == epoch:
            return load_native(path, ep)
    raise DataError("missing-epoch", f"epoch {epoch} not in aligned series {directory}")
