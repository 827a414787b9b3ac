"""Cleaning, normalization, and pairing steps that precede alignment.

A "zero embedding" is a row whose every component is exactly 0.0f (positive
or negative zero); such words carry no signal and are dropped before
alignment and querying.  Row normalization and shared-vocabulary pairing
prepare two epochs for a rotation fit: the rotation is estimated on words
both epochs know, ordered by the alignment target's vocabulary so runs are
deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .store import Epoch, EmbeddingSeries, EpochEmbedding, Vocabulary


@dataclass(frozen=True)
class VocabStats:
    """Post-cleaning word counts, one entry per epoch, ascending."""

    per_epoch: tuple[tuple[Epoch, int], ...]


def drop_zero_rows(e: EpochEmbedding) -> tuple[EpochEmbedding, int]:
    """Remove words whose vectors are entirely zero.

    Survivors keep their relative order and exact float bits; the second
    return value is the number of removed words.
    """
    keep = ~np.all(e.matrix == 0.0, axis=1)
    removed = int(len(keep) - keep.sum())
    if removed == 0:
        return e, 0
    words = [w for w, k in zip(e.vocab.words, keep) if k]
    return EpochEmbedding(e.epoch, Vocabulary(words), e.matrix[keep]), removed


def normalize_rows(e: EpochEmbedding) -> EpochEmbedding:
    """Scale every nonzero row to unit L2 norm (zero rows are left alone).

    Norms are computed in float64 and the result narrowed back to float32,
    so surviving norms land within float32 rounding of 1.
    """
    m = e.matrix.astype(np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", m, m))
    scale = np.where(norms > 0.0, norms, 1.0)
    return EpochEmbedding(e.epoch, e.vocab, (m / scale[:, None]).astype(np.float32))


def shared_vocabulary(a: EpochEmbedding, b: EpochEmbedding) -> list[str]:
    """Tokens present in both epochs, ordered by ``b``'s vocabulary.

    ``b`` is the alignment target, so the pairing order is stable no matter
    which source epoch is being aligned.
    """
    return [w for w in b.vocab.words if w in a.vocab]


def paired_submatrices(
    a: EpochEmbedding, b: EpochEmbedding, shared: list[str]
) -> tuple[np.ndarray, np.ndarray]:
    """Row-aligned float32 submatrices for the shared tokens.

    Row i of the first result is ``a``'s vector for ``shared[i]``; row i of
    the second is ``b``'s.
    """
    for e, name in ((a, "first"), (b, "second")):
        missing = next((w for w in shared if w not in e.vocab), None)
        if missing is not None:
            raise DataError(
                "missing-token", f"token {missing!r} absent from {name} epoch {e.epoch}"
            )
    rows_a = np.array([a.vocab.index[w] for w in shared], dtype=np.intp)
    rows_b = np.array([b.vocab.index[w] for w in shared], dtype=np.intp)
    return a.matrix[rows_a].copy(), b.matrix[rows_b].copy()


def vocab_stats(series: EmbeddingSeries) -> VocabStats:
    """Words per epoch, ascending; expects an already cleaned series."""
    return VocabStats(tuple((e.epoch, len(e.vocab)) for e in series))
