"""Cosine nearest-neighbor queries over aligned epochs.

Scores follow one pinned recipe so results are exactly reproducible: the
cosine of the query against a row is ``dot / (row_norm * query_norm)`` where
the dot product and both squared norms are float64 sequential folds over
components (see linalg), and the two divisions round exactly once each.
Candidate lists sort by score descending with ties broken by ascending
vocabulary index.

similar_by_vector scans in two phases: a fast BLAS pass ranks rows
approximately, then every row whose approximate score is within a safety
margin of the cut re-scores under the pinned fold and the exact scores decide
the final order.  BLAS and the fold agree to ~1e-13 on unit-scale cosines
while the margin is 1e-9, so the output is identical to folding every row,
at a fraction of the cost.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from . import linalg
from .errors import DataError
from .store import Epoch, EpochEmbedding, vector_of
from .align import AlignedSeries

# Approximate-score slack covering BLAS-vs-fold rounding differences.
_FILTER_MARGIN = 1e-9
# Chunk such that the float64 working copy stays cache-resident.
_GEMV_CHUNK = 8192


class Neighbor(NamedTuple):
    """One ranked word with its cosine score."""

    word: str
    score: float


@dataclass(frozen=True)
class AnalogyTable:
    """Per-epoch ranked neighbor lists for one concept's reference vector."""

    concept: str
    reference: Epoch
    per_epoch: tuple[tuple[Epoch, tuple[Neighbor, ...]], ...]


def _checked_query(e: EpochEmbedding, q: np.ndarray) -> tuple[np.ndarray, float]:
    q = np.asarray(q, dtype=np.float64).ravel()
    if q.shape[0] != e.dim:
        raise DataError("dim-mismatch", f"query is {q.shape[0]}-d, epoch is {e.dim}-d")
    if not np.isfinite(q).all():
        raise DataError("non-finite-value", "query vector contains NaN or Inf")
    q_sq = linalg.seq_vec_sq_norm(q)
    if q_sq == 0.0:
        raise DataError("zero-query-vector", "query vector has no nonzero component")
    return q, float(np.sqrt(q_sq))


def _approx_dots(matrix: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.empty(matrix.shape[0], dtype=np.float64)
    for lo in range(0, matrix.shape[0], _GEMV_CHUNK):
        out[lo : lo + _GEMV_CHUNK] = matrix[lo : lo + _GEMV_CHUNK].astype(np.float64) @ q
    return out


def similar_by_vector(
    e: EpochEmbedding,
    q: np.ndarray,
    n: int,
    exclude: Iterable[str] | None = None,
) -> list[Neighbor]:
    """The ``n`` highest-cosine words for a query vector in one epoch.

    Zero rows and excluded tokens are ineligible; ties break by ascending
    vocabulary index.  Returns fewer than ``n`` entries when fewer words are
    eligible.
    """
    if n < 1:
        raise DataError("bad-count", f"neighbor count must be >= 1, got {n}")
    q, q_norm = _checked_query(e, q)

    eligible = e.row_sq_norms > 0.0
    if exclude:
        for token in exclude:
            i = e.vocab.index.get(token)
            if i is not None:
                eligible[i] = False
    n_eligible = int(eligible.sum())
    k = min(n, n_eligible)
    if k == 0:
        return []

    denom = e.row_norms * q_norm
    approx = np.full(e.matrix.shape[0], -np.inf)
    with np.errstate(invalid="ignore", divide="ignore"):
        approx[eligible] = _approx_dots(e.matrix, q)[eligible] / denom[eligible]

    if k == n_eligible:
        cand_idx = np.flatnonzero(eligible)
    else:
        kth = np.partition(approx, approx.size - k)[approx.size - k]
        cand_idx = np.flatnonzero(approx >= kth - _FILTER_MARGIN)

    exact = linalg.seq_dots(e.matrix[cand_idx], q) / denom[cand_idx]
    order = np.lexsort((cand_idx, -exact))[:k]
    return [
        Neighbor(e.vocab.words[cand_idx[i]], float(exact[i])) for i in order
    ]


def temporal_analogues(
    s: AlignedSeries,
    concept: str,
    n: int,
    query_epoch: Epoch | None = None,
    exclude_concept: bool = False,
) -> AnalogyTable:
    """Rank every epoch's words against the concept's reference-epoch vector.

    The concept itself stays eligible (its own epochs should find it) unless
    ``exclude_concept`` is set.  ``query_epoch`` overrides which epoch supplies
    the concept vector; it defaults to the alignment reference.
    """
    source = query_epoch if query_epoch is not None else s.reference
    ref = s[source]
    vec = vector_of(ref, concept)
    if vec is None or not np.any(vec):
        raise DataError(
            "out-of-vocabulary",
            f"concept {concept!r} absent or zero in epoch {source}",
        )
    exclude = {concept} if exclude_concept else None
    rows = tuple(
        (epoch, tuple(similar_by_vector(s[epoch], vec, n, exclude)))
        for epoch in s.epochs
    )
    return AnalogyTable(concept, source, rows)


def cross_epoch_pair(
    s: AlignedSeries, word_a: str, epoch_a: Epoch, word_b: str, epoch_b: Epoch
) -> float:
    """Cosine between two aligned word vectors from (possibly) different epochs."""
    vecs = []
    for word, epoch in ((word_a, epoch_a), (word_b, epoch_b)):
        vec = vector_of(s[epoch], word)
        if vec is None or not np.any(vec):
            raise DataError(
                "out-of-vocabulary", f"word {word!r} absent or zero in epoch {epoch}"
            )
        vecs.append(vec.astype(np.float64))
    va, vb = vecs
    dot = float(np.cumsum(va * vb)[-1])
    denom = float(np.sqrt(linalg.seq_vec_sq_norm(va))) * float(
        np.sqrt(linalg.seq_vec_sq_norm(vb))
    )
    return dot / denom
