"""Dense numerical core: SVD, transposed products, orthogonality checks.

Everything here computes in float64 regardless of input dtype; callers narrow
back to float32 only at the embedding-matrix boundary.  The SVD is a one-sided
Jacobi (Hestenes) iteration over a fixed round-robin pair schedule, so results
are deterministic for a fixed input.  It only ever runs on small square
matrices (the d x d cross-covariance of an alignment, d ~ 300).

This module also pins the *sequential fold* used for cosine scoring: a dot
product (or squared norm) is accumulated strictly left to right over vector
components, one correctly-rounded multiply and add per component.  The
vectorized implementations below perform exactly that per-row operation
across many rows at once, so a scalar loop over one row reproduces them
bit for bit.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DataError, NumericalError

# Relative off-diagonal threshold |a_p . a_q| <= _JACOBI_TOL * |a_p| |a_q|
# at which a column pair counts as orthogonal.
_JACOBI_TOL = 1e-13
_MAX_SWEEPS = 64

_FOLD_CHUNK = 8192


class SvdResult(NamedTuple):
    """Factorization M = u @ diag(sigma) @ v.T with orthonormal u, v columns."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray


def matmul_t(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return ``a.T @ b`` accumulated in float64.

    Both inputs must share one shape (n rows by d columns); the result is
    d x d.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape != b.shape:
        raise DataError(
            "shape-mismatch",
            f"matmul_t needs two equal-shape 2-D matrices, got {a.shape} and {b.shape}",
        )
    return a.astype(np.float64, copy=False).T @ b.astype(np.float64, copy=False)


def _round_robin_schedule(d: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Fixed tournament schedule pairing every column index pair once."""
    players = list(range(d))
    if d % 2:
        players.append(-1)
    m = len(players)
    arr = players[:]
    rounds = []
    for _ in range(max(m - 1, 0)):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = arr[i], arr[m - 1 - i]
            if p != -1 and q != -1:
                ps.append(min(p, q))
                qs.append(max(p, q))
        if ps:
            rounds.append((np.asarray(ps), np.asarray(qs)))
        arr = [arr[0], arr[-1]] + arr[1:-1]
    return rounds


def _complete_orthonormal(u: np.ndarray, missing: np.ndarray) -> None:
    """Fill zero columns of ``u`` with unit vectors orthogonal to the rest.

    Candidates are canonical basis vectors taken in index order, projected out
    against the current columns twice for stability; deterministic.
    """
    d = u.shape[0]
    filled = [j for j in range(u.shape[1]) if j not in set(missing.tolist())]
    basis = u[:, filled] if filled else np.empty((d, 0))
    for j in missing:
        for k in range(d):
            cand = np.zeros(d)
            cand[k] = 1.0
            for _ in range(2):
                if basis.shape[1]:
                    cand = cand - basis @ (basis.T @ cand)
            nrm = float(np.linalg.norm(cand))
            if nrm > 1e-3:
                u[:, j] = cand / nrm
                basis = np.concatenate([basis, u[:, j : j + 1]], axis=1)
                break
        else:
            raise NumericalError(
                "svd-non-convergence", "could not complete orthonormal basis"
            )


def svd(m: np.ndarray, *, max_sweeps: int = _MAX_SWEEPS) -> SvdResult:
    """Decompose a square matrix with one-sided Jacobi rotations.

    Returns singular values sorted descending; raises NumericalError if the
    column pairs are not all orthogonal after ``max_sweeps`` passes.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DataError("shape-mismatch", f"svd needs a square matrix, got {m.shape}")
    if not np.isfinite(m).all():
        raise DataError("non-finite-value", "svd input contains NaN or Inf")
    d = m.shape[0]
    if d == 0:
        return SvdResult(np.empty((0, 0)), np.empty(0), np.empty((0, 0)))

    a = m.copy()
    v = np.eye(d)
    schedule = _round_robin_schedule(d)
    converged = False
    for _ in range(max_sweeps):
        worst = 0.0
        for ps, qs in schedule:
            p_cols = a[:, ps]
            q_cols = a[:, qs]
            alpha = np.einsum("ij,ij->j", p_cols, p_cols)
            beta = np.einsum("ij,ij->j", q_cols, q_cols)
            gamma = np.einsum("ij,ij->j", p_cols, q_cols)
            denom = np.sqrt(alpha * beta)
            with np.errstate(invalid="ignore", divide="ignore"):
                rel = np.where(denom > 0.0, np.abs(gamma) / denom, 0.0)
            worst = max(worst, float(rel.max()))
            rotate = rel > _JACOBI_TOL
            if not rotate.any():
                continue
            ps_r = ps[rotate]
            qs_r = qs[rotate]
            g = gamma[rotate]
            zeta = (beta[rotate] - alpha[rotate]) / (2.0 * g)
            sign = np.where(zeta >= 0.0, 1.0, -1.0)
            t = sign / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            for mat in (a, v):
                pc = mat[:, ps_r]
                qc = mat[:, qs_r]
                mat[:, ps_r] = c * pc - s * qc
                mat[:, qs_r] = s * pc + c * qc
        if worst <= _JACOBI_TOL:
            converged = True
            break
    if not converged:
        raise NumericalError(
            "svd-non-convergence",
            f"Jacobi sweeps did not converge within {max_sweeps} passes",
        )

    sigma = np.sqrt(np.einsum("ij,ij->j", a, a))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    a = a[:, order]
    v = v[:, order]
    u = np.zeros_like(a)
    nonzero = sigma > 0.0
    u[:, nonzero] = a[:, nonzero] / sigma[nonzero]
    if not nonzero.all():
        _complete_orthonormal(u, np.flatnonzero(~nonzero))
    return SvdResult(u, sigma, v)


def orthogonality_defect(q: np.ndarray) -> float:
    """Frobenius norm of ``q.T @ q - I``."""
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise DataError(
            "shape-mismatch", f"orthogonality defect needs a square matrix, got {q.shape}"
        )
    gram = q.T @ q
    gram[np.diag_indices_from(gram)] -= 1.0
    return float(np.linalg.norm(gram))


def seq_dots(matrix: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Per-row dot products with ``q`` under the pinned sequential fold.

    ``matrix`` rows are promoted to float64 and accumulated component by
    component in index order; the result for row i is bit-identical to
    ``sum over j of float64(matrix[i, j]) * q[j]`` folded left to right.
    """
    q = np.asarray(q, dtype=np.float64)
    n, d = matrix.shape
    out = np.empty(n, dtype=np.float64)
    for lo in range(0, n, _FOLD_CHUNK):
        block = np.ascontiguousarray(matrix[lo : lo + _FOLD_CHUNK].T)
        acc = np.zeros(block.shape[1], dtype=np.float64)
        for j in range(d):
            acc += block[j].astype(np.float64) * q[j]
        out[lo : lo + _FOLD_CHUNK] = acc
    return out


def seq_sq_norms(matrix: np.ndarray) -> np.ndarray:
    """Per-row squared norms under the pinned sequential fold."""
    n, d = matrix.shape
    out = np.empty(n, dtype=np.float64)
    for lo in range(0, n, _FOLD_CHUNK):
        block = np.ascontiguousarray(matrix[lo : lo + _FOLD_CHUNK].T)
        acc = np.zeros(block.shape[1], dtype=np.float64)
        for j in range(d):
            col = block[j].astype(np.float64)
            acc += col * col
        out[lo : lo + _FOLD_CHUNK] = acc
    return out


def seq_vec_sq_norm(vec: np.ndarray) -> float:
    """Squared norm of one float64 vector under the pinned sequential fold."""
    vec = np.asarray(vec, dtype=np.float64)
    if vec.size == 0:
        return 0.0
    return float(np.cumsum(vec * vec)[-1])
