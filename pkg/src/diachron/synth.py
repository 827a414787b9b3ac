"""Deterministic synthetic series and brute-force oracles for testing.

Everything here is a pure function of a SynthPlan.  Randomness comes from the
pinned PCG32 generator (see prng) on fixed streams:

* stream 1: the reference epoch's Gaussian rows;
* stream 0x1000 + t: epoch t's planted rotation;
* stream 0x2000 + t: epoch t's additive noise.

The reference epoch is the plan's last epoch (mirroring alignment to the most
recent decade).  Epoch t's matrix is ``reference @ R_t.T`` plus optional
Gaussian noise, rows re-normalized; the reference itself uses the identity
rotation and no noise.  Planted analogue tokens then have their rows replaced
by the exact rotated image of their concept's reference row, which makes the
expected query results known by construction.

A plan serializes to a small ``key=value`` text file (one pair per line,
``#`` comments allowed)::

    seed=42
    epochs=20
    vocab_size=500
    dim=32
    noise_sigma=0.02
    start_year=1800
    step=10
    analogue.w7=w13,w44,...   # one token per epoch, oldest first

Rotations are always derived from the seed, never serialized.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .errors import DataError, NumericalError, ParseError
from .prng import Pcg32
from .query import Neighbor
from .store import Epoch, EmbeddingSeries, EpochEmbedding, Vocabulary

_REF_STREAM = 1
_ROT_STREAM_BASE = 0x1000
_NOISE_STREAM_BASE = 0x2000


@dataclass(frozen=True)
class SynthPlan:
    """Recipe for one synthetic embedding series; same plan, same bits."""

    seed: int
    epochs: int
    vocab_size: int
    dim: int
    noise_sigma: float = 0.0
    start_year: int = 1800
    step: int = 10
    planted_rotations: tuple[np.ndarray, ...] | None = None
    planted_analogues: dict[str, tuple[str, ...]] | None = None

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise DataError("bad-plan", f"seed must be a u64, got {self.seed}")
        if self.epochs < 1 or self.vocab_size < 1 or self.dim < 1 or self.step < 1:
            raise DataError("bad-plan", "epochs, vocab_size, dim, step must be >= 1")
        if not (np.isfinite(self.noise_sigma) and self.noise_sigma >= 0.0):
            raise DataError("bad-plan", f"bad noise_sigma {self.noise_sigma}")
        if self.planted_rotations is not None and len(self.planted_rotations) != self.epochs:
            raise DataError(
                "bad-plan",
                f"{len(self.planted_rotations)} rotations for {self.epochs} epochs",
            )
        if self.planted_analogues:
            for concept, tokens in self.planted_analogues.items():
                if len(tokens) != self.epochs:
                    raise DataError(
                        "bad-plan",
                        f"analogue chain for {concept!r} has {len(tokens)} entries, "
                        f"needs {self.epochs}",
                    )

    def epoch_labels(self) -> tuple[Epoch, ...]:
        return tuple(
            Epoch(self.start_year + self.step * t) for t in range(self.epochs)
        )

    @property
    def reference_epoch(self) -> Epoch:
        return Epoch(self.start_year + self.step * (self.epochs - 1))


def random_orthogonal(seed: int, d: int, *, stream: int = 0) -> np.ndarray:
    """A seeded random d x d orthogonal matrix.

    Gaussian columns are orthogonalized with twice-iterated classical
    Gram-Schmidt in a fixed column order; each pivot norm is positive, which
    fixes the sign convention.  Same seed, same matrix.
    """
    if d < 1:
        raise DataError("bad-count", f"dimension must be >= 1, got {d}")
    g = Pcg32(seed, stream).normals(d * d).reshape(d, d)
    q = np.empty((d, d))
    for j in range(d):
        v = g[:, j].copy()
        for _ in range(2):
            if j:
                v = v - q[:, :j] @ (q[:, :j].T @ v)
        nrm = float(np.linalg.norm(v))
        if nrm < 1e-10:
            raise NumericalError(
                "degenerate-basis", f"column {j} collapsed during orthogonalization"
            )
        q[:, j] = v / nrm
    return q


def _normalized_rows(m: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.einsum("ij,ij->i", m, m))
    scale = np.where(norms > 0.0, norms, 1.0)
    return m / scale[:, None]


def gen_series(plan: SynthPlan) -> EmbeddingSeries:
    """Build the synthetic series a plan describes."""
    labels = plan.epoch_labels()
    ref_idx = plan.epochs - 1
    vocab = Vocabulary(f"w{i}" for i in range(plan.vocab_size))
    if plan.planted_analogues:
        for concept, tokens in plan.planted_analogues.items():
            for token in (concept, *tokens):
                if token not in vocab:
                    raise DataError(
                        "missing-token", f"analogue token {token!r} not in vocabulary"
                    )

    ref = _normalized_rows(
        Pcg32(plan.seed, _REF_STREAM)
        .normals(plan.vocab_size * plan.dim)
        .reshape(plan.vocab_size, plan.dim)
    )

    members = []
    for t, epoch in enumerate(labels):
        if t == ref_idx:
            rot = np.eye(plan.dim)
        elif plan.planted_rotations is not None:
            rot = np.asarray(plan.planted_rotations[t], dtype=np.float64)
        else:
            rot = random_orthogonal(plan.seed, plan.dim, stream=_ROT_STREAM_BASE + t)
        m = ref @ rot.T
        if plan.noise_sigma > 0.0 and t != ref_idx:
            noise = (
                Pcg32(plan.seed, _NOISE_STREAM_BASE + t)
                .normals(plan.vocab_size * plan.dim)
                .reshape(plan.vocab_size, plan.dim)
            )
            m = m + plan.noise_sigma * noise
        m = _normalized_rows(m)
        if plan.planted_analogues:
            for concept, tokens in plan.planted_analogues.items():
                image = ref[vocab.index[concept]] @ rot.T
                m[vocab.index[tokens[t]]] = image / np.linalg.norm(image)
        members.append(EpochEmbedding(epoch, vocab, m.astype(np.float32)))
    return EmbeddingSeries(members)


def knn_oracle(
    e: EpochEmbedding,
    q: np.ndarray,
    n: int,
    exclude: Iterable[str] | None = None,
) -> list[Neighbor]:
    """Reference kNN: score every row one at a time, full sort, same tie rule.

    Scores use the pinned sequential fold (cumsum is a strict left-to-right
    accumulation), so a correct production scan must reproduce this list
    bit for bit.
    """
    if n < 1:
        raise DataError("bad-count", f"neighbor count must be >= 1, got {n}")
    q64 = np.asarray(q, dtype=np.float64).ravel()
    if q64.shape[0] != e.dim:
        raise DataError("dim-mismatch", f"query is {q64.shape[0]}-d, epoch is {e.dim}-d")
    q_sq = float(np.cumsum(q64 * q64)[-1])
    if q_sq == 0.0:
        raise DataError("zero-query-vector", "query vector has no nonzero component")
    q_norm = float(np.sqrt(q_sq))
    excluded = set(exclude) if exclude else set()
    scored = []
    for i, word in enumerate(e.vocab.words):
        if word in excluded:
            continue
        row = e.matrix[i].astype(np.float64)
        sq = float(np.cumsum(row * row)[-1])
        if sq == 0.0:
            continue
        dot = float(np.cumsum(row * q64)[-1])
        scored.append((word, dot / (float(np.sqrt(sq)) * q_norm), i))
    scored.sort(key=lambda item: (-item[1], item[2]))
    return [Neighbor(word, score) for word, score, _ in scored[:n]]


_PLAN_INT_KEYS = ("seed", "epochs", "vocab_size", "dim", "start_year", "step")


def load_plan(source: TextIO | str | Path) -> SynthPlan:
    """Parse the key=value plan format."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    values: dict[str, object] = {}
    analogues: dict[str, tuple[str, ...]] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("bad-plan", f"expected key=value, got {raw!r}", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in _PLAN_INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError:
                raise ParseError("bad-plan", f"bad integer for {key}", line=lineno) from None
        elif key == "noise_sigma":
            try:
                values[key] = float(value)
            except ValueError:
                raise ParseError("bad-plan", "bad float for noise_sigma", line=lineno) from None
        elif key.startswith("analogue."):
            concept = key[len("analogue.") :]
            if not concept or concept in analogues:
                raise ParseError("bad-plan", f"bad analogue key {key!r}", line=lineno)
            analogues[concept] = tuple(tok.strip() for tok in value.split(","))
        else:
            raise ParseError("bad-plan", f"unknown key {key!r}", line=lineno)
    for required in ("seed", "epochs", "vocab_size", "dim"):
        if required not in values:
            raise ParseError("bad-plan", f"missing required key {required!r}")
    return SynthPlan(
        planted_analogues=analogues or None,
        **values,  # type: ignore[arg-type]
    )


def save_plan(plan: SynthPlan, sink: TextIO) -> None:
    """Write the key=value plan format (rotations are derived, not stored)."""
    sink.write(f"seed={plan.seed}\n")
    sink.write(f"epochs={plan.epochs}\n")
    sink.write(f"vocab_size={plan.vocab_size}\n")
    sink.write(f"dim={plan.dim}\n")
    sink.write(f"noise_sigma={plan.noise_sigma!r}\n")
    sink.write(f"start_year={plan.start_year}\n")
    sink.write(f"step={plan.step}\n")
    if plan.planted_analogues:
        for concept, tokens in plan.planted_analogues.items():
            sink.write(f"analogue.{concept}={','.join(tokens)}\n")
