"""Embedding formats and cleaning, end to end on a toy decade.

Builds a tiny epoch by hand, writes it in both on-disk formats, shows that
round trips are bit-exact, and demonstrates zero-row cleaning plus the
vocabulary statistics that feed external plotting.
"""
import io
import sys

import numpy as np

from diachron import (
    EmbeddingSeries,
    Epoch,
    EpochEmbedding,
    Vocabulary,
    drop_zero_rows,
    emit_vocab_stats,
    load_native,
    load_text,
    save_native,
    save_text,
    vector_of,
    vocab_stats,
)

# --- a toy 1800s decade with two dead (all-zero) entries -------------------

words = ["steam", "coal", "ghost1", "engine", "ghost2"]
matrix = np.array(
    [
        [0.8, 0.1, -0.3],
        [0.7, 0.2, -0.2],
        [0.0, 0.0, 0.0],
        [0.5, -0.4, 0.6],
        [0.0, -0.0, 0.0],
    ],
    dtype=np.float32,
)
epoch = EpochEmbedding(Epoch(1800), Vocabulary(words), matrix)
print(f"built epoch {epoch.epoch} with {len(epoch.vocab)} words, dim {epoch.dim}")

# --- text format: human-auditable, shortest float32 decimals ---------------

buf = io.BytesIO()
save_text(epoch, buf)
print("\ntext format:")
sys.stdout.write(buf.getvalue().decode())

reloaded = load_text(io.BytesIO(buf.getvalue()), Epoch(1800))
print("text round-trip bit-exact:", reloaded.matrix.tobytes() == epoch.matrix.tobytes())

# --- native format: compact binary with the same content --------------------

buf = io.BytesIO()
save_native(epoch, buf)
print(f"\nnative format: {len(buf.getvalue())} bytes, magic {buf.getvalue()[:4]!r}")
reloaded = load_native(io.BytesIO(buf.getvalue()), Epoch(1800))
print("native round-trip bit-exact:", reloaded.matrix.tobytes() == epoch.matrix.tobytes())

# --- cleaning: drop the all-zero rows, keep everything else bit-for-bit ----

cleaned, removed = drop_zero_rows(epoch)
print(f"\ncleaning removed {removed} zero rows -> {cleaned.vocab.words}")
print("steam vector survives unchanged:",
      np.array_equal(vector_of(cleaned, "steam"), vector_of(epoch, "steam")))

# --- per-epoch statistics (the external plotting feed) ----------------------

series = EmbeddingSeries([cleaned])
print("\nvocabulary statistics as CSV:")
emit_vocab_stats(vocab_stats(series), "csv", sys.stdout)
