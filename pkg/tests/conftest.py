import numpy as np
import pytest

from diachron import Epoch, EpochEmbedding, Pcg32, Vocabulary


def make_embedding(words, rows, year=1800):
    return EpochEmbedding(
        Epoch(year), Vocabulary(words), np.asarray(rows, dtype=np.float32)
    )


def random_embedding(seed, n_words, dim, year=1800, scale=1.0):
    """Seeded random embedding; full-entropy float32 values."""
    g = Pcg32(seed, stream=99)
    m = (g.normals(n_words * dim).reshape(n_words, dim) * scale).astype(np.float32)
    words = [f"w{i}" for i in range(n_words)]
    return make_embedding(words, m, year)


@pytest.fixture
def tiny_embedding():
    return make_embedding(["a", "b"], [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
