"""Diachronic word-embedding alignment and temporal-analogy queries.

The toolkit ingests one embedding space per epoch (decade), removes all-zero
rows, unit-normalizes, rotates every epoch into a chosen reference epoch with
an orthogonal least-squares fit, and answers onomasiological queries: which
words in a past epoch sit nearest a modern concept's vector.
"""

__version__ = "0.1.0"

from .errors import (
    DataError,
    NonUniqueRotationWarning,
    NumericalError,
    ParseError,
    ToolError,
    UsageError,
)
from .store import (
    EmbeddingSeries,
    Epoch,
    EpochEmbedding,
    Vocabulary,
    format_f32_shortest,
    load_embedding,
    load_native,
    load_series,
    load_text,
    read_manifest,
    save_embedding,
    save_native,
    save_text,
    vector_of,
    write_manifest,
)
from .preprocess import (
    VocabStats,
    drop_zero_rows,
    normalize_rows,
    paired_submatrices,
    shared_vocabulary,
    vocab_stats,
)
from .linalg import SvdResult, matmul_t, orthogonality_defect, svd
from .align import (
    AlignedSeries,
    RotationMatrix,
    align_series,
    apply_rotation,
    load_aligned,
    load_aligned_epoch,
    load_rotation,
    procrustes,
    save_aligned,
    save_rotation,
)
from .query import (
    AnalogyTable,
    Neighbor,
    cross_epoch_pair,
    similar_by_vector,
    temporal_analogues,
)
from .report import TableSpec, emit_analogy_table, emit_vocab_stats
from .synth import SynthPlan, gen_series, knn_oracle, load_plan, random_orthogonal, save_plan
from .prng import Pcg32

__all__ = [
    "__version__",
    "ToolError",
    "UsageError",
    "DataError",
    "ParseError",
    "NumericalError",
    "NonUniqueRotationWarning",
    "Epoch",
    "Vocabulary",
    "EpochEmbedding",
    "EmbeddingSeries",
    "format_f32_shortest",
    "load_text",
    "save_text",
    "load_native",
    "save_native",
    "load_embedding",
    "save_embedding",
    "load_series",
    "read_manifest",
    "write_manifest",
    "vector_of",
    "VocabStats",
    "drop_zero_rows",
    "normalize_rows",
    "shared_vocabulary",
    "paired_submatrices",
    "vocab_stats",
    "SvdResult",
    "matmul_t",
    "svd",
    "orthogonality_defect",
    "RotationMatrix",
    "AlignedSeries",
    "procrustes",
    "apply_rotation",
    "align_series",
    "save_aligned",
    "load_aligned",
    "load_aligned_epoch",
    "save_rotation",
    "load_rotation",
    "Neighbor",
    "AnalogyTable",
    "similar_by_vector",
    "temporal_analogues",
    "cross_epoch_pair",
    "TableSpec",
    "emit_analogy_table",
    "emit_vocab_stats",
    "SynthPlan",
    "random_orthogonal",
    "gen_series",
    "knn_oracle",
    "load_plan",
    "save_plan",
    "Pcg32",
]
