"""One-shot converter: per-decade npy matrix + pickled vocabulary -> text format.

The upstream historical-embeddings distribution ships each decade as
``<year>-w.npy`` (dense float matrix, one row per word) and
``<year>-vocab.pkl`` (pickled token list).  This package rewrites those pairs
into the line-oriented text interchange format the main toolkit consumes,
rendering every float as the shortest decimal that parses back to the exact
float32 bits.
"""

__version__ = "0.1.0"

from .convert import (
    ConvertError,
    UpstreamDecade,
    convert_all,
    convert_decade,
    find_decades,
)

__all__ = [
    "__version__",
    "ConvertError",
    "UpstreamDecade",
    "convert_decade",
    "convert_all",
    "find_decades",
]
