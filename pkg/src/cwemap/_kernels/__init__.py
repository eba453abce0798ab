"""Hot scoring loops: compiled extension when built, numpy fallback otherwise.

Routing follows benchmarks/bench_kernels.py: the compiled BM25 loop beats
numpy broadcasting, while the cosine kernels are dense dot products where
BLAS wins at realistic embedding dims, so those always use the numpy path.
Set CWEMAP_PURE_PYTHON=1 to force the fallback everywhere.
"""

import os

from . import _pure

if os.environ.get("CWEMAP_PURE_PYTHON"):
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

bm25_scores = _impl.bm25_scores
max_cosine = _pure.max_cosine
mean_cosine = _pure.mean_cosine

__all__ = ["bm25_scores", "max_cosine", "mean_cosine", "BACKEND"]
