"""Hot kernels: hyper-geometric tails and sorted tid-list intersection.

The compiled extension is used when it was built; otherwise the pure-Python
module with the same functions is loaded. Set ``RULELAB_PURE_PYTHON=1`` to
force the fallback.
"""

import os

_names = (
    "hyper_pmf", "hyper_cdf", "hyper_sf", "hyper_quantile",
    "batch_pmf", "batch_cdf", "batch_sf", "batch_quantile",
    "intersect", "intersect_count",
)

from . import _pykernel as pure  # noqa: E402

compiled = None
if os.environ.get("RULELAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernel as compiled  # type: ignore[no-redef]
    except ImportError:
        compiled = None

backend = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"

hyper_pmf = backend.hyper_pmf
hyper_cdf = backend.hyper_cdf
hyper_sf = backend.hyper_sf
hyper_quantile = backend.hyper_quantile
batch_pmf = backend.batch_pmf
batch_cdf = backend.batch_cdf
batch_sf = backend.batch_sf
batch_quantile = backend.batch_quantile
intersect = backend.intersect
intersect_count = backend.intersect_count

__all__ = list(_names) + ["BACKEND", "backend", "pure", "compiled"]
