"""Exact post-selection inference for lasso-selected linear models.

The heavy lifting lives in the compiled extension `_selinf`: a coordinate
descent lasso/elastic-net solver with KKT certification, the polyhedral
representation of the selection event, numerically stable truncated-Gaussian
pivots, and the interval-inversion pipeline.
"""

try:
    from ._selinf import (  # type: ignore[attr-defined]
        SelinfError,
        __version__,
        build_polyhedron,
        data_split_baseline,
        estimate_sigma,
        infer,
        kkt_check,
        run_coverage,
        select_lambda,
        solve_lasso,
        tn_cdf,
        tn_interval_bounds,
        tn_pivot,
    )
except ImportError:  # running from a build tree, extension beside the package
    from _selinf import (  # type: ignore[no-redef]
        SelinfError,
        __version__,
        build_polyhedron,
        data_split_baseline,
        estimate_sigma,
        infer,
        kkt_check,
        run_coverage,
        select_lambda,
        solve_lasso,
        tn_cdf,
        tn_interval_bounds,
        tn_pivot,
    )

__all__ = [
    "SelinfError",
    "__version__",
    "build_polyhedron",
    "data_split_baseline",
    "estimate_sigma",
    "infer",
    "kkt_check",
    "run_coverage",
    "select_lambda",
    "solve_lasso",
    "tn_cdf",
    "tn_interval_bounds",
    "tn_pivot",
]
