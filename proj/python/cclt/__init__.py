"""Exchangeable-pair models, conditional moments and Wasserstein bounds.

The heavy lifting lives in the compiled extension; this package re-exports
the main operations.
"""

from ._cclt import (  # noqa: F401
    Model,
    bound,
    bound_t11,
    bound_t13,
    conditioned_distance,
    ext_n,
    holder_bound,
    llt_ratio_bound,
    make_model,
    pattern01_conditional_mean,
    rate_regression,
    residual_summary,
    sample_conditional,
    sliced_w1_to_std_normal,
    stein_constants,
    subgraph_decomposition,
    w1_to_std_normal,
)

__all__ = [
    "Model",
    "bound",
    "bound_t11",
    "bound_t13",
    "conditioned_distance",
    "ext_n",
    "holder_bound",
    "llt_ratio_bound",
    "make_model",
    "pattern01_conditional_mean",
    "rate_regression",
    "residual_summary",
    "sample_conditional",
    "sliced_w1_to_std_normal",
    "stein_constants",
    "subgraph_decomposition",
    "w1_to_std_normal",
]
