"""igt-lab: unsupervised graph node representations with verified concentration behavior.

The package builds interferometric graph transform (IGT) features --- a cascade of
graph low/high-frequency splits, learned norm-bounded linear maps and pointwise
absolute values --- together with the expected-IGT reference representation, a
stochastic block model sampler, an empirical verification harness for the
concentration bounds the construction satisfies, and CLI drivers for synthetic
and citation-network community-labeling experiments.
"""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    DataError,
    IgtLabError,
    NonFiniteError,
    ShapeError,
)

__all__ = [
    "__version__",
    "IgtLabError",
    "ShapeError",
    "NonFiniteError",
    "ConvergenceError",
    "DataError",
]
