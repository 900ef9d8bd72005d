"""Network-flow classification toolkit.

Ingest flow CSVs, explore and encode them, balance the training split,
train four from-scratch classifier families, and compare them through a
staged, manifest-tracked pipeline with an HTML report. All randomness
derives from a single seed through named xorshift64* streams.
"""

from . import eda, errors, flowdata, learners, metrics, pipeline, rng, sampling, svgchart

__version__ = "0.1.0"

__all__ = [
    "eda",
    "errors",
    "flowdata",
    "learners",
    "metrics",
    "pipeline",
    "rng",
    "sampling",
    "svgchart",
    "__version__",
]
