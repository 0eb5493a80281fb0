"""Capacity-constrained selection with noisy features and unequal access.

Closed-form admission thresholds and fairness metrics for a two-group
Bayesian selection model, theorem-constant evaluation, Monte Carlo
verification, a multi-school matching extension, and a calibrated
CSV-based simulation pipeline.
"""

from admitlab.model import (
    Estimation,
    FeatureNoise,
    FeatureSet,
    Group,
    GroupParams,
    Policy,
    Scenario,
)

__version__ = "0.1.0"

__all__ = [
    "Estimation",
    "FeatureNoise",
    "FeatureSet",
    "Group",
    "GroupParams",
    "Policy",
    "Scenario",
    "__version__",
]
