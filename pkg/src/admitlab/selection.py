"""Admission-threshold solvers for every analytic policy variant.

Two threshold semantics are provided and kept deliberately distinct:

  * EXACT_MIXTURE solves the defining capacity equation on the actual
    two-group mixture of estimate laws by root finding.  Admitted mass
    equals capacity to the solver tolerance.
  * PAPER_CLOSED_FORM standardizes the mixture by its pooled variance
    and inverts a single Gaussian.  This is only exact when the two
    shrinkages coincide; it is what the theorem constants are derived
    from, so it is reproduced faithfully rather than silently replaced.

Access rates gate the test feature only: under a feature set that does
not include the test, both groups participate in full (gamma = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from admitlab import statfns
from admitlab.estimation import estimate_law
from admitlab.model import FeatureSet, Group, Scenario


class ThresholdMode(Enum):
    PAPER_CLOSED_FORM = "paper"
    EXACT_MIXTURE = "exact"


class DegenerateFeatureSetError(ValueError):
    """Raised when a threshold is requested for the empty feature set."""


class InfeasibleTargetError(ValueError):
    """Raised when an affirmative-action target cannot be met."""


@dataclass(frozen=True)
class Thresholds:
    """Either one common threshold or a per-group (A, B) pair."""

    common: Optional[float] = None
    per_group: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if (self.common is None) == (self.per_group is None):
            raise ValueError("exactly one of common/per_group must be set")

    def for_group(self, group: Group) -> float:
        if self.common is not None:
            return self.common
        return self.per_group[0] if group is Group.A else self.per_group[1]


def effective_access(scenario: Scenario, group: Group,
                     features: FeatureSet) -> float:
    """Applicant share of a group: gamma if the set needs the test, else 1."""
    if features.includes_test(scenario.n_features):
        return scenario.access(group)
    return 1.0


def _laws(scenario: Scenario, features: FeatureSet):
    if features.is_empty():
        raise DegenerateFeatureSetError(
            "threshold solvers reject the empty feature set: every estimate "
            "equals the prior mean and admission becomes a measure-zero tie")
    return (estimate_law(scenario, Group.A, features),
            estimate_law(scenario, Group.B, features))


def _bracket(scenario: Scenario) -> Tuple[float, float]:
    # Estimate laws have variance at most sigma^2, so 12 prior sds cover
    # any capacity in (0, 0.5) with margin.
    half = 12.0 * scenario.prior_sd
    return scenario.prior_mean - half, scenario.prior_mean + half


def _mixture_root(scenario: Scenario, weights: Tuple[float, float],
                  laws, target_admitted: float) -> float:
    """Threshold t with w_A (1-F_A(t)) + w_B (1-F_B(t)) = target_admitted."""
    law_a, law_b = laws
    w_a, w_b = weights

    def admitted_deficit(t: float) -> float:
        mass = 0.0
        for w, law in ((w_a, law_a), (w_b, law_b)):
            if law.variance > 0.0:
                mass += w * statfns.survival((t - law.mean) / law.sd)
            elif t <= law.mean:
                mass += w
        return target_admitted - mass

    lo, hi = _bracket(scenario)
    return statfns.solve_monotone_root(admitted_deficit, lo, hi, tol=1e-14)


def threshold_no_barriers(scenario: Scenario, features: FeatureSet,
                          mode: ThresholdMode) -> Thresholds:
    """Common threshold with full participation by both groups."""
    law_a, law_b = _laws(scenario, features)
    pi = scenario.group_b_share
    c = scenario.capacity
    if mode is ThresholdMode.PAPER_CLOSED_FORM:
        pooled_var = (1.0 - pi) * law_a.variance + pi * law_b.variance
        t = scenario.prior_mean + statfns.quantile(1.0 - c) * math.sqrt(pooled_var)
        return Thresholds(common=t)
    t = _mixture_root(scenario, (1.0 - pi, pi), (law_a, law_b), c)
    return Thresholds(common=t)


def threshold_with_barriers(scenario: Scenario, mode: ThresholdMode,
                            features: Optional[FeatureSet] = None) -> Thresholds:
    """Common threshold when test access scales the applicant pools.

    Defaults to the full feature set (the only set where barriers bind);
    reduces to threshold_no_barriers when both access rates are 1.
    """
    if features is None:
        features = FeatureSet.full()
    law_a, law_b = _laws(scenario, features)
    pi = scenario.group_b_share
    c = scenario.capacity
    g_a = effective_access(scenario, Group.A, features)
    g_b = effective_access(scenario, Group.B, features)
    pool = (1.0 - pi) * g_a + pi * g_b
    if not c < pool:
        raise ValueError(
            f"over-demand violated: capacity {c} >= accessible mass {pool}")
    if mode is ThresholdMode.PAPER_CLOSED_FORM:
        pooled_var = ((1.0 - pi) * g_a * law_a.variance
                      + pi * g_b * law_b.variance) / pool
        t = (scenario.prior_mean
             + statfns.quantile(1.0 - c / pool) * math.sqrt(pooled_var))
        return Thresholds(common=t)
    t = _mixture_root(scenario, ((1.0 - pi) * g_a, pi * g_b), (law_a, law_b), c)
    return Thresholds(common=t)


def thresholds_affirmative_action(scenario: Scenario, features: FeatureSet,
                                  tau: float) -> Thresholds:
    """Per-group thresholds enforcing an admitted group-B share of exactly tau.

    Group quantiles are exact Gaussian inversions, so both modes coincide:
        t_A = F_A^-1(1 - (1-tau) C / ((1-pi) gamma_A)),
        t_B = F_B^-1(1 - tau C / (pi gamma_B)).
    """
    law_a, law_b = _laws(scenario, features)
    pi = scenario.group_b_share
    c = scenario.capacity
    g_a = effective_access(scenario, Group.A, features)
    g_b = effective_access(scenario, Group.B, features)

    share_a = (1.0 - tau) * c / ((1.0 - pi) * g_a)
    share_b = tau * c / (pi * g_b)
    if not 0.0 < share_a < 1.0 or not 0.0 < share_b < 1.0:
        raise InfeasibleTargetError(
            f"AA target {tau} infeasible: group admission shares "
            f"({share_a:.4g}, {share_b:.4g}) must lie in (0, 1)")
    if share_a > 0.5 or share_b > 0.5:
        raise InfeasibleTargetError(
            f"AA target {tau} violates selectivity: a group threshold would "
            f"fall below the prior mean (shares {share_a:.4g}, {share_b:.4g})")

    t_a = scenario.prior_mean + law_a.sd * statfns.quantile(1.0 - share_a)
    t_b = scenario.prior_mean + law_b.sd * statfns.quantile(1.0 - share_b)
    return Thresholds(per_group=(t_a, t_b))


def admit(q_tilde: float, group: Group, thresholds: Thresholds) -> bool:
    """Tie-inclusive admission rule: estimates at the threshold are admitted."""
    return q_tilde >= thresholds.for_group(group)
