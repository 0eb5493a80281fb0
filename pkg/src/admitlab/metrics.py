"""Closed-form evaluation of the three admission metrics.

Academic merit uses the identity E[q | admitted, g] = E[qt | admitted, g]
(true skill conditional on the estimate is centered at the estimate), so
each group's merit is the truncated mean of its estimate law above the
group-relevant threshold.  Admission probabilities condition on having
access: under a test-requiring policy they describe students who can
apply, matching the conditional Monte Carlo gap estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from admitlab import statfns
from admitlab.estimation import estimate_law
from admitlab.model import (
    Estimation,
    FeatureSet,
    Group,
    Policy,
    Scenario,
    total_precision,
)
from admitlab.selection import (
    Thresholds,
    ThresholdMode,
    effective_access,
    threshold_no_barriers,
    threshold_with_barriers,
    thresholds_affirmative_action,
)


@dataclass(frozen=True)
class PolicyOutcome:
    thresholds: Thresholds
    merit_overall: float
    merit_by_group: Tuple[float, float]
    diversity: float
    admitted_mass: float
    mode: ThresholdMode

    def to_dict(self) -> dict:
        if self.thresholds.common is not None:
            thr = {"common": self.thresholds.common}
        else:
            thr = {"A": self.thresholds.per_group[0],
                   "B": self.thresholds.per_group[1]}
        return {
            "thresholds": thr,
            "merit": {"overall": self.merit_overall,
                      "A": self.merit_by_group[0],
                      "B": self.merit_by_group[1]},
            "diversity": self.diversity,
            "admitted_mass": self.admitted_mass,
            "mode": self.mode.value,
        }


def compute_thresholds(scenario: Scenario, policy: Policy,
                       mode: ThresholdMode) -> Thresholds:
    """Thresholds for an analytic (group-aware) policy, barrier-aware."""
    if policy.estimation is not Estimation.GROUP_AWARE:
        raise ValueError("closed-form thresholds exist only for group-aware "
                         "estimation; evaluate unaware policies by Monte Carlo")
    if policy.aa_target is not None:
        return thresholds_affirmative_action(scenario, policy.features,
                                             policy.aa_target)
    if policy.features.includes_test(scenario.n_features):
        return threshold_with_barriers(scenario, mode, policy.features)
    return threshold_no_barriers(scenario, policy.features, mode)


def group_admitted_mass(scenario: Scenario, policy: Policy,
                        thresholds: Thresholds, group: Group) -> float:
    """Population mass of group g admitted: pi_g gamma_g (1 - F_g(t_g))."""
    law = estimate_law(scenario, group, policy.features)
    gamma = effective_access(scenario, group, policy.features)
    t = thresholds.for_group(group)
    if law.variance > 0.0:
        tail = statfns.survival((t - law.mean) / law.sd)
    else:
        tail = 1.0 if t <= law.mean else 0.0
    return scenario.share(group) * gamma * tail


def admitted_mass(scenario: Scenario, policy: Policy,
                  thresholds: Thresholds) -> float:
    return (group_admitted_mass(scenario, policy, thresholds, Group.A)
            + group_admitted_mass(scenario, policy, thresholds, Group.B))


def diversity(scenario: Scenario, policy: Policy,
              thresholds: Thresholds) -> float:
    """Group-B share of the admitted class: pi gamma_B (1 - F_B(t_B)) / C."""
    return (group_admitted_mass(scenario, policy, thresholds, Group.B)
            / scenario.capacity)


def merit_group(scenario: Scenario, policy: Policy, thresholds: Thresholds,
                group: Group) -> float:
    """Expected true skill of admitted group-g students."""
    law = estimate_law(scenario, group, policy.features)
    if law.variance == 0.0:
        return law.mean
    return statfns.truncated_mean_above(law.mean, law.sd,
                                        thresholds.for_group(group))


def merit_overall(scenario: Scenario, policy: Policy,
                  thresholds: Thresholds) -> float:
    """Diversity-weighted average of the group merits."""
    tau = diversity(scenario, policy, thresholds)
    return ((1.0 - tau) * merit_group(scenario, policy, thresholds, Group.A)
            + tau * merit_group(scenario, policy, thresholds, Group.B))


def admission_probability(scenario: Scenario, policy: Policy,
                          thresholds: Thresholds, group: Group,
                          q: float) -> float:
    """P(admitted | true skill q, group g, can apply).

    The estimate given q is Gaussian with mean
    (mu sigma^-2 + q P) / (sigma^-2 + P) and sd sqrt(P) / (sigma^-2 + P),
    so the probability is the upper tail at the group threshold.
    """
    p = total_precision(scenario, group, policy.features)
    if p == 0.0:
        return 1.0 if scenario.prior_mean >= thresholds.for_group(group) else 0.0
    prior_prec = scenario.prior_precision
    post_prec = prior_prec + p
    t = thresholds.for_group(group)
    z = (post_prec / math.sqrt(p)) * (
        t - (scenario.prior_mean * prior_prec + q * p) / post_prec)
    return statfns.survival(z)


def individual_fairness_gap(scenario: Scenario, policy: Policy,
                            thresholds: Thresholds, q: float) -> float:
    """Admission-probability gap between same-skilled A and B students."""
    return (admission_probability(scenario, policy, thresholds, Group.A, q)
            - admission_probability(scenario, policy, thresholds, Group.B, q))


def evaluate(scenario: Scenario, policy: Policy,
             mode: ThresholdMode = ThresholdMode.EXACT_MIXTURE) -> PolicyOutcome:
    """Full closed-form outcome for an analytic policy."""
    thresholds = compute_thresholds(scenario, policy, mode)
    return PolicyOutcome(
        thresholds=thresholds,
        merit_overall=merit_overall(scenario, policy, thresholds),
        merit_by_group=(merit_group(scenario, policy, thresholds, Group.A),
                        merit_group(scenario, policy, thresholds, Group.B)),
        diversity=diversity(scenario, policy, thresholds),
        admitted_mass=admitted_mass(scenario, policy, thresholds),
        mode=mode,
    )
