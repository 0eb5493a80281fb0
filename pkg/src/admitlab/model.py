"""Domain types: scenarios, feature sets, policies, and their validation.

Conventions baked in here and relied on everywhere else:
  * exactly two groups, A and B; B has population share pi;
  * feature indices are 1-based and the droppable "test" is always the
    last index K, so the subset feature set is {1, ..., K-1};
  * access rates gamma gate only the test: a student without access
    cannot apply under a policy whose feature set contains K.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Optional, Sequence, Tuple


class Group(Enum):
    A = "A"
    B = "B"

    @property
    def other(self) -> "Group":
        return Group.B if self is Group.A else Group.A


class Estimation(Enum):
    GROUP_AWARE = "aware"
    GROUP_UNAWARE = "unaware"


@dataclass(frozen=True)
class FeatureNoise:
    """Per-feature noise law for one group: epsilon ~ N(bias, variance)."""

    bias: float
    variance: float

    @property
    def precision(self) -> float:
        return 1.0 / self.variance


@dataclass(frozen=True)
class GroupParams:
    """One group's feature noise laws plus its test-access rate gamma."""

    noises: Tuple[FeatureNoise, ...]
    access: float = 1.0

    def __init__(self, noises: Iterable[FeatureNoise], access: float = 1.0):
        object.__setattr__(self, "noises", tuple(noises))
        object.__setattr__(self, "access", float(access))


@dataclass(frozen=True)
class Scenario:
    """Full model parameterization.

    prior_mean / prior_variance: the common skill law N(mu, sigma^2);
    group_b_share: pi; capacity: C; params_a / params_b: per-group
    feature noise and access.
    """

    prior_mean: float
    prior_variance: float
    group_b_share: float
    capacity: float
    params_a: GroupParams
    params_b: GroupParams

    @property
    def n_features(self) -> int:
        return len(self.params_a.noises)

    @property
    def prior_sd(self) -> float:
        return math.sqrt(self.prior_variance)

    @property
    def prior_precision(self) -> float:
        return 1.0 / self.prior_variance

    def params(self, group: Group) -> GroupParams:
        return self.params_a if group is Group.A else self.params_b

    def share(self, group: Group) -> float:
        return self.group_b_share if group is Group.B else 1.0 - self.group_b_share

    def access(self, group: Group) -> float:
        return self.params(group).access


@dataclass(frozen=True)
class FeatureSet:
    """Which feature indices (1-based) a policy observes.

    ``full()`` is {1..K}, ``subset()`` drops the test {1..K-1},
    ``of(...)`` is an explicit index set, and ``empty()`` is allowed
    only for trivial-estimation checks (threshold solvers reject it).
    """

    kind: str
    indices: Optional[Tuple[int, ...]] = None

    _FULL = "full"
    _SUBSET = "subset"
    _EXPLICIT = "explicit"
    _EMPTY = "empty"

    @classmethod
    def full(cls) -> "FeatureSet":
        return cls(cls._FULL)

    @classmethod
    def subset(cls) -> "FeatureSet":
        return cls(cls._SUBSET)

    @classmethod
    def of(cls, *indices: int) -> "FeatureSet":
        if not indices:
            raise ValueError("explicit feature set must be non-empty; use empty()")
        idx = tuple(sorted(set(int(i) for i in indices)))
        if idx[0] < 1:
            raise ValueError(f"feature indices are 1-based, got {indices}")
        return cls(cls._EXPLICIT, idx)

    @classmethod
    def empty(cls) -> "FeatureSet":
        return cls(cls._EMPTY)

    def resolve(self, n_features: int) -> Tuple[int, ...]:
        """Concrete 1-based indices for a scenario with K = n_features."""
        if self.kind == self._FULL:
            return tuple(range(1, n_features + 1))
        if self.kind == self._SUBSET:
            if n_features < 2:
                raise ValueError("subset feature set requires K >= 2")
            return tuple(range(1, n_features))
        if self.kind == self._EMPTY:
            return ()
        assert self.indices is not None
        if self.indices[-1] > n_features:
            raise ValueError(
                f"feature index {self.indices[-1]} out of range for K={n_features}")
        return self.indices

    def includes_test(self, n_features: int) -> bool:
        return n_features in self.resolve(n_features)

    def is_empty(self) -> bool:
        return self.kind == self._EMPTY

    def label(self) -> str:
        if self.kind == self._EXPLICIT:
            return ",".join(str(i) for i in self.indices)
        return self.kind


@dataclass(frozen=True)
class Policy:
    """Feature requirement plus optional affirmative action and estimation mode."""

    features: FeatureSet
    aa_target: Optional[float] = None
    estimation: Estimation = Estimation.GROUP_AWARE


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str) -> None:
        self.violations.append(message)

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(self.violations)


def total_precision(scenario: Scenario, group: Group, features: FeatureSet) -> float:
    """Sum of feature precisions sigma_gk^-2 over the feature set."""
    noises = scenario.params(group).noises
    return sum(noises[i - 1].precision for i in features.resolve(scenario.n_features))


def validate(scenario: Scenario, policy: Optional[Policy] = None) -> ValidationReport:
    """Report every violated standing assumption; never raises."""
    report = ValidationReport()

    if not scenario.prior_variance > 0.0:
        report.add(f"prior variance must be positive, got {scenario.prior_variance}")
    for group in Group:
        for k, noise in enumerate(scenario.params(group).noises, start=1):
            if not noise.variance > 0.0:
                report.add(
                    f"feature {k} variance for group {group.value} must be "
                    f"strictly positive, got {noise.variance}")
    if len(scenario.params_a.noises) != len(scenario.params_b.noises):
        report.add("groups must have the same number of features")
    if scenario.n_features < 1:
        report.add("at least one feature is required")
    if not 0.0 < scenario.group_b_share < 1.0:
        report.add(f"group B share must lie in (0,1), got {scenario.group_b_share}")
    for group in Group:
        gamma = scenario.access(group)
        if not 0.0 <= gamma <= 1.0:
            report.add(f"access rate for group {group.value} must lie in [0,1], "
                       f"got {gamma}")

    pi = scenario.group_b_share
    c = scenario.capacity
    if not 0.0 < c < 0.5:
        report.add(f"selectivity violated: capacity must lie in (0, 0.5), got {c}")
    supply = (1.0 - pi) * scenario.params_a.access + pi * scenario.params_b.access
    if not c < supply:
        report.add(f"over-demand violated: capacity {c} >= accessible mass {supply}")

    if policy is not None and policy.aa_target is not None:
        tau = policy.aa_target
        if not 0.0 < tau < 1.0:
            report.add(f"AA target must lie in (0,1), got {tau}")
        else:
            need_a = 2.0 * (1.0 - tau) * c / (1.0 - pi)
            need_b = 2.0 * tau * c / pi
            if scenario.params_a.access < need_a:
                report.add(f"AA infeasible: gamma_A={scenario.params_a.access} "
                           f"< {need_a:.6g} required for target {tau}")
            if scenario.params_b.access < need_b:
                report.add(f"AA infeasible: gamma_B={scenario.params_b.access} "
                           f"< {need_b:.6g} required for target {tau}")
    return report


# --- JSON schema ---------------------------------------------------------
#
# {"prior": {"mean": m, "variance": v}, "pi": p, "capacity": c,
#  "groups": {"A": {"access": g, "features": [{"bias": b, "variance": v}, ...]},
#             "B": {...}},
#  "policy": {"features": "full"|"subset"|"empty"|[i, ...],
#             "aa_target": t|null, "estimation": "aware"|"unaware"}}
#
# The "policy" block is optional on input and omitted by scenario_to_dict.


def scenario_to_dict(scenario: Scenario) -> dict:
    def group_block(params: GroupParams) -> dict:
        return {
            "access": params.access,
            "features": [{"bias": n.bias, "variance": n.variance}
                         for n in params.noises],
        }

    return {
        "prior": {"mean": scenario.prior_mean, "variance": scenario.prior_variance},
        "pi": scenario.group_b_share,
        "capacity": scenario.capacity,
        "groups": {"A": group_block(scenario.params_a),
                   "B": group_block(scenario.params_b)},
    }


def scenario_from_dict(data: dict) -> Scenario:
    try:
        prior = data["prior"]
        groups = data["groups"]

        def group_params(block: dict) -> GroupParams:
            noises = tuple(FeatureNoise(float(f["bias"]), float(f["variance"]))
                           for f in block["features"])
            return GroupParams(noises, float(block.get("access", 1.0)))

        return Scenario(
            prior_mean=float(prior["mean"]),
            prior_variance=float(prior["variance"]),
            group_b_share=float(data["pi"]),
            capacity=float(data["capacity"]),
            params_a=group_params(groups["A"]),
            params_b=group_params(groups["B"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed scenario JSON: {exc}") from exc


def policy_to_dict(policy: Policy) -> dict:
    if policy.features.kind == FeatureSet._EXPLICIT:
        features: Any = list(policy.features.indices)
    else:
        features = policy.features.kind
    return {
        "features": features,
        "aa_target": policy.aa_target,
        "estimation": policy.estimation.value,
    }


def policy_from_dict(data: dict) -> Policy:
    raw = data.get("features", "full")
    if isinstance(raw, str):
        try:
            features = {
                "full": FeatureSet.full(),
                "subset": FeatureSet.subset(),
                "empty": FeatureSet.empty(),
            }[raw]
        except KeyError as exc:
            raise ValueError(f"unknown feature set {raw!r}") from exc
    else:
        features = FeatureSet.of(*raw)
    aa = data.get("aa_target")
    estimation = Estimation(data.get("estimation", "aware"))
    return Policy(features=features,
                  aa_target=None if aa is None else float(aa),
                  estimation=estimation)


def scenario_to_json(scenario: Scenario, policy: Optional[Policy] = None) -> str:
    payload = scenario_to_dict(scenario)
    if policy is not None:
        payload["policy"] = policy_to_dict(policy)
    return json.dumps(payload, sort_keys=True)


def scenario_from_json(text: str) -> Tuple[Scenario, Optional[Policy]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed scenario JSON: {exc}") from exc
    scenario = scenario_from_dict(data)
    policy = policy_from_dict(data["policy"]) if "policy" in data else None
    return scenario, policy


def scenario_hash(scenario: Scenario) -> str:
    """Stable content hash used by the CLI run manifest."""
    canonical = json.dumps(scenario_to_dict(scenario), sort_keys=True,
                           separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]
