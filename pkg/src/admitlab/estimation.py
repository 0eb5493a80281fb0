"""Bayesian skill estimation: conjugate posteriors and the unaware mixture.

Group-aware case.  With prior q ~ N(mu, sigma^2) and debiased feature
observations theta_k - mu_gk ~ N(q, sigma_gk^2), conjugacy gives

    q | theta, g  ~  N(qt, st2),
    qt  = (mu sigma^-2 + sum_k (theta_k - mu_gk) sigma_gk^-2) / (sigma^-2 + P),
    st2 = 1 / (sigma^-2 + P),          P = sum_k sigma_gk^-2.

Marginalizing theta yields the estimate law  qt | g ~ N(mu, sigma^2 v)
with shrinkage v = P / (sigma^-2 + P), and conditioning the other way
gives  qt | q, g ~ N((mu sigma^-2 + q P) / (sigma^-2 + P), P / (sigma^-2 + P)^2)
and  q | qt, g ~ N(qt, 1 / (sigma^-2 + P)).

Group-unaware case.  Without the group label the posterior is the
two-component mixture  sum_g w(theta, g) N(qt_g, st2_g)  with weights
w(theta, g) proportional to P(g) f(theta | g).  The marginal likelihood
f(theta | g) is evaluated in closed form (complete the square once) and
the weights are normalized in log space, so the normalizing prefactors
printed alongside the mixture derivation never enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from admitlab.model import FeatureSet, Group, Scenario, total_precision

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class PosteriorPoint:
    mean: float
    variance: float


@dataclass(frozen=True)
class EstimateLaw:
    """Law of skill estimates for one group: N(mean, variance), variance = sigma^2 * shrinkage."""

    mean: float
    variance: float
    shrinkage: float

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class EstimateGivenSkillLaw:
    mean: float
    variance: float

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class UnawareWeights:
    w_a: float
    w_b: float


def _noise_arrays(scenario: Scenario, group: Group,
                  features: FeatureSet) -> Tuple[np.ndarray, np.ndarray]:
    noises = scenario.params(group).noises
    idx = features.resolve(scenario.n_features)
    bias = np.array([noises[i - 1].bias for i in idx], dtype=float)
    var = np.array([noises[i - 1].variance for i in idx], dtype=float)
    return bias, var


def posterior(scenario: Scenario, group: Group, features: FeatureSet,
              theta: Sequence[float]) -> PosteriorPoint:
    """Posterior law of q given observed features theta (group-aware)."""
    bias, var = _noise_arrays(scenario, group, features)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != bias.shape:
        raise ValueError(
            f"theta has {theta.shape[0] if theta.ndim else 0} entries, "
            f"feature set needs {bias.shape[0]}")
    prior_prec = scenario.prior_precision
    post_prec = prior_prec + np.sum(1.0 / var)
    mean = (scenario.prior_mean * prior_prec
            + np.sum((theta - bias) / var)) / post_prec
    return PosteriorPoint(float(mean), 1.0 / float(post_prec))


def posterior_means(scenario: Scenario, group: Group, features: FeatureSet,
                    theta: np.ndarray) -> np.ndarray:
    """Vectorized posterior means for an (n, |S|) matrix of feature values."""
    bias, var = _noise_arrays(scenario, group, features)
    theta = np.asarray(theta, dtype=float)
    prior_prec = scenario.prior_precision
    post_prec = prior_prec + np.sum(1.0 / var)
    return (scenario.prior_mean * prior_prec
            + (theta - bias) @ (1.0 / var)) / post_prec


def estimate_law(scenario: Scenario, group: Group,
                 features: FeatureSet) -> EstimateLaw:
    """Marginal law of the skill estimate for a group under a feature set."""
    p = total_precision(scenario, group, features)
    shrink = p / (scenario.prior_precision + p)
    return EstimateLaw(mean=scenario.prior_mean,
                       variance=scenario.prior_variance * shrink,
                       shrinkage=shrink)


def estimate_given_skill(scenario: Scenario, group: Group, features: FeatureSet,
                         q: float) -> EstimateGivenSkillLaw:
    """Law of the skill estimate conditional on true skill q."""
    p = total_precision(scenario, group, features)
    prior_prec = scenario.prior_precision
    post_prec = prior_prec + p
    return EstimateGivenSkillLaw(
        mean=(scenario.prior_mean * prior_prec + q * p) / post_prec,
        variance=p / post_prec ** 2)


def skill_given_estimate(scenario: Scenario, group: Group, features: FeatureSet,
                         q_tilde: float) -> PosteriorPoint:
    """Law of true skill conditional on the estimate: N(q_tilde, 1/(sigma^-2 + P))."""
    p = total_precision(scenario, group, features)
    return PosteriorPoint(mean=q_tilde,
                          variance=1.0 / (scenario.prior_precision + p))


def _log_marginal_likelihood(scenario: Scenario, group: Group,
                             features: FeatureSet,
                             theta: np.ndarray) -> np.ndarray:
    """log f(theta | g) for each row of theta, via the conjugate identity.

    With z_k = theta_k - mu_gk and posterior precision T = sigma^-2 + P:
        log f = -(1/2) [ sum_k log(2 pi sigma_gk^2) + log(sigma^2 T) + E ],
        E = mu^2 sigma^-2 + sum_k z_k^2 sigma_gk^-2 - qt^2 T.
    """
    bias, var = _noise_arrays(scenario, group, features)
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    prec = 1.0 / var
    prior_prec = scenario.prior_precision
    post_prec = prior_prec + np.sum(prec)
    z = theta - bias
    qt = (scenario.prior_mean * prior_prec + z @ prec) / post_prec
    quad = (scenario.prior_mean ** 2 * prior_prec
            + (z * z) @ prec - qt * qt * post_prec)
    log_norm = (np.sum(np.log(2.0 * math.pi * var))
                + math.log(scenario.prior_variance * post_prec))
    return -0.5 * (log_norm + quad)


def unaware_log_weights(scenario: Scenario, features: FeatureSet,
                        theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Normalized log mixture weights (log w_A, log w_B) per row of theta."""
    pi = scenario.group_b_share
    la = math.log(1.0 - pi) + _log_marginal_likelihood(
        scenario, Group.A, features, theta)
    lb = math.log(pi) + _log_marginal_likelihood(
        scenario, Group.B, features, theta)
    top = np.maximum(la, lb)
    norm = top + np.log(np.exp(la - top) + np.exp(lb - top))
    return la - norm, lb - norm


def unaware_weights(scenario: Scenario, features: FeatureSet,
                    theta: Sequence[float]) -> UnawareWeights:
    """Posterior group weights w(theta, g) for a single feature vector."""
    la, lb = unaware_log_weights(scenario, features,
                                 np.asarray(theta, dtype=float))
    return UnawareWeights(w_a=float(np.exp(la[0])), w_b=float(np.exp(lb[0])))


def unaware_posterior_means(scenario: Scenario, features: FeatureSet,
                            theta: np.ndarray) -> np.ndarray:
    """Vectorized mixture posterior means, one per row of theta."""
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    la, lb = unaware_log_weights(scenario, features, theta)
    mean_a = posterior_means(scenario, Group.A, features, theta)
    mean_b = posterior_means(scenario, Group.B, features, theta)
    return np.exp(la) * mean_a + np.exp(lb) * mean_b


def unaware_posterior_mean(scenario: Scenario, features: FeatureSet,
                           theta: Sequence[float]) -> float:
    """Mixture posterior mean of q given features but not the group label."""
    return float(unaware_posterior_means(
        scenario, features, np.asarray(theta, dtype=float))[0])
