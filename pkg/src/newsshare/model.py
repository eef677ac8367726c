"""Logistic sharing-probability model for individual readers and populations.

A reader with political belief ``B`` shares an article with bias ``b`` and
truthfulness ``t`` with probability

    p = f / (1 + exp(-k * (t - (b - B)**2)))

where ``(f, k)`` is ``(f_left, k_left)`` for ``B < 0`` and
``(f_right, k_right)`` otherwise.  A population is a discrete distribution
over belief values and its sharing probability is the weighted sum of the
individual probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

GROUPS = (
    "extreme_left",
    "left",
    "lean_left",
    "center",
    "lean_right",
    "right",
    "extreme_right",
)

# Printed three-decimal values, not exact sevenths.
BELIEF_CENTERS = (-0.857, -0.571, -0.286, 0.0, 0.286, 0.571, 0.857)

WEIGHT_TOL = 1e-9

# Weight columns as printed; the empirical one sums to 0.999 from rounding.
PRINTED_WEIGHTS = {
    "empirical": (0.092, 0.230, 0.225, 0.184, 0.131, 0.091, 0.046),
    "partisan": (0.080, 0.400, 0.020, 0.0, 0.020, 0.400, 0.080),
    "hyperpartisan": (0.400, 0.080, 0.020, 0.0, 0.020, 0.080, 0.400),
    "left_unimodal": (0.200, 0.400, 0.200, 0.080, 0.060, 0.040, 0.020),
    "centrist_unimodal": (0.020, 0.080, 0.200, 0.400, 0.200, 0.080, 0.020),
    "right_unimodal": (0.020, 0.040, 0.060, 0.080, 0.200, 0.400, 0.200),
}

DISTRIBUTION_NAMES = tuple(PRINTED_WEIGHTS)


@dataclass(frozen=True)
class ModelParams:
    f_left: float
    k_left: float
    f_right: float
    k_right: float

    def __post_init__(self):
        for name in ("f_left", "f_right"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ValidationError(f"{name} must lie in (0, 1], got {v!r}")
        for name in ("k_left", "k_right"):
            v = getattr(self, name)
            if not (v > 0.0 and np.isfinite(v)):
                raise ValidationError(f"{name} must be a positive finite rate, got {v!r}")

    @classmethod
    def symmetric(cls, f: float, k: float) -> "ModelParams":
        return cls(f, k, f, k)

    @property
    def is_symmetric(self) -> bool:
        return self.f_left == self.f_right and self.k_left == self.k_right

    def branch(self, belief: float) -> tuple[float, float]:
        """(f, k) used for a reader at ``belief``; zero belongs to the right."""
        if belief < 0:
            return self.f_left, self.k_left
        return self.f_right, self.k_right

    def as_dict(self) -> dict:
        return {"fl": self.f_left, "kl": self.k_left, "fr": self.f_right, "kr": self.k_right}


# Fitted values used throughout the population analysis.
BASE_PARAMS = ModelParams(f_left=0.010, k_left=4.465, f_right=0.007, k_right=5.581)


@dataclass(frozen=True)
class Article:
    bias: float
    truth: float

    def __post_init__(self):
        check_bias(self.bias)
        check_truth(self.truth)

    @property
    def feasible(self) -> bool:
        return is_feasible(self.bias, self.truth)


def check_bias(b, name="bias"):
    b_arr = np.asarray(b, dtype=float)
    if not np.all((b_arr >= -1.0) & (b_arr <= 1.0)):
        raise ValidationError(f"{name} must lie in [-1, 1], got {b!r}")


def check_truth(t, name="truth"):
    t_arr = np.asarray(t, dtype=float)
    if not np.all((t_arr >= 0.0) & (t_arr <= 1.0)):
        raise ValidationError(f"{name} must lie in [0, 1], got {t!r}")


def check_belief(B, name="belief"):
    check_bias(B, name)


def is_feasible(bias, truth, tol=1e-12):
    """The bias/truth trade-off constraint ``|b| + t <= 1``."""
    return np.abs(bias) + truth <= 1.0 + tol


def _logistic(x):
    # Branch on sign so exp never overflows.
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sharing_probability_array(bias, truth, belief, params: ModelParams):
    """Vectorized sharing probability; inputs broadcast against each other.

    No range checks are done here, callers validate.
    """
    bias = np.asarray(bias, dtype=float)
    truth = np.asarray(truth, dtype=float)
    belief = np.asarray(belief, dtype=float)
    left = belief < 0
    f = np.where(left, params.f_left, params.f_right)
    k = np.where(left, params.k_left, params.k_right)
    return f * _logistic(k * (truth - (bias - belief) ** 2))


def sharing_probability(article: Article, belief: float, params: ModelParams) -> float:
    """Probability that a single reader at ``belief`` shares ``article``.

    Feasibility of the article is not required; the formula is defined on the
    whole box ``[-1, 1] x [0, 1] x [-1, 1]``.
    """
    belief = getattr(belief, "value", belief)
    check_belief(belief)
    return float(sharing_probability_array(article.bias, article.truth, belief, params))


@dataclass(frozen=True)
class ReaderBelief:
    value: float

    def __post_init__(self):
        check_belief(self.value)


@dataclass(frozen=True)
class BeliefDistribution:
    """Discrete distribution of reader belief.

    The built-in distributions all live on the seven group centers; custom
    point sets are accepted so single readers and two-point toy populations
    can be expressed the same way.
    """

    weights: tuple
    centers: tuple = BELIEF_CENTERS
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        c = tuple(float(x) for x in self.centers)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "centers", c)
        if len(w) != len(c) or not w:
            raise ValidationError(f"need one weight per center, got {len(w)} weights for {len(c)} centers")
        if any(not np.isfinite(x) or x < 0 for x in w):
            raise ValidationError(f"weights must be non-negative, got {w}")
        if abs(math.fsum(w) - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"weights must sum to 1 (got {sum(w)!r})")
        check_belief(c, "centers")

    @classmethod
    def point_mass(cls, belief: float) -> "BeliefDistribution":
        return cls((1.0,), (float(belief),), name=f"point({belief:g})")

    @classmethod
    def two_point(cls, belief: float, q: float) -> "BeliefDistribution":
        """Mass ``q`` at ``belief`` and ``1 - q`` at ``-belief``."""
        return cls((q, 1.0 - q), (float(belief), -float(belief)), name=f"two_point({belief:g},{q:g})")

    def mirrored(self) -> "BeliefDistribution":
        return BeliefDistribution(self.weights, tuple(-c for c in self.centers), name=f"mirror({self.name})")

    def mix(self, other: "BeliefDistribution", alpha: float) -> "BeliefDistribution":
        """Convex combination ``alpha * self + (1 - alpha) * other`` (same centers)."""
        if self.centers != other.centers:
            raise ValidationError("can only mix distributions over the same centers")
        w = tuple(alpha * a + (1 - alpha) * b for a, b in zip(self.weights, other.weights))
        # Re-normalize rounding drift so the invariant check passes.
        s = sum(w)
        return BeliefDistribution(tuple(x / s for x in w), self.centers)

    @property
    def weight_array(self) -> np.ndarray:
        return np.array(self.weights)

    @property
    def center_array(self) -> np.ndarray:
        return np.array(self.centers)


def builtin_distribution(name: str) -> BeliefDistribution:
    """One of the six named populations on the seven belief centers.

    Printed columns that do not sum exactly to 1 are rescaled to do so.
    """
    try:
        w = PRINTED_WEIGHTS[name]
    except KeyError:
        raise ValidationError(
            f"unknown distribution {name!r}; choose one of {', '.join(DISTRIBUTION_NAMES)}"
        ) from None
    total = math.fsum(w)
    return BeliefDistribution(tuple(x / total for x in w), BELIEF_CENTERS, name=name)


def population_sharing_array(bias, truth, dist: BeliefDistribution, params: ModelParams):
    """Vectorized population probability over broadcastable ``bias``/``truth``."""
    bias = np.asarray(bias, dtype=float)[..., None]
    truth = np.asarray(truth, dtype=float)[..., None]
    p = sharing_probability_array(bias, truth, dist.center_array, params)
    return p @ dist.weight_array


def population_sharing_probability(article: Article, dist: BeliefDistribution, params: ModelParams) -> float:
    """Sharing probability of ``article`` averaged over the belief distribution."""
    return float(population_sharing_array(article.bias, article.truth, dist, params))


def distribution_moments(dist: BeliefDistribution) -> tuple[float, float]:
    """Expectation and variance of belief under ``dist``."""
    w = dist.weight_array
    c = dist.center_array
    mean = float(w @ c)
    var = float(w @ c**2 - mean**2)
    return mean, var
