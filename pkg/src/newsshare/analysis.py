"""Tables behind the level-curve, population-curve, sensitivity and
unimodal-versus-partisan analyses."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import (
    BASE_PARAMS,
    DISTRIBUTION_NAMES,
    BeliefDistribution,
    ModelParams,
    builtin_distribution,
    check_belief,
    check_bias,
    check_truth,
    population_sharing_array,
    sharing_probability_array,
)
from .optimizer import optimize_population_fixed_truth

DEFAULT_POINTS = 201
LOW_TRUTH = 0.1
SHIFT_THRESHOLD = 0.15

_VARS = ("b", "t", "B")
# Free axis used when only the fixed variable is given.
_DEFAULT_AXIS = {"B": "t", "b": "t", "t": "B"}


def level_curves(params: ModelParams, fixed: str, value: float, x: str | None = None, levels=None, points=DEFAULT_POINTS):
    """Probability along one variable for a few levels of another.

    ``fixed`` names the variable held at ``value`` (one of ``b``, ``t``,
    ``B``), ``x`` the swept axis; the remaining variable takes each value in
    ``levels``.  Returns ``(columns, rows)`` in long format.
    """
    if fixed not in _VARS:
        raise ValidationError(f"fixed must be one of {_VARS}, got {fixed!r}")
    x = x or _DEFAULT_AXIS[fixed]
    if x not in _VARS or x == fixed:
        raise ValidationError(f"sweep axis must be one of {_VARS} other than {fixed!r}, got {x!r}")
    level_var = next(v for v in _VARS if v not in (fixed, x))
    (check_truth if fixed == "t" else check_bias)(value, fixed)
    lo = 0.0 if x == "t" else -1.0
    xs = np.linspace(lo, 1.0, points)
    if levels is None:
        levels = (0.0, 0.25, 0.5, 0.75, 1.0) if level_var == "t" else (-0.5, 0.0, 0.25, 0.45, 0.75)
    levels = tuple(float(v) for v in levels)
    (check_truth if level_var == "t" else check_bias)(levels, level_var)
    rows = []
    for lv in levels:
        env = {fixed: value, level_var: lv, x: xs}
        p = sharing_probability_array(env["b"], env["t"], env["B"], params)
        for xv, pv in zip(xs, np.broadcast_to(p, xs.shape)):
            rows.append((lv, float(xv), float(pv)))
    return (level_var, x, "p"), rows


def population_curves(dist: BeliefDistribution, side: str, params: ModelParams, points=DEFAULT_POINTS, by="t"):
    """Population probability on the feasible part of one bias half-plane.

    Rows are ``(b, t, p)`` with ``b`` in ``[0, 1]`` for ``side='right'``
    (``[-1, 0]`` for left) and ``|b| + t <= 1``.  ``by='t'`` orders rows by
    truth then bias (one curve per truth level, bias on the x-axis);
    ``by='b'`` gives the transposed orientation.
    """
    if side not in ("left", "right"):
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    n = points - 1
    sign = 1.0 if side == "right" else -1.0
    i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    keep = i + j <= n
    b = sign * i[keep] / n
    t = j[keep] / n
    p = population_sharing_array(b, t, dist, params)
    if by == "t":
        order = np.lexsort((np.abs(b), t))
    elif by == "b":
        order = np.lexsort((t, np.abs(b)))
    else:
        raise ValidationError(f"by must be 't' or 'b', got {by!r}")
    return ("b", "t", "p"), [(float(b[k]) + 0.0, float(t[k]), float(p[k])) for k in order]


def low_truth_argmax(dist, params, truth=LOW_TRUTH, side="right", grid_step=0.005):
    """Bias maximizing propagation of low-truth content on one side."""
    b, p = optimize_population_fixed_truth(dist, truth, params, grid_step=grid_step, side=side)
    return b, p


@dataclass(frozen=True)
class SensitivityRange:
    f_left: tuple = (0.005, 0.014)
    k_left: tuple = (2.232, 6.697)
    f_right: tuple = (0.004, 0.011)
    k_right: tuple = (2.791, 8.372)

    def __post_init__(self):
        for name in ("f_left", "k_left", "f_right", "k_right"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValidationError(f"{name}: low ({lo}) must be below high ({hi})")

    def contains(self, params: ModelParams) -> bool:
        return all(
            lo <= getattr(params, name) <= hi
            for name, (lo, hi) in (
                ("f_left", self.f_left),
                ("k_left", self.k_left),
                ("f_right", self.f_right),
                ("k_right", self.k_right),
            )
        )

    def combinations(self):
        """The 16 low/high settings; ``(f_l, k_l, f_r, k_r)`` counts in binary, f_l most significant."""
        for bits in itertools.product((0, 1), repeat=4):
            params = ModelParams(self.f_left[bits[0]], self.k_left[bits[1]], self.f_right[bits[2]], self.k_right[bits[3]])
            yield bits, params


def combination_label(bits) -> str:
    return "_".join(f"{name}-{'high' if bit else 'low'}" for name, bit in zip(("fl", "kl", "fr", "kr"), bits))


@dataclass
class SensitivityRow:
    bits: tuple
    params: ModelParams
    argmax: dict
    shifted: tuple
    flagged: bool

    @property
    def label(self) -> str:
        return combination_label(self.bits)


def sensitivity_grid(
    dist_names=DISTRIBUTION_NAMES,
    ranges: SensitivityRange | None = None,
    base: ModelParams = BASE_PARAMS,
    truth: float = LOW_TRUTH,
    side: str = "right",
    threshold: float = SHIFT_THRESHOLD,
    min_shifted: int = 1,
    grid_step: float = 0.005,
):
    """Low-truth argmax bias for every low/high parameter combination.

    A combination is flagged when at least ``min_shifted`` populations move
    their argmax by more than ``threshold`` relative to ``base``.  Returns
    ``(base_argmax, rows)``.
    """
    ranges = ranges or SensitivityRange()
    dists = {name: builtin_distribution(name) for name in dist_names}
    base_argmax = {n: low_truth_argmax(d, base, truth, side, grid_step)[0] for n, d in dists.items()}
    rows = []
    for bits, params in ranges.combinations():
        am = {n: low_truth_argmax(d, params, truth, side, grid_step)[0] for n, d in dists.items()}
        shifted = tuple(n for n in dists if abs(am[n] - base_argmax[n]) > threshold)
        rows.append(SensitivityRow(bits, params, am, shifted, len(shifted) >= min_shifted))
    return base_argmax, rows


def partisan_report(bias: float, belief: float, q: float, params: ModelParams, truths=None):
    """Sharing in a one-belief population versus a split population.

    The unimodal population sits entirely at ``belief``; the partisan one puts
    ``q`` there and ``1 - q`` at ``-belief``.  Returns a dict of arrays keyed
    ``t, p_unimodal, p_partisan, abs_gap, rel_gap``.
    """
    check_bias(bias)
    check_belief(belief)
    if not (0.0 <= q <= 1.0):
        raise ValidationError(f"q must lie in [0, 1], got {q!r}")
    if not params.is_symmetric:
        raise ValidationError("the comparison assumes f_l == f_r and k_l == k_r")
    if bias * belief < 0:
        warnings.warn("bias and belief have opposite signs; the dominance result does not apply", stacklevel=2)
    t = np.linspace(0.0, 1.0, 21) if truths is None else np.asarray(truths, dtype=float)
    check_truth(t)
    p_same = sharing_probability_array(bias, t, belief, params)
    p_mirror = sharing_probability_array(bias, t, -belief, params)
    p_u = p_same
    # Written as a deficit from p_u so q == 1 or belief == 0 give exact equality.
    p_p = p_u - (1.0 - q) * (p_same - p_mirror)
    gap = p_u - p_p
    return {"t": t, "p_unimodal": p_u, "p_partisan": p_p, "abs_gap": gap, "rel_gap": gap / p_u}
