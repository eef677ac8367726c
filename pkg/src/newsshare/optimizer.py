"""Propagation-maximizing articles over the feasible region ``|b| + t <= 1``.

Single readers have closed-form optima.  Populations are handled by an
exhaustive evaluation on a lattice covering the feasible triangle followed by
a projected coordinate search (golden-section on each coordinate) around the
best lattice point.  Everything is
deterministic: the lattice is integer-indexed and ties are broken by
smallest ``|b|``, then smallest ``b``, then largest ``t``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .model import (
    BeliefDistribution,
    ModelParams,
    check_belief,
    check_truth,
    distribution_moments,
    population_sharing_array,
    sharing_probability_array,
)

DEFAULT_GRID_STEP = 0.005
DEFAULT_REFINE_TOL = 1e-8
BOUNDARIES = ("truth_bias_tradeoff", "zero_bias", "zero_truth", "interior", "box_edge")

# Relative slack within which lattice values count as tied.
_TIE_RTOL = 1e-12
_LINE_XTOL = 1e-12
_MAX_REFINE_ITER = 100


@dataclass(frozen=True)
class OptimizationResult:
    bias_star: float
    truth_star: float
    probability_star: float
    active_boundary: str
    trace: tuple = field(default=(), compare=False, repr=False)


def classify_boundary(bias: float, truth: float, tol: float = 1e-9) -> str:
    """Which edge of the feasible region a point sits on.

    The apex ``(0, 1)`` lies on both the zero-bias line and the trade-off
    boundary; it is reported as ``zero_bias``.
    """
    on_tradeoff = abs(abs(bias) + truth - 1.0) <= tol
    if abs(bias) <= tol and on_tradeoff:
        return "zero_bias"
    if abs(abs(bias) - 1.0) <= tol:
        return "box_edge"
    if on_tradeoff:
        return "truth_bias_tradeoff"
    if truth <= tol:
        return "zero_truth"
    if abs(bias) <= tol:
        return "zero_bias"
    return "interior"


def optimize_single_reader_closed_form(belief, params: ModelParams) -> OptimizationResult:
    """Global optimum for one reader.

    Along ``t = 1 - |b|`` the exponent ``1 - |b| - (b - B)^2`` peaks at
    ``|b| = |B| - 1/2``; for ``|B| <= 1/2`` that is clipped to the apex.
    The optimum does not depend on ``params``.
    """
    B = float(getattr(belief, "value", belief))
    check_belief(B)
    if B >= 0.5:
        b, t = B - 0.5, 1.5 - B
    elif B <= -0.5:
        b, t = B + 0.5, 1.5 + B
    else:
        b, t = 0.0, 1.0
    p = float(sharing_probability_array(b, t, B, params))
    return OptimizationResult(b, t, p, classify_boundary(b, t))


def optimize_fixed_truth(truth: float, belief, params: ModelParams | None = None) -> float:
    """Best bias for a single reader when truthfulness is held at ``truth``."""
    B = float(getattr(belief, "value", belief))
    check_truth(truth)
    check_belief(B)
    if abs(B) + truth <= 1.0:
        return B
    return math.copysign(1.0 - truth, B)


def _lattice_size(grid_step: float) -> int:
    if not (0.0 < grid_step <= 0.1):
        raise ValidationError(f"grid_step must lie in (0, 0.1], got {grid_step!r}")
    # Snap to the nearest step that divides 1 so the lattice hits the boundary.
    return max(10, int(round(1.0 / grid_step)))


def _check_tol(refine_tol: float):
    if not (refine_tol > 0.0):
        raise ValidationError(f"refine_tol must be positive, got {refine_tol!r}")


def _bias_limits(side: str | None, truth: float = 0.0) -> tuple[float, float]:
    hi = 1.0 - truth
    if side is None:
        return -hi, hi
    if side == "right":
        return 0.0, hi
    if side == "left":
        return -hi, 0.0
    raise ValidationError(f"side must be 'left', 'right' or None, got {side!r}")


def triangle_lattice(n: int, side: str | None = None):
    """Integer lattice ``(i, j)`` with ``|i| + j <= n`` as bias/truth arrays."""
    lo = 0 if side == "right" else -n
    hi = 0 if side == "left" else n
    i, j = np.meshgrid(np.arange(lo, hi + 1), np.arange(0, n + 1), indexing="ij")
    keep = np.abs(i) + j <= n
    return i[keep] / n, j[keep] / n


def _pick(values, bias, truth):
    """Index of the lattice maximum after deterministic tie-breaking."""
    vmax = values.max()
    tied = np.flatnonzero(values >= vmax - _TIE_RTOL * abs(vmax))
    if tied.size == 1:
        return int(tied[0])
    order = np.lexsort((-truth[tied], bias[tied], np.abs(bias[tied])))
    return int(tied[order[0]])


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _line_max(fun, lo, hi, x0, f0, xtol=_LINE_XTOL):
    """Maximize a locally unimodal ``fun`` on ``[lo, hi]`` by golden-section search.

    Endpoints are checked explicitly so monotone functions land exactly on
    the boundary.  Returns the better of the result and the starting point
    ``(x0, f0)``, so the value never decreases.
    """
    best_x, best_f = x0, f0
    for x in (lo, hi):
        fx = fun(x)
        if fx > best_f:
            best_x, best_f = x, fx
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fun(d)
    x, fx = (c, fc) if fc >= fd else (d, fd)
    if fx > best_f:
        best_x, best_f = x, fx
    return best_x, best_f


class _Objective:
    """Population probability of a single point, evaluated without numpy overhead."""

    def __init__(self, dist: BeliefDistribution, params: ModelParams):
        self.terms = [
            (w, c) + params.branch(c) for w, c in zip(dist.weights, dist.centers) if w > 0
        ]

    def __call__(self, b: float, t: float) -> float:
        total = 0.0
        for w, c, f, k in self.terms:
            x = k * (t - (b - c) ** 2)
            if x >= 0:
                total += w * f / (1.0 + math.exp(-x))
            else:
                e = math.exp(x)
                total += w * f * e / (1.0 + e)
        return total


def _refine(obj, b, t, p, h, refine_tol, b_lo, b_hi):
    """Projected coordinate search in a box of half-width ``h`` around ``(b, t)``.

    Moving the bias drags the truth down onto ``|b| + t = 1`` when needed, so a
    point on the trade-off boundary can slide along it.
    """
    trace = [p]
    for _ in range(_MAX_REFINE_ITER):
        start = p
        lo, hi = max(b_lo, b - h), min(b_hi, b + h)
        t_cap = t
        b, p = _line_max(lambda x: obj(x, min(t_cap, 1.0 - abs(x))), lo, hi, b, p)
        t = min(t, 1.0 - abs(b))
        b_fix = b
        t, p = _line_max(lambda y: obj(b_fix, y), max(0.0, t - h), min(1.0 - abs(b), t + h), t, p)
        trace.append(p)
        if p - start < refine_tol:
            break
    return b, t, p, tuple(trace)


def optimize_population(
    dist: BeliefDistribution,
    params: ModelParams,
    grid_step: float = DEFAULT_GRID_STEP,
    refine_tol: float = DEFAULT_REFINE_TOL,
    side: str | None = None,
    _lattice=None,
) -> OptimizationResult:
    """Maximize the population sharing probability over ``|b| + t <= 1``.

    ``side='right'`` (or ``'left'``) restricts the search to non-negative
    (non-positive) bias.
    """
    n = _lattice_size(grid_step)
    _check_tol(refine_tol)
    if _lattice is None:
        bias, truth = triangle_lattice(n, side)
        values = population_sharing_array(bias, truth, dist, params)
    else:
        bias, truth, values = _lattice
    k = _pick(values, bias, truth)
    obj = _Objective(dist, params)
    b0, t0 = float(bias[k]), float(truth[k])
    b_lo, b_hi = _bias_limits(side)
    b, t, p, trace = _refine(obj, b0, t0, obj(b0, t0), 1.0 / n, refine_tol, b_lo, b_hi)
    p = float(population_sharing_array(b, t, dist, params))
    return OptimizationResult(b, t, p, classify_boundary(b, t), trace)


def optimize_population_fixed_truth(
    dist: BeliefDistribution,
    truth: float,
    params: ModelParams,
    grid_step: float = DEFAULT_GRID_STEP,
    refine_tol: float = DEFAULT_REFINE_TOL,
    side: str | None = None,
) -> tuple[float, float]:
    """Best bias for a population when truthfulness is fixed.

    Returns ``(bias_star, probability_star)``.
    """
    check_truth(truth)
    n = _lattice_size(grid_step)
    _check_tol(refine_tol)
    lo, hi = _bias_limits(side, truth)
    step = 1.0 / n
    grid = np.arange(math.ceil(lo * n - 1e-9), math.floor(hi * n + 1e-9) + 1) / n
    grid = np.unique(np.concatenate([[lo], grid[(grid > lo) & (grid < hi)], [hi]]))
    values = population_sharing_array(grid, truth, dist, params)
    return _refine_fixed(dist, params, truth, grid, values, step, refine_tol, lo, hi)


def weight_compositions(weight_step: float, parts: int = 7, max_rows: int = 200_000) -> np.ndarray:
    """All weight vectors on ``parts`` points with entries in multiples of ``weight_step``.

    Rows come out in lexicographic order of the weight vectors.
    """
    m = round(1.0 / weight_step)
    if m <= 0 or abs(m * weight_step - 1.0) > 1e-9:
        raise ValidationError(f"weight_step must divide 1 evenly, got {weight_step!r}")
    count = math.comb(m + parts - 1, parts - 1)
    if count > max_rows:
        raise ValidationError(f"weight_step {weight_step} gives {count} rows, above the cap of {max_rows}")
    rows = []
    # Stars and bars; reversing the bar positions yields lexicographic order.
    for bars in itertools.combinations(range(m + parts - 1), parts - 1):
        prev = -1
        row = []
        for x in bars:
            row.append(x - prev - 1)
            prev = x
        row.append(m + parts - 2 - prev)
        rows.append(row)
    rows.sort()
    return np.array(rows, dtype=float) / m


SWEEP_COLUMNS = ("expectation", "variance", "bias_star", "truth_star", "probability_star")


def sweep_moment_space(
    params: ModelParams,
    weight_step: float = 0.1,
    grid_step: float = DEFAULT_GRID_STEP,
    refine_tol: float = DEFAULT_REFINE_TOL,
    truth: float | None = None,
    centers=None,
    max_rows: int = 200_000,
    chunk: int = 256,
):
    """Optimize every weight composition over the belief centers.

    With ``truth`` set, the bias is optimized at that fixed truthfulness
    instead of over the whole feasible triangle.  Returns ``(weights, rows)``
    where ``rows`` is a list of dicts keyed by :data:`SWEEP_COLUMNS`, ordered
    like ``weights``.
    """
    from .model import BELIEF_CENTERS

    centers = tuple(BELIEF_CENTERS if centers is None else centers)
    W = weight_compositions(weight_step, len(centers), max_rows)
    n = _lattice_size(grid_step)
    _check_tol(refine_tol)
    c = np.array(centers)
    if truth is None:
        bias, tr = triangle_lattice(n)
    else:
        check_truth(truth)
        hi = 1.0 - truth
        bias = np.unique(np.concatenate([[-hi], np.arange(-n, n + 1) / n, [hi]]))
        bias = bias[np.abs(bias) <= hi]
        tr = np.full_like(bias, truth)
    # One probability column per center; each distribution is then a matmul.
    basis = sharing_probability_array(bias[:, None], tr[:, None], c[None, :], params)
    rows = []
    for s in range(0, len(W), chunk):
        block = W[s : s + chunk] @ basis.T
        for wrow, vals in zip(W[s : s + chunk], block):
            keep = wrow > 0
            dist = BeliefDistribution(tuple(wrow[keep]), tuple(c[keep]))
            mean, var = distribution_moments(BeliefDistribution(tuple(wrow), centers))
            if truth is None:
                res = optimize_population(dist, params, grid_step, refine_tol, _lattice=(bias, tr, vals))
                b, t, p = res.bias_star, res.truth_star, res.probability_star
            else:
                b, p = _refine_fixed(dist, params, truth, bias, vals, 1.0 / n, refine_tol, -hi, hi)
                t = truth
            rows.append(
                {"expectation": mean, "variance": var, "bias_star": b, "truth_star": t, "probability_star": p}
            )
    return W, rows


def _refine_fixed(dist, params, truth, grid, values, step, refine_tol, lo, hi):
    k = _pick(values, grid, np.full_like(grid, truth))
    obj = _Objective(dist, params)
    b = float(grid[k])
    p = obj(b, truth)
    for _ in range(_MAX_REFINE_ITER):
        start = p
        b, p = _line_max(lambda x: obj(x, truth), max(lo, b - step), min(hi, b + step), b, p)
        if p - start < refine_tol:
            break
    return b, float(population_sharing_array(b, truth, dist, params))
