"""Least-squares estimation of the sharing-model parameters.

Rates are fitted with a Levenberg-Marquardt style damped Gauss-Newton solver
with box projection.  Standard errors follow the classical NLS asymptotics
``s^2 (J^T J)^-1`` and p-values come from the t distribution with ``n - p``
degrees of freedom.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .errors import FitError, ValidationError
from .model import _logistic

F_MIN = 1e-12
K_MAX = 100.0
K_MIN = 1e-12

MAX_ITER = 500
RTOL_LOSS = 1e-10
GTOL = 1e-10
# Loss this small means the data are reproduced to machine precision.
LOSS_FLOOR = 1e-28


@dataclass(frozen=True)
class Observation:
    bias: float
    truth: float
    belief: float
    exposures: int
    shares: int
    extreme_flag: bool = False

    def __post_init__(self):
        if not (-1.0 <= self.bias <= 1.0):
            raise ValidationError(f"bias must lie in [-1, 1], got {self.bias!r}")
        if not (0.0 <= self.truth <= 1.0):
            raise ValidationError(f"truth must lie in [0, 1], got {self.truth!r}")
        if not (-1.0 <= self.belief <= 1.0):
            raise ValidationError(f"belief must lie in [-1, 1], got {self.belief!r}")
        if self.exposures < 0 or self.shares < 0:
            raise ValidationError("counts must be non-negative")
        if self.shares > self.exposures:
            raise ValidationError(f"shares ({self.shares}) exceed exposures ({self.exposures})")

    @property
    def rate(self) -> float:
        if self.exposures == 0:
            return float("nan")
        return self.shares / self.exposures

    @property
    def side(self) -> str:
        return "left" if self.belief < 0 else "right"


@dataclass
class FitReport:
    names: tuple
    estimates: tuple
    standard_errors: tuple
    p_values: tuple
    residual_standard_error: float
    iterations: int
    converged: bool
    n_obs: int
    side: str | None = None
    loss_history: list = field(default_factory=list, repr=False)
    gradient_norm: float = float("nan")

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("loss_history")
        d["parameters"] = {
            name: {"estimate": est, "standard_error": se, "p_value": pv}
            for name, est, se, pv in zip(self.names, self.estimates, self.standard_errors, self.p_values)
        }
        for key in ("names", "estimates", "standard_errors", "p_values"):
            d.pop(key)
        return d

    def __getitem__(self, name):
        return self.estimates[self.names.index(name)]

    def se(self, name):
        return self.standard_errors[self.names.index(name)]

    def p(self, name):
        return self.p_values[self.names.index(name)]


# -- model functions ---------------------------------------------------------


def _base_model(theta, bias, truth, belief, flag=None):
    f, k = theta
    x = truth - (bias - belief) ** 2
    s = _logistic(k * x)
    jac = np.column_stack([s, f * s * (1.0 - s) * x])
    return f * s, jac


def _extreme_model(theta, bias, truth, belief, flag):
    f, k, fe, ke = theta
    x = truth - (bias - belief) ** 2
    ff = f + fe * flag
    kk = k + ke * flag
    s = _logistic(kk * x)
    ds = ff * s * (1.0 - s) * x
    jac = np.column_stack([s, ds, s * flag, ds * flag])
    return ff * s, jac


def _project_base(theta):
    f, k = theta
    return np.array([min(max(f, F_MIN), 1.0), min(max(k, K_MIN), K_MAX)])


def _project_extreme(theta):
    f, k, fe, ke = theta
    f = min(max(f, F_MIN), 1.0)
    k = min(max(k, K_MIN), K_MAX)
    fe = min(max(fe, F_MIN - f), 1.0 - f)
    ke = min(max(ke, K_MIN - k), K_MAX - k)
    return np.array([f, k, fe, ke])


def levenberg_marquardt(model, theta0, y, args, weights=None, project=None, max_iter=MAX_ITER):
    """Minimize ``0.5 * sum(w * (y - model(theta))^2)``.

    ``model(theta, *args)`` returns ``(prediction, jacobian)``.  Returns
    ``(theta, info)`` where ``info`` carries the iteration count, the loss
    history of accepted steps and the convergence flag.
    """
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    sw = np.sqrt(w)
    project = project or (lambda th: th)
    theta = project(np.asarray(theta0, dtype=float))

    def evaluate(th):
        pred, jac = model(th, *args)
        r = sw * (y - pred)
        return r, sw[:, None] * jac, 0.5 * float(r @ r)

    r, J, loss = evaluate(theta)
    history = [loss]
    lam = 1e-3
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        g = J.T @ r
        if np.max(np.abs(g)) < GTOL or loss < LOSS_FLOOR:
            converged = True
            break
        A = J.T @ J
        D = np.diag(np.maximum(np.diag(A), 1e-30))
        accepted = False
        while lam < 1e16:
            try:
                step = np.linalg.solve(A + lam * D, g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            cand = project(theta + step)
            r_c, J_c, loss_c = evaluate(cand)
            if loss_c < loss:
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            # No descent direction left at working precision.
            converged = bool(np.max(np.abs(g)) < np.sqrt(GTOL))
            break
        rel = (loss - loss_c) / max(loss, 1e-300)
        theta, r, J, loss = cand, r_c, J_c, loss_c
        history.append(loss)
        lam = max(lam / 10.0, 1e-12)
        if rel < RTOL_LOSS:
            converged = True
            break
    gnorm = float(np.max(np.abs(J.T @ r)))
    return theta, {"iterations": it, "history": history, "converged": converged, "gradient_norm": gnorm, "jacobian": J, "residuals": r}


def _summarize(names, theta, info, n, side):
    J = info["jacobian"]
    r = info["residuals"]
    p = len(theta)
    dof = n - p
    if np.linalg.matrix_rank(J) < p:
        raise FitError("rank-deficient Jacobian at the optimum; parameters are not identifiable")
    rss = float(r @ r)
    s2 = rss / dof
    cov = s2 * np.linalg.inv(J.T @ J)
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        tval = np.where(se > 0, theta / se, np.where(theta == 0, 0.0, np.inf))
    pval = 2.0 * stats.t.sf(np.abs(tval), dof)
    return FitReport(
        names=tuple(names),
        estimates=tuple(float(x) for x in theta),
        standard_errors=tuple(float(x) for x in se),
        p_values=tuple(float(x) for x in pval),
        residual_standard_error=float(np.sqrt(s2)),
        iterations=info["iterations"],
        converged=info["converged"],
        n_obs=n,
        side=side,
        loss_history=info["history"],
        gradient_norm=info["gradient_norm"],
    )


def _as_arrays(observations, side):
    obs = [o for o in observations if o.exposures > 0]
    if side is not None:
        if side not in ("left", "right"):
            raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
        obs = [o for o in obs if o.side == side]
    cols = {
        "bias": np.array([o.bias for o in obs], dtype=float),
        "truth": np.array([o.truth for o in obs], dtype=float),
        "belief": np.array([o.belief for o in obs], dtype=float),
        "rate": np.array([o.rate for o in obs], dtype=float),
        "exposures": np.array([o.exposures for o in obs], dtype=float),
        "flag": np.array([1.0 if o.extreme_flag else 0.0 for o in obs]),
    }
    return cols


def fit_rates(bias, truth, belief, rate, weights=None, theta0=None, side=None) -> FitReport:
    """Fit ``(f, k)`` of a single branch to observed sharing rates.

    Arrays describe one observation per entry.  ``weights`` (for instance
    exposure counts) turn the fit into weighted least squares.
    """
    bias, truth, belief, rate = (np.asarray(a, dtype=float) for a in (bias, truth, belief, rate))
    n = rate.size
    if n < 4:
        raise ValidationError(f"need at least 4 observations to fit, got {n}")
    if theta0 is None:
        theta0 = (max(float(rate.max()), 1e-6), 5.0)
    theta, info = levenberg_marquardt(
        _base_model, theta0, rate, (bias, truth, belief), weights=weights, project=_project_base
    )
    return _summarize(("f", "k"), theta, info, n, side)


def fit_parameters(observations, side: str, weighted: bool = False) -> FitReport:
    """Fit the branch for ``side`` ('left' uses readers with belief < 0)."""
    c = _as_arrays(observations, side)
    if c["rate"].size < 4:
        raise ValidationError(f"need at least 4 {side}-side observations with exposures > 0, got {c['rate'].size}")
    return fit_rates(
        c["bias"], c["truth"], c["belief"], c["rate"], weights=c["exposures"] if weighted else None, side=side
    )


def fit_extreme_rates(bias, truth, belief, rate, flag, weights=None, theta0=None, side=None) -> FitReport:
    """Fit ``(f, k, f_e, k_e)`` where ``flag`` marks extreme-activity readers."""
    bias, truth, belief, rate, flag = (np.asarray(a, dtype=float) for a in (bias, truth, belief, rate, flag))
    n = rate.size
    n_ext = int(flag.sum())
    if n_ext == 0 or n_ext == n:
        raise FitError(
            "degenerate design: the extreme-user effects need both flagged and unflagged observations "
            f"({n_ext} of {n} flagged)"
        )
    if n < 6:
        raise ValidationError(f"need at least 6 observations to fit four parameters, got {n}")
    if theta0 is None:
        f0 = max(float(rate[flag == 0].max()), 1e-6)
        fe0 = float(rate[flag == 1].max()) - f0
        theta0 = (f0, 5.0, fe0, 0.0)
    theta, info = levenberg_marquardt(
        _extreme_model, theta0, rate, (bias, truth, belief, flag), weights=weights, project=_project_extreme
    )
    return _summarize(("f", "k", "f_e", "k_e"), theta, info, n, side)


def fit_extreme_user_model(observations, side: str, weighted: bool = False) -> FitReport:
    c = _as_arrays(observations, side)
    return fit_extreme_rates(
        c["bias"],
        c["truth"],
        c["belief"],
        c["rate"],
        c["flag"],
        weights=c["exposures"] if weighted else None,
        side=side,
    )


# -- assumption checks -------------------------------------------------------


def ols_slope(x, y) -> tuple[float, float]:
    """Slope of the simple regression of ``y`` on ``x`` and its two-sided p-value."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 3:
        raise ValidationError(f"need at least 3 points for a slope test, got {n}")
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise ValidationError("predictor is constant; slope is undefined")
    slope = float(xc @ (y - y.mean())) / sxx
    resid = y - y.mean() - slope * xc
    s2 = float(resid @ resid) / (n - 2)
    se = np.sqrt(s2 / sxx)
    if se == 0.0:
        # Exact fit: a flat line carries no evidence, a sloped one is certain.
        return slope, 1.0 if slope == 0.0 else 0.0
    tval = slope / se
    return slope, float(2.0 * stats.t.sf(abs(tval), n - 2))


def validate_assumptions(observations) -> dict:
    """Slope tests of rate on misalignment ``|b - B|`` and on truthfulness.

    The alignment assumption predicts negative misalignment slopes; the
    truthfulness assumption predicts positive truth slopes.  Each side of the
    spectrum is tested separately.
    """
    out = {}
    for side in ("left", "right"):
        c = _as_arrays(observations, side)
        if c["rate"].size < 3:
            raise ValidationError(f"need at least 3 {side}-side observations, got {c['rate'].size}")
        out[f"slope_misalignment_{side}"] = ols_slope(np.abs(c["bias"] - c["belief"]), c["rate"])
        out[f"slope_truth_{side}"] = ols_slope(c["truth"], c["rate"])
    return out
