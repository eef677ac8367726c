"""
Expectation and variance of the belief distribution
===================================================

Enumerate every distribution with weights on a 0.1 grid (8008 of them) and
record the optimal article for each.  Within a narrow band of expected
belief, more spread means a lower best achievable sharing probability.
"""

import numpy as np
from scipy.stats import spearmanr

from newsshare import BASE_PARAMS, sweep_moment_space

W, rows = sweep_moment_space(BASE_PARAMS, weight_step=0.1)
E = np.array([r["expectation"] for r in rows])
V = np.array([r["variance"] for r in rows])
P = np.array([r["probability_star"] for r in rows])
B = np.array([r["bias_star"] for r in rows])

bucket = np.floor(E / 0.05 + 1e-9).astype(int)
print(f"{'E bucket':>14} {'rows':>5} {'rho(V, p*)':>10} {'max b*':>7}")
for k in np.unique(bucket):
    sel = bucket == k
    rho = spearmanr(V[sel], P[sel]).correlation if sel.sum() > 1 else float("nan")
    print(f"[{k * 0.05:+.2f},{(k + 1) * 0.05:+.2f}) {sel.sum():5d} {rho:10.3f} {B[sel].max():7.3f}")
