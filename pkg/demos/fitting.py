"""
Estimating the parameters from counts
=====================================

Generate binomial share counts from known parameters, fit each reader side by
least squares, then add a block of high-activity readers and estimate their
extra scale and rate.
"""

import numpy as np

from newsshare import DomainRecord, GROUPS, BELIEF_CENTERS, BASE_PARAMS, ModelParams
from newsshare import build_observations, fit_extreme_user_model, fit_parameters, validate_assumptions
from newsshare.model import sharing_probability_array

rng = np.random.default_rng(7)


def simulate(params, n_domains, exposures, extreme=False):
    records = []
    for d in range(n_domains):
        bias, truth = rng.uniform(-1, 1), rng.uniform(0, 0.8)
        counts = {}
        for group, center in zip(GROUPS, BELIEF_CENTERS):
            p = float(sharing_probability_array(bias, truth, center, params))
            counts[group] = (exposures, int(rng.binomial(exposures, p)))
        records.append(DomainRecord(f"site{d:03d}", bias, truth, counts, extreme))
    return records


records = simulate(BASE_PARAMS, 100, 200_000)
obs = build_observations(records)
for side in ("left", "right"):
    rep = fit_parameters(obs, side)
    print(side, {n: f"{v:.4f} +/- {s:.4f}" for n, v, s in zip(rep.names, rep.estimates, rep.standard_errors)})

print({k: f"slope {c:+.4f}, p={p:.1e}" for k, (c, p) in validate_assumptions(obs).items()})

# High-activity readers share far more often but react to truth the same way.
heavy = ModelParams(BASE_PARAMS.f_left + 0.15, BASE_PARAMS.k_left, BASE_PARAMS.f_right + 0.15, BASE_PARAMS.k_right)
obs += build_observations(simulate(heavy, 100, 200_000, extreme=True))
rep = fit_extreme_user_model(obs, "left")
for name in rep.names:
    print(f"{name:>4} {rep[name]:+.4f}  se={rep.se(name):.4f}  p={rep.p(name):.3g}")
