"""
Sharing probability for one reader
==================================

A reader at belief ``B`` shares an article of bias ``b`` and truthfulness
``t`` with probability ``f / (1 + exp(-k (t - (b - B)^2)))``.  Readers on the
left of zero use ``(f_l, k_l)``, everyone else ``(f_r, k_r)``.
"""

import numpy as np

from newsshare import Article, ModelParams, sharing_probability
from newsshare.optimizer import optimize_fixed_truth, optimize_single_reader_closed_form

params = ModelParams(f_left=0.5, k_left=1.0, f_right=1.0, k_right=10.0)

# Exponent zero: the probability is exactly half the scale.
print(sharing_probability(Article(0.45, 0.0), 0.45, params))

# More truth always helps, a larger distance from the reader always hurts.
for t in (0.0, 0.25, 0.5, 0.75, 1.0):
    row = [sharing_probability(Article(b, t), 0.45, params) for b in (-0.5, 0.0, 0.45, 0.9)]
    print(f"t={t:.2f}", " ".join(f"{p:.4f}" for p in row))

# Best article for a single reader.  Moderate readers get unbiased, fully
# truthful content; beyond |B| = 0.5 the optimum trades truth for bias.
for B in np.linspace(-1, 1, 9):
    res = optimize_single_reader_closed_form(B, params)
    print(f"B={B:+.2f} -> b*={res.bias_star:+.3f} t*={res.truth_star:.3f} ({res.active_boundary})")

# With truthfulness pinned, the bias moves toward the reader until the
# feasible region |b| + t <= 1 stops it.
print(optimize_fixed_truth(0.4, 0.8, params))
