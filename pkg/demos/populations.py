"""
Best article for a population
=============================

Mixing readers over the seven belief centers turns the single-reader problem
into a maximization over the triangle ``|b| + t <= 1``.  The optimizer scans
a lattice and then polishes the best point by coordinate line searches.
"""

from newsshare import BASE_PARAMS, DISTRIBUTION_NAMES, builtin_distribution, distribution_moments, optimize_population
from newsshare.analysis import low_truth_argmax

print(f"{'population':<18} {'mean':>7} {'var':>6} {'b*':>7} {'t*':>6} {'p*':>9}  low-truth b*")
for name in DISTRIBUTION_NAMES:
    dist = builtin_distribution(name)
    mean, var = distribution_moments(dist)
    mean = round(mean, 12) + 0.0
    res = optimize_population(dist, BASE_PARAMS)
    # Untruthful right-leaning content: which bias spreads best at t = 0.1?
    b_low, _ = low_truth_argmax(dist, BASE_PARAMS, truth=0.1, side="right")
    print(
        f"{name:<18} {mean:+7.3f} {var:6.3f} {res.bias_star:+7.3f} {res.truth_star:6.3f} "
        f"{res.probability_star:9.6f}  {b_low:.3f}"
    )

# Populations centred on zero prefer unbiased, truthful content.  Split
# populations reward moderate bias once truth is low, and the hyperpartisan
# one rewards strong bias.
