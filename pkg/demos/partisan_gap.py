"""
One-sided versus split audiences
================================

Put all readers at belief ``B``, or put a share ``q`` there and the rest at
``-B``.  For an article leaning the same way as ``B`` the one-sided audience
always shares more, and the relative shortfall of the split audience is
largest for untruthful content.
"""

from newsshare import BASE_PARAMS, ModelParams
from newsshare.analysis import partisan_report

params = ModelParams.symmetric(BASE_PARAMS.f_left, BASE_PARAMS.k_left)
rep = partisan_report(bias=0.5, belief=0.6, q=0.5, params=params)
print(f"{'t':>5} {'one-sided':>10} {'split':>10} {'rel gap':>8}")
for t, pu, pp, g in zip(rep["t"], rep["p_unimodal"], rep["p_partisan"], rep["rel_gap"]):
    print(f"{t:5.2f} {pu:10.6f} {pp:10.6f} {g:8.4f}")
