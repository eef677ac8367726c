"""
From fact-check colors and count tables to observations
=======================================================

Truthfulness comes from color-coded justifications: each color covers a
numeric range and a justification may say where in the range it sits.  The
domain score is the mean.  Share and exposure counts arrive one row per
(domain, belief group) cell.
"""

import tempfile
from pathlib import Path

from newsshare import truthfulness_category, truthfulness_score
from newsshare.data import load_observations

print(truthfulness_score([("red", 0.5), ("yellow", 0.5)]))  # 0.3
print(truthfulness_category(0.55))

tmp = Path(tempfile.mkdtemp())
(tmp / "just.csv").write_text("domain_id,color,fraction\nsiteA,green,\nsiteA,yellow,0.9\nsiteB,black,0.2\n")
(tmp / "cells.csv").write_text(
    "domain_id,bias,truth,group,exposures,shares\n"
    "siteA,-0.3,,lean_left,1200,14\n"
    "siteA,-0.3,,center,900,6\n"
    "siteA,-0.3,,right,0,0\n"
    "siteB,0.8,,extreme_right,400,19\n"
)
for o in load_observations(tmp / "cells.csv", tmp / "just.csv"):
    print(o)
