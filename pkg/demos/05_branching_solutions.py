"""Non-uniqueness after extending a field beyond its region.

On its own notched box the contraction field admits one flow, but the
packaged continuous extension supports two distinct closed-form solutions
from (0, 0): one hugging the box edge, one escaping along a curved branch.
Both are certified by a finite-difference residual check against the
extended field.
"""

import numpy as np

from mflow import get_instance

named = get_instance("box-flow")
F = named.extended_field

h = 1e-4
ts = np.arange(h, 1.0, h)
for label, ref in named.references:
    worst = 0.0
    for t in ts:
        xdot = (ref(t + h) - ref(t - h)) / (2 * h)
        worst = max(worst, float(np.linalg.norm(xdot - F(ref(t)))))
    end = np.round(ref(1.0), 6)
    print(f"solution '{label}': worst residual {worst:.3e}, x(1) = {end}")

d = np.linalg.norm(named.references[0][1](1.0) - named.references[1][1](1.0))
print(f"the two solutions are genuinely distinct: |x_a(1) - x_b(1)| = {d:.4f}")
