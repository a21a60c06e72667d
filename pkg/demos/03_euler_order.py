"""First-order convergence of the explicit Euler trajectories.

The horizontal drift fixture has the closed-form solution
x(t) = (1 - e^{-t}, -1) from (0, -1) once the field is extended to the
plane.  Halving the step size should roughly halve the sup-error of the
piecewise-affine trajectory, and the interpolation defect shrinks the same
way.
"""

import numpy as np

from mflow import euler_defect, euler_eval, euler_nodes, get_instance

named = get_instance("lens-drift")
ref = named.references[0][1]
x0 = np.array([0.0, -1.0])
tgrid = np.linspace(0.0, 1.0, 2001)

print("lambda   sup_error    ratio    sup_defect")
prev = None
for lam in (0.2, 0.1, 0.05, 0.025):
    nodes = euler_nodes(named.extended_field, x0, lam, int(round(1.0 / lam)))
    sup_err = max(
        np.linalg.norm(euler_eval(nodes, lam, t) - ref(t)) for t in tgrid
    )
    interior = [t for t in tgrid if 0 < t < 1 and abs(t / lam - round(t / lam)) > 1e-9]
    sup_defect = max(
        np.linalg.norm(euler_defect(named.extended_field, nodes, lam, t))
        for t in interior
    )
    ratio = "" if prev is None else f"{sup_err / prev:.3f}"
    print(f"{lam:6.3f}   {sup_err:.3e}   {ratio:>5}    {sup_defect:.3e}")
    prev = sup_err
