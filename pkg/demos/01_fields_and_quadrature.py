"""Fields and quadrature: the ground layer.

Builds a few corpus fields, evaluates them pointwise, and shows how the
composite Gauss rules hold up on smooth versus singular integrands --
including the geometrically graded panels used whenever an integrand
has a power singularity at the left endpoint.
"""

import numpy as np

from stgreedy import DomainSpec, eval_field, gauss_interval_rule, \
    integrate_interval, interval_grid, make_test_field, x_norm
from stgreedy.quadrature import graded_nodes

dom = DomainSpec(T=1.0, n=1)

print("== corpus fields ==")
for name, params, t, x in [("constant", [3.0], 0.5, 0.5),
                           ("time-power", [0.25], 0.0625, 0.3),
                           ("space-power", [2.0], 0.1, 0.5),
                           ("tensor-singular", [0.25], 0.0625, 0.5)]:
    f = make_test_field(name, params, dom)
    print(f"  {name}{tuple(params)} at (t={t}, x={x}) -> {eval_field(f, t, [x]):.6f}")

print("\n== interval quadrature ==")
rule = gauss_interval_rule()
v = integrate_interval(lambda t: t ** 2, (0, 1), rule, 1)
print(f"  int t^2 dt        = {v:.15f}  (exact 1/3, error {abs(v - 1/3):.1e})")

# t^0.25 integrates to 0.8; uniform panels converge slowly near t = 0
for panels in (8, 64):
    v = integrate_interval(lambda t: t ** 0.25, (0, 1), rule, panels)
    print(f"  int t^0.25, {panels:3d} uniform panels: error {abs(v - 0.8):.2e}")
ts, ws = graded_nodes(0.0, 1.0)
v = float(np.dot(ws, ts ** 0.25))
print(f"  int t^0.25, graded panels:      error {abs(v - 0.8):.2e}")

print("\n== L2(Omega) norms on the fixed spatial grid ==")
grid = interval_grid()
print(f"  ||x||_L2(0,1)  = {x_norm(lambda p: p[:, 0], grid):.12f}  "
      f"(exact 1/sqrt(3) = {1/np.sqrt(3):.12f})")
print(f"  ||2||_L2(0,1)  = {x_norm(lambda p: 2.0 * np.ones(len(p)), grid):.12f}")
