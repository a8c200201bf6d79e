"""Polynomial approximation of vector-valued slices.

Shows the orthonormal time basis, the L2 projection and its best-error
identity, the near-median constant construction, and the quasi-best
approximant it drives.  The last section checks that the measured
approximation error is controlled by the averaged modulus (the content
of the constructive estimate) on a family of shrinking intervals.
"""

import numpy as np

from stgreedy import (DomainSpec, SmoothnessParams, best_error,
                      jackson_construct, lp_error, make_test_field,
                      median_constant, modulus_avg, node_norm,
                      orthonormal_time_basis, project_time_slice,
                      whitney_ratio)

dom = DomainSpec(T=1.0, n=1)
f = make_test_field("time-power", [0.25], dom)

print("== orthonormal basis on [0, 1) ==")
basis = orthonormal_time_basis((0, 1), 3)
ts = np.array([0.0, 0.5, 1.0])
print("  W_j at t = 0, 1/2, 1:")
print(np.array_str(basis.eval(ts).T, precision=4))

print("\n== projection and best error, f = t^(1/4) ==")
for L in (1.0, 0.5, 0.25):
    e1 = best_error(f, (0, L), 1)
    e2 = best_error(f, (0, L), 2)
    print(f"  I = [0,{L:5.2f}):  E_1 = {e1:.6f}   E_2 = {e2:.6f}")
print("  (halving |I| scales E_1 by ~2^-0.75 near the singularity)")

print("\n== near-median constants ==")
a0 = median_constant(f, (0, 1), 2)
print(f"  minimizing constant for p=2 on [0,1): {a0.mu:.6f}")
a0 = median_constant(f, (0, 1), 1)
print(f"  minimizing constant for p=1 on [0,1): {a0.mu:.6f}")

print("\n== constructive approximant vs averaged modulus, p = 1 ==")
sp = SmoothnessParams(r=2, p=1)
for L in (1.0, 0.5, 0.25, 0.125):
    P = jackson_construct(f, (0, L), 2, 1)
    err = lp_error(f, P, 1)
    w = modulus_avg(f, (0, L), L / 4, sp)
    print(f"  |I| = {L:5.3f}:  error^p/w_r^p = {(err / w):10.4f}")

print("\n== Whitney ratio stability, f = t^(1/4), (r,p,q,s) = (1,2,2,0.7) ==")
for L in (1.0, 0.5, 0.25, 0.125):
    print(f"  |I| = {L:5.3f}: ratio = {whitney_ratio(f, (0, L), 1, 2, 2, 0.7):.5f}")

print("\n== node-value norm ==")
ft = make_test_field("poly", [1, 0], dom)
P = project_time_slice(ft, (0, 1), 2)
print(f"  max node value of the interpolant of t: {node_norm(P):.6f}")
