"""Moduli of smoothness and discrete Besov seminorms.

Tabulates the sup and averaged moduli of t^(1/4) over a dyadic range of
u, checks their equivalence numerically, and watches the truncated
Besov seminorm converge as the dyadic depth grows.
"""

import numpy as np

from stgreedy import (BesovParams, DomainSpec, SmoothnessParams, besov_terms,
                      make_test_field, modulus_avg, modulus_sup)

dom = DomainSpec(T=1.0, n=1)
f = make_test_field("time-power", [0.25], dom)
I = (0.0, 1.0)

print("== moduli of t^(1/4), r = 1, p = 2 ==")
sp = SmoothnessParams(r=1, p=2)
print(f"  {'u':>10s} {'omega_r':>12s} {'w_r':>12s} {'omega/w((r+1)u)':>16s}")
for k in range(2, 11):
    u = 2.0 ** -k
    om = modulus_sup(f, I, u, sp)
    w = modulus_avg(f, I, u, sp)
    wide = modulus_avg(f, I, 2 * u, sp)
    print(f"  {u:10.5f} {om:12.6f} {w:12.6f} {om / wide:16.3f}")
print("  (w_r <= omega_r; the last column is the equivalence constant)")

print("\n== discrete Besov seminorm of t^(1/2), s = 0.9, p = q = 2 ==")
fs = make_test_field("time-power", [0.5], dom)
terms = besov_terms(fs, I, BesovParams(s=0.9, q=2.0, kmax=16))
partial = np.sqrt(np.cumsum(terms ** 2))
for k in (0, 2, 4, 8, 12, 16):
    print(f"  kmax={k:2d}: term {terms[k]:.5f}  partial seminorm {partial[k]:.5f}")
tail = (partial[-1] - partial[-2]) / partial[-1]
print(f"  relative increment at the last level: {tail:.4f}")
