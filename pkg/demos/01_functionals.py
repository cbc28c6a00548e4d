"""Walk through V_c, V and W on a few hand-made step functions."""
import math

import numpy as np

from osc_lab import UNIT, Interval, StepFunction, big_w, grid_oracle_w, minimize_c, v_c
from osc_lab.weights import cosh_weight, exp_weight, power

print("== 1. a step function is lengths + values =============")
chi = StepFunction(UNIT, [0.5, 0.5], [1.0, 0.0])
print("   chi:", chi)
print("   chi(0.25), chi(0.5):", chi(0.25), chi(0.5))

print("== 2. V_c averages Q(phi - c) ==========================")
for c in (0.0, 0.25, 0.5):
    print(f"   V_c(chi, power:2) at c={c}:", v_c(chi, UNIT, c, power(2)))

print("== 3. V minimises over c ===============================")
for Q in (power(1), power(2), exp_weight(), cosh_weight()):
    r = minimize_c(chi, UNIT, Q)
    print(f"   {Q.descriptor:<8} V={r.value:.12f}  c*={r.c_star:.12f}  unique={r.c_star_unique}")
print("   sqrt(e) for comparison:", math.sqrt(math.e))

print("== 4. W takes the sup over subintervals ================")
phi = StepFunction(UNIT, [0.2, 0.05, 0.35, 0.4], [0.0, 2.5, -1.0, 0.5])
for Q in (power(2), exp_weight()):
    w = big_w(phi, UNIT, Q)
    o = grid_oracle_w(phi, UNIT, Q, resolution=256)
    print(f"   {Q.descriptor:<8} W={w.value:.10f} on [{w.witness.a:.5f}, {w.witness.b:.5f}]"
          f"  grid(256)={o.value:.10f}")

print("== 5. W on a subinterval can only be smaller ===========")
J = Interval(0.3, 0.9)
print("   W(phi, [0.3, 0.9]):", big_w(phi, J, power(2)).value)
print("   W(phi, [0, 1])    :", big_w(phi, UNIT, power(2)).value)

print("== 6. shifting phi leaves V and W alone ================")
print("   V(phi + 7):", minimize_c(phi + 7.0, UNIT, power(2)).value)
print("   V(phi)    :", minimize_c(phi, UNIT, power(2)).value)
print("   values of phi + 7:", np.round((phi + 7.0).values, 3))
