"""Decreasing rearrangement against W, BMO norms and A2 characteristics."""
import numpy as np

from osc_lab import (UNIT, StepFunction, a2_report, big_w, norm_report, rearrange_decreasing,
                     truncate, verify_rearrangement, weight_from_phi)
from osc_lab.harness.rng import gen_random_step
from osc_lab.weights import cosh_weight, exp_weight, power

print("== 1. rearranging sorts the values, keeps the masses ===")
phi = StepFunction(UNIT, [0.25] * 4, [0.0, 1.0, 0.0, 1.0])
star = rearrange_decreasing(phi)
print("   phi :", phi)
print("   phi*:", star)

print("== 2. W(phi*) <= W(phi) for every weight ==============")
phi = gen_random_step(2024, k_max=6)
print("   random phi:", phi)
for Q in (power(1), power(1.5), power(2), exp_weight(), cosh_weight()):
    rec = verify_rearrangement(phi, Q)
    print(f"   {Q.descriptor:<9} W(phi*)={rec.lhs:.8f}  W(phi)={rec.rhs:.8f}  {rec.status}")

print("== 3. the two BMO norms and their sandwich =============")
for p in (1, 2, 3):
    r = norm_report(phi, p)
    print(f"   p={p}: inf-variant {r.norm_inf_variant:.6f} <= classic {r.norm_classic_variant:.6f}"
          f" <= 2x {2 * r.norm_inf_variant:.6f}  ok={r.sandwich_ok()}")

print("== 4. A2 for w = exp(phi) ==============================")
w = weight_from_phi(phi)
r = a2_report(w)
print(f"   <<w>> = {r.char_inf_variant:.6f},  [w]_A2 = {r.char_classic:.6f}")
print(f"   <<w*>> = {big_w(rearrange_decreasing(phi), UNIT, exp_weight()).value:.6f}")

print("== 5. truncation is a 1-Lipschitz map =================")
tr = truncate(phi, -1.0, 1.0)
print("   values before:", np.round(phi.values, 3))
print("   values after :", np.round(tr.values, 3))
print("   W before/after (power:2):",
      big_w(phi, UNIT, power(2)).value, big_w(tr, UNIT, power(2)).value)
