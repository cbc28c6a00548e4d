"""Splitting, the penalty G and a short recursive induction trace."""
import io

from osc_lab import UNIT, StepFunction, big_w
from osc_lab.bellman import (BellmanParams, concavity_margins, epsilon_tilde, g_value,
                             scale_to_budget, simulate_induction, split_search, verify_split)
from osc_lab.weights import exp_weight, power

Q, eps = power(2), 1.0

print("== 1. G only bites when C < eps and V_eps > Q(eps) =====")
for m in (-1.0, 0.5, 2.0):
    print(f"   constant {m:+.1f}:  G = {g_value(StepFunction.constant(m), UNIT, eps, Q)}")

print("== 2. bring phi into the class W <= Q(eps~) ============")
base = StepFunction(UNIT, [0.3, 0.2, 0.5], [0.0, 1.6, -0.8])
s = scale_to_budget(lambda s: big_w(base * s, UNIT, Q).value, 0.5, 0.0)
phi = base * s
w = big_w(phi, UNIT, Q).value
et = epsilon_tilde(phi, UNIT, eps, Q, w_value=w)
params = BellmanParams.choose(Q, eps, et)
print(f"   scale {s:.4f}: W = {w:.6f}, eps~ = {et}, delta = {params.delta:.4f}")

print("== 3. split the interval =============================")
sp = split_search(phi, UNIT, params, Q)
p0, p1, ptt = verify_split(phi, UNIT, sp, Q)
print(f"   t = {sp.t:.10f} in [{params.delta:.4f}, {1 - params.delta:.4f}]")
print(f"   Psi(t,0) = {p0:.8f}, Psi(t,1) = {p1:.8f}  (budget Q(eps) = {float(Q(eps))})")
print(f"   Psi(t,t) = {ptt:.12f}")

print("== 4. G is concave along concatenations ==============")
pm = StepFunction(UNIT, [0.5, 0.5], [-0.4, 0.1])
pp = StepFunction(UNIT, [0.3, 0.7], [0.2, -0.1])
print("   margins:", concavity_margins(pm, pp, eps, exp_weight(), [0.2, 0.5, 0.8]))

print("== 5. recursive splitting, depth 3 ===================")
res = simulate_induction(phi - float(phi.values.min()), UNIT, eps, Q, depth=3)
print("   S_N by depth:", res.sums)
buf = io.StringIO()
res.write_trace(buf)
print("   first rows of the trace:")
for line in buf.getvalue().splitlines()[:5]:
    print("     ", line)
