"""
The risk baseline of a two-activity chain
=========================================

A (mean 4, sd 1) followed by B (mean 3, sd 1). While A runs, the remaining
variance shrinks linearly with its remaining work; once A is done only B's
uncertainty is left. The simulated curve is printed next to the closed form.
"""
import numpy as np

from srbrisk import build_model, make_instance, schedule_from_starts, srb_curve, srv

inst = make_instance([4, 3], [(1, 2)], name="chain")
plan = schedule_from_starts(inst, {1: 0, 2: 4}, "plan")
model = build_model(inst, cvs={(1, 2): 0.25, (1, 3): 1 / 3}, replications=50_000)

# precedence-only: B may start as soon as A finishes, even ahead of plan
curve = srb_curve(plan, inst, model, start_policy="precedence-only")


def exact(t):
    if t <= 4:
        return (1 - t / 4) ** 2 + 1
    return (1 - (t - 4) / 3) ** 2


print(" t  simulated  exact")
for t, v, _, _ in curve.points:
    print(f"{t:2d}  {v:9.4f}  {exact(t):.4f}")
print("SRV", round(srv(curve), 4), "vs", round(np.trapezoid([exact(t) for t in range(8)]), 4))

# the same plan under the default ready-time policy: B never starts early,
# so an early finish of A is absorbed and the variance at t=0 is smaller
print("ready-time SRB(0):", round(srb_curve(plan, inst, model).variance[0], 4))
