"""
How modelling choices move the risk value
=========================================

Same schedule, same cvs; only the duration family or the assumption about
partly finished activities changes.
"""
from srbrisk import build_model, load_instance, serial_sgs, srb_curve, srv
from srbrisk.data import fixture_path

inst = load_instance(fixture_path("j30_03.sm"))
sched = serial_sgs(inst, "min-slack")

print("family        SRV     SRB(0)")
for family in ("lognormal", "normal", "triangular", "beta", "uniform"):
    model = build_model(inst, family=family, cv_seed=4, replications=10_000)
    curve = srb_curve(sched, inst, model)
    print(f"{family:12s} {srv(curve):7.2f}  {curve.variance[0]:6.2f}")

print()
model = build_model(inst, cv_seed=4, replications=10_000)
for ongoing in ("linear", "all-or-nothing"):
    for start in ("ready-time", "precedence-only"):
        curve = srb_curve(sched, inst, model, ongoing=ongoing, start_policy=start)
        print(f"ongoing {ongoing:15s} start {start:16s} SRV {srv(curve):7.2f}")
