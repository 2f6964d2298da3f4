"""
Reading an instance and its critical path
=========================================

Load one of the shipped j30-style instances, look at its resources and
compute the resource-free critical path length.
"""
from srbrisk import cpm_makespan, load_instance
from srbrisk.data import fixture_path

inst = load_instance(fixture_path("j30_01.sm"))
print(inst.name, len(inst), "activities")
print("capacities:", dict(inst.resources))

# earliest starts ignoring resources; the makespan is a lower bound for
# any resource-feasible schedule
span, es = cpm_makespan(inst)
print("critical path length:", span)
print("earliest starts of the first ten jobs:", [es[i] for i in range(1, 11)])
