"""Regenerate the shipped PSPLib-style fixtures under src/srbrisk/data.

    python tools/make_fixtures.py

Instances imitate the j30 set: 30 real jobs, 4 renewable resources,
durations 1..10, one to three successors per job and capacities set from a
resource-strength parameter so the resources bind.
"""
import os

import numpy as np

from srbrisk.instance_io import (
    Activity,
    ProjectInfo,
    ProjectInstance,
    make_instance,
    schedule_from_starts,
    write_instance,
    write_schedule,
)
from srbrisk.schedule_core import cpm_makespan, earliest_starts

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "src", "srbrisk", "data")


def random_instance(name, seed, n_jobs=30, n_res=4, strength=0.25):
    rng = np.random.default_rng(seed)
    n = n_jobs + 2
    succ = {i: set() for i in range(n)}
    # jobs 1..3 start the network; every later job gets a predecessor first
    for j in range(4, n_jobs + 1):
        i = int(rng.integers(max(1, j - 10), j))
        succ[i].add(j)
    for i in range(1, n_jobs + 1):
        extra = int(rng.integers(0, 3))
        for _ in range(extra):
            if i + 1 <= n_jobs:
                j = int(rng.integers(i + 1, min(n_jobs, i + 12) + 1))
                succ[i].add(j)
    has_pred = {j for s in succ.values() for j in s}
    for j in range(1, n_jobs + 1):
        if j not in has_pred:
            succ[0].add(j)
        if not succ[j]:
            succ[j].add(n - 1)
    durations = [0] + [int(x) for x in rng.integers(1, 11, n_jobs)] + [0]
    res = [f"R{k}" for k in range(1, n_res + 1)]
    demands = [dict.fromkeys(res, 0)]
    for _ in range(n_jobs):
        d = dict.fromkeys(res, 0)
        for r in rng.choice(res, size=int(rng.integers(1, 3)), replace=False):
            d[str(r)] = int(rng.integers(1, 11))
        demands.append(d)
    demands.append(dict.fromkeys(res, 0))
    acts = [
        Activity(i, durations[i], demands[i], tuple(sorted(succ[i])), i + 1)
        for i in range(n)
    ]
    draft = ProjectInstance(name, tuple(acts), tuple((r, 1000) for r in res))
    es = earliest_starts(draft)
    caps = []
    for r in res:
        kmin = max(a.demands[r] for a in acts)
        usage = np.zeros(int((es + [a.duration for a in acts]).max()) + 1, dtype=int)
        for a in acts:
            usage[es[a.id] : es[a.id] + a.duration] += a.demands[r]
        kmax = int(usage.max())
        caps.append((r, int(kmin + round(strength * (kmax - kmin)))))
    mpm = cpm_makespan(draft)[0]
    return ProjectInstance(
        name,
        tuple(acts),
        tuple(caps),
        horizon=sum(durations),
        info=ProjectInfo(0, mpm, int(rng.integers(1, 40)), mpm),
        generator_seed=int(seed),
    )


def write(name, text):
    with open(os.path.join(DATA, name), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main():
    os.makedirs(DATA, exist_ok=True)
    for k, (seed, strength) in enumerate([(11, 0.25), (23, 0.3), (37, 0.2)], start=1):
        inst = random_instance(f"j30_{k:02d}", seed, strength=strength)
        write(f"j30_{k:02d}.sm", write_instance(inst))

    chain = make_instance([4, 3], [(1, 2)], [{"R1": 1}, {"R1": 1}], {"R1": 1}, name="chain2")
    write("chain2.sm", write_instance(chain))
    write("chain2_plan.csv", write_schedule(schedule_from_starts(chain, {0: 0, 1: 0, 2: 4, 3: 7}, "plan")))

    minimal = make_instance([], [], None, {"R1": 1}, name="minimal")
    write("minimal.sm", write_instance(minimal))

    overlap = make_instance([1, 1], [], [{"R1": 1}, {"R1": 1}], {"R1": 1}, name="overlap")
    write("overlap.sm", write_instance(overlap))
    write("overlap_bad.csv", write_schedule(schedule_from_starts(overlap, {1: 0, 2: 0}, "bad")))
    write("overlap_ok.csv", write_schedule(schedule_from_starts(overlap, {1: 0, 2: 1}, "ok")))

    write(
        "mp_demo.txt",
        "# two j30-style projects sharing resource R1\n"
        "problem mp_demo\n"
        "project A j30_01.sm 0\n"
        "project B j30_02.sm 4\n"
        "global R1 14\n",
    )


if __name__ == "__main__":
    main()
