"""Serial schedule generation scheme (SGS) with priority rules.

Only used to produce feasible alternative schedules to feed the risk
ranking; the schedules are not meant to be makespan-optimal.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import UnschedulableError, ValidationError
from .instance_io import Schedule
from .schedule_core import build_network, earliest_starts, latest_starts, makespan

__all__ = ["RULES", "PriorityRule", "serial_sgs", "generate_candidates", "same_makespan_candidates"]

RULES = ("min-slack", "latest-finish", "shortest-duration", "most-successors", "random")


@dataclass(frozen=True)
class PriorityRule:
    name: str
    seed: int | None = None

    def __post_init__(self):
        if self.name not in RULES:
            raise ValidationError(f"unknown priority rule {self.name!r}; choose from {RULES}")
        if self.name == "random" and self.seed is None:
            object.__setattr__(self, "seed", 0)

    @classmethod
    def parse(cls, text: "str | PriorityRule") -> "PriorityRule":
        """Accept ``min-slack`` style names and ``random:<seed>``."""
        if isinstance(text, PriorityRule):
            return text
        name, _, seed = text.partition(":")
        return cls(name, int(seed) if seed else None)

    def __str__(self):
        return f"random:{self.seed}" if self.name == "random" else self.name


def _transitive_successor_counts(net) -> np.ndarray:
    reach = [set() for _ in range(len(net))]
    for j in reversed(net.order):
        for s in net.succs[j]:
            reach[j].add(s)
            reach[j] |= reach[s]
    return np.array([len(r) for r in reach])


def _priorities(net, rule: PriorityRule) -> np.ndarray:
    if rule.name in ("min-slack", "latest-finish"):
        es = earliest_starts(net)
        ls = latest_starts(net)
        if rule.name == "min-slack":
            return ls - es
        return ls + net.durations
    if rule.name == "shortest-duration":
        return net.durations.copy()
    if rule.name == "most-successors":
        return -_transitive_successor_counts(net)
    return np.random.default_rng(rule.seed).permutation(len(net))


def serial_sgs(target, rule: "str | PriorityRule" = "min-slack", label: str | None = None) -> Schedule:
    """Schedule activities one at a time, lowest priority value first
    (ties by position), each at its earliest precedence- and
    resource-feasible period."""
    rule = PriorityRule.parse(rule)
    net = build_network(target)
    n = len(net)
    too_big = [net.keys[i] for i in range(n) if np.any(net.demands[i] > net.capacities)]
    if too_big:
        raise UnschedulableError(f"activities {too_big[:10]} demand more than a resource's capacity")

    prio = _priorities(net, rule)
    horizon = int(net.durations.sum() + net.release.max() + 1)
    free = np.repeat(net.capacities[:, None], horizon, axis=1)
    start = np.full(n, -1, dtype=np.int64)
    waiting = [len(p) for p in net.preds]
    eligible = {i for i in range(n) if waiting[i] == 0}
    while eligible:
        j = min(eligible, key=lambda i: (prio[i], i))
        eligible.remove(j)
        d = int(net.durations[j])
        dem = net.demands[j][:, None]
        t = int(max([net.release[j]] + [start[q] + net.durations[q] for q in net.preds[j]]))
        if d > 0 and dem.any():
            while True:
                if t + d > free.shape[1]:
                    free = np.hstack([free, np.repeat(net.capacities[:, None], horizon, axis=1)])
                if np.all(free[:, t : t + d] >= dem):
                    break
                t += 1
            free[:, t : t + d] -= dem
        start[j] = t
        for s in net.succs[j]:
            waiting[s] -= 1
            if waiting[s] == 0:
                eligible.add(s)
    return Schedule(
        instance_name=net.name,
        starts={net.keys[i]: int(start[i]) for i in range(n)},
        label=str(rule) if label is None else label,
    )


def generate_candidates(target, rules=("min-slack", "latest-finish", "shortest-duration", "most-successors"),
                        random_seeds=range(0)) -> list[Schedule]:
    """Distinct SGS schedules for the given rules plus ``random:<seed>`` rules.

    Duplicates (identical start vectors) keep the first rule's label.
    """
    seen = {}
    for rule in list(rules) + [PriorityRule("random", s) for s in random_seeds]:
        sched = serial_sgs(target, rule)
        key = tuple(sorted(sched.starts.items()))
        seen.setdefault(key, sched)
    return list(seen.values())


def same_makespan_candidates(target, minimum: int = 4, random_seeds=range(100), limit: int | None = None) -> list[Schedule]:
    """Distinct SGS schedules sharing one makespan.

    Picks the shortest makespan reached by at least ``minimum`` distinct
    schedules, falling back to the most frequent makespan.
    """
    cands = generate_candidates(target, random_seeds=random_seeds)
    spans = [makespan(c, target) for c in cands]
    counts = Counter(spans)
    ok = sorted(m for m, c in counts.items() if c >= minimum)
    chosen = ok[0] if ok else counts.most_common(1)[0][0]
    picked = [c for c, m in zip(cands, spans) if m == chosen]
    return picked[:limit] if limit else picked
