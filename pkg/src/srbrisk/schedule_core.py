"""Deterministic schedule analysis: CPM passes, feasibility, makespan and
the multi-project comparison metrics (TMS, APD, DPD).

Single instances and multi-project problems are both lowered to a flat
:class:`Network` so the rest of the library handles them uniformly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .errors import ScheduleError
from .instance_io import MultiProjectProblem, ProjectInstance, Schedule

__all__ = [
    "Network",
    "build_network",
    "resolve_starts",
    "earliest_starts",
    "latest_starts",
    "cpm_makespan",
    "FeasibilityReport",
    "validate",
    "resource_profile",
    "makespan",
    "MultiProjectMetrics",
    "multiproject_metrics",
]

Target = Union[ProjectInstance, MultiProjectProblem]


@dataclass(frozen=True, eq=False)
class Network:
    """Flattened activity-on-node network.

    Index ``i`` is a position in the flat arrays; ``keys[i]`` is the
    ``(project, activity)`` pair used in schedule files.
    """

    name: str
    keys: tuple[tuple[int, int], ...]
    durations: np.ndarray
    preds: tuple[tuple[int, ...], ...]
    succs: tuple[tuple[int, ...], ...]
    order: tuple[int, ...]
    demands: np.ndarray  # (n, n_resources)
    capacities: np.ndarray
    resource_ids: tuple[str, ...]
    release: np.ndarray
    dummy: np.ndarray
    project_of: np.ndarray
    projects: tuple[tuple[int, int], ...]  # (source index, sink index) per project
    arrivals: tuple[int, ...]
    index: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.keys)

    @property
    def arcs(self):
        for i, ss in enumerate(self.succs):
            for j in ss:
                yield i, j


def build_network(target: Target | Network) -> Network:
    if isinstance(target, Network):
        return target
    if isinstance(target, ProjectInstance):
        entries = [(target, 0)]
        global_ids: dict[str, int] = {}
        name = target.name
    elif isinstance(target, MultiProjectProblem):
        entries = [(p.instance, p.arrival) for p in target.projects]
        global_ids = dict(target.global_resources)
        name = target.name
    else:
        raise TypeError(f"expected ProjectInstance or MultiProjectProblem, got {type(target).__name__}")

    multi = isinstance(target, MultiProjectProblem)
    resource_ids: list[str] = list(global_ids)
    capacities: list[int] = list(global_ids.values())
    for p, (inst, _) in enumerate(entries, start=1):
        for rid, cap in inst.resources:
            if rid in global_ids:
                continue
            resource_ids.append(f"{p}:{rid}" if multi else rid)
            capacities.append(cap)
    col = {rid: k for k, rid in enumerate(resource_ids)}

    keys, durations, preds, succs, release, dummy, project_of, bounds = [], [], [], [], [], [], [], []
    demand_rows = []
    offset = 0
    for p, (inst, arrival) in enumerate(entries, start=1):
        ipreds = inst.predecessors()
        for act in inst.activities:
            keys.append((p, act.label))
            durations.append(act.duration)
            succs.append(tuple(offset + s for s in act.successors))
            preds.append(tuple(offset + q for q in ipreds[act.id]))
            release.append(arrival)
            dummy.append(inst.is_dummy(act.id))
            project_of.append(p - 1)
            row = np.zeros(len(resource_ids), dtype=np.int64)
            for rid, units in act.demands.items():
                c = col[rid] if rid in global_ids else col[f"{p}:{rid}" if multi else rid]
                row[c] = units
            demand_rows.append(row)
        order_local = inst.topological_order()
        bounds.append((offset + inst.source, offset + inst.sink, [offset + i for i in order_local]))
        offset += len(inst)

    order = tuple(i for _, _, o in bounds for i in o)
    n = len(keys)
    return Network(
        name=name,
        keys=tuple(keys),
        durations=np.asarray(durations, dtype=np.int64),
        preds=tuple(preds),
        succs=tuple(succs),
        order=order,
        demands=np.vstack(demand_rows) if n else np.zeros((0, len(resource_ids)), dtype=np.int64),
        capacities=np.asarray(capacities, dtype=np.int64),
        resource_ids=tuple(resource_ids),
        release=np.asarray(release, dtype=np.int64),
        dummy=np.asarray(dummy, dtype=bool),
        project_of=np.asarray(project_of, dtype=np.int64),
        projects=tuple((s, t) for s, t, _ in bounds),
        arrivals=tuple(a for _, a in entries),
        index={k: i for i, k in enumerate(keys)},
    )


def resolve_starts(schedule: Schedule, target: Target | Network) -> np.ndarray:
    """Planned start per network index.

    Missing dummy starts are derived: a project's source starts at the
    earliest start of its activities (its arrival date if it has none) and
    its sink at the latest finish of its predecessors.
    """
    net = build_network(target)
    starts = np.full(len(net), -1, dtype=np.int64)
    unknown = [k for k in schedule.starts if k not in net.index]
    if unknown:
        raise ScheduleError(f"schedule references unknown activities {sorted(unknown)[:10]}")
    for key, s in schedule.starts.items():
        starts[net.index[key]] = s
    missing = [net.keys[i] for i in range(len(net)) if starts[i] < 0 and not net.dummy[i]]
    if missing:
        raise ScheduleError(f"schedule has no start for activities {missing[:10]}")
    for p, (src, snk) in enumerate(net.projects):
        if starts[src] < 0:
            members = [i for i in range(len(net)) if net.project_of[i] == p and not net.dummy[i]]
            starts[src] = min((starts[i] for i in members), default=net.arrivals[p])
        if starts[snk] < 0:
            starts[snk] = max((starts[q] + net.durations[q] for q in net.preds[snk]), default=starts[src])
    return starts


def earliest_starts(target: Target | Network) -> np.ndarray:
    """Forward pass; release dates (project arrivals) bound every start."""
    net = build_network(target)
    es = net.release.copy()
    for j in net.order:
        for q in net.preds[j]:
            es[j] = max(es[j], es[q] + net.durations[q])
    return es


def latest_starts(target: Target | Network, horizon: int | None = None) -> np.ndarray:
    net = build_network(target)
    es = earliest_starts(net)
    if horizon is None:
        horizon = int((es + net.durations).max())
    lf = np.full(len(net), horizon, dtype=np.int64)
    ls = np.empty_like(lf)
    for j in reversed(net.order):
        for s in net.succs[j]:
            lf[j] = min(lf[j], ls[s])
        ls[j] = lf[j] - net.durations[j]
    return ls


def cpm_makespan(instance: ProjectInstance) -> tuple[int, dict[int, int]]:
    """Resource-unconstrained makespan and earliest start per activity id."""
    es = earliest_starts(instance)
    return int(es[instance.sink] + instance.activities[instance.sink].duration), {
        a.id: int(es[a.id]) for a in instance.activities
    }


@dataclass
class FeasibilityReport:
    precedence_violations: list = field(default_factory=list)  # (pred key, succ key, gap)
    resource_violations: list = field(default_factory=list)  # (resource, period, usage, capacity)
    release_violations: list = field(default_factory=list)  # (key, start, arrival)
    label: str = ""

    @property
    def feasible(self) -> bool:
        return not (self.precedence_violations or self.resource_violations or self.release_violations)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "feasible": self.feasible,
            "precedence_violations": [
                {"predecessor": list(a), "successor": list(b), "gap": int(g)} for a, b, g in self.precedence_violations
            ],
            "resource_violations": [
                {"resource": r, "period": int(t), "usage": int(u), "capacity": int(c)}
                for r, t, u, c in self.resource_violations
            ],
            "release_violations": [
                {"activity": list(k), "start": int(s), "arrival": int(a)} for k, s, a in self.release_violations
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeasibilityReport":
        return cls(
            precedence_violations=[
                (tuple(v["predecessor"]), tuple(v["successor"]), v["gap"]) for v in data["precedence_violations"]
            ],
            resource_violations=[
                (v["resource"], v["period"], v["usage"], v["capacity"]) for v in data["resource_violations"]
            ],
            release_violations=[(tuple(v["activity"]), v["start"], v["arrival"]) for v in data["release_violations"]],
            label=data.get("label", ""),
        )


def _usage(net: Network, starts: np.ndarray) -> np.ndarray:
    finish = starts + net.durations
    horizon = int(finish.max()) if len(net) else 0
    diff = np.zeros((len(net.resource_ids), horizon + 1), dtype=np.int64)
    for i in range(len(net)):
        d = net.durations[i]
        if d > 0:
            diff[:, starts[i]] += net.demands[i]
            diff[:, starts[i] + d] -= net.demands[i]
    return np.cumsum(diff, axis=1)[:, :horizon]


def resource_profile(schedule: Schedule, target: Target | Network) -> dict[str, np.ndarray]:
    """Usage per resource and period ``[0, max finish)``."""
    net = build_network(target)
    usage = _usage(net, resolve_starts(schedule, net))
    return {rid: usage[k] for k, rid in enumerate(net.resource_ids)}


def validate(schedule: Schedule, target: Target | Network) -> FeasibilityReport:
    """Check precedence, release dates and per-period resource capacities.

    Structural mismatches (unknown or missing activities) raise ScheduleError.
    """
    net = build_network(target)
    starts = resolve_starts(schedule, net)
    report = FeasibilityReport(label=schedule.label)
    for i, j in net.arcs:
        gap = int(starts[j] - (starts[i] + net.durations[i]))
        if gap < 0:
            report.precedence_violations.append((net.keys[i], net.keys[j], gap))
    for i in range(len(net)):
        if starts[i] < net.release[i]:
            report.release_violations.append((net.keys[i], int(starts[i]), int(net.release[i])))
    usage = _usage(net, starts)
    over = usage > net.capacities[:, None]
    for k, t in zip(*np.nonzero(over)):
        report.resource_violations.append((net.resource_ids[k], int(t), int(usage[k, t]), int(net.capacities[k])))
    return report


def planned_finish(schedule: Schedule, target: Target | Network) -> int:
    """Latest planned finish measured from time 0."""
    net = build_network(target)
    starts = resolve_starts(schedule, net)
    return int((starts + net.durations).max())


def makespan(schedule: Schedule, target: Target | Network) -> int:
    net = build_network(target)
    starts = resolve_starts(schedule, net)
    return int((starts + net.durations).max() - starts.min())


@dataclass(frozen=True)
class MultiProjectMetrics:
    tms: int
    apd: float
    dpd: float
    delays: tuple[int, ...]


def _merge(schedules) -> Schedule:
    if isinstance(schedules, Schedule):
        return schedules
    schedules = list(schedules)
    merged: dict = {}
    for s in schedules:
        overlap = set(merged) & set(s.starts)
        if overlap:
            raise ScheduleError(f"schedules overlap on activities {sorted(overlap)[:5]}")
        merged.update(s.starts)
    return Schedule(schedules[0].instance_name if schedules else "", merged)


def multiproject_metrics(schedules: Schedule | Iterable[Schedule], problem: MultiProjectProblem) -> MultiProjectMetrics:
    """TMS, average project delay and the sample standard deviation of delays.

    A project's delay is its span from arrival to finish minus its own
    resource-unconstrained CPM makespan.
    """
    schedule = _merge(schedules)
    net = build_network(problem)
    present = {p for p, _ in schedule.starts}
    absent = [k for k in range(1, len(problem.projects) + 1) if k not in present]
    if absent:
        raise ScheduleError(f"no schedule for project(s) {absent}")
    starts = resolve_starts(schedule, net)
    finish = starts + net.durations
    delays = []
    finishes = []
    for p, entry in enumerate(problem.projects):
        members = net.project_of == p
        f = int(finish[members].max())
        finishes.append(f)
        delays.append(f - entry.arrival - cpm_makespan(entry.instance)[0])
    n = len(delays)
    apd = sum(delays) / n
    dpd = math.sqrt(sum((d - apd) ** 2 for d in delays) / (n - 1)) if n > 1 else 0.0
    tms = max(finishes) - min(e.arrival for e in problem.projects)
    return MultiProjectMetrics(tms=tms, apd=apd, dpd=dpd, delays=tuple(delays))
