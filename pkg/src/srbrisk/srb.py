"""Schedule Risk Baseline curves and Schedule Risk Values.

At each control period ``t`` the project is assumed to have run exactly as
planned up to ``t``; the remaining uncertainty is simulated and the variance
of the total project duration is recorded. The area under that curve is the
schedule's risk value, used to rank equal-duration schedules.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InfeasibleScheduleError, ScheduleError, ValidationError
from .instance_io import Schedule
from .schedule_core import Network, build_network, resolve_starts, validate
from .uncertainty import DurationModel, DurationSpec, sample_duration

__all__ = [
    "ONGOING_POLICIES",
    "START_POLICIES",
    "CHUNK",
    "ControlGrid",
    "ConditionalSpec",
    "conditional_spec",
    "deviate_table",
    "simulate_duration",
    "simulate_totals",
    "SRBCurve",
    "srb_curve",
    "srv",
    "srv_standard_error",
    "ScheduleResult",
    "RiskReport",
    "rank_schedules",
]

ONGOING_POLICIES = ("linear", "all-or-nothing")
START_POLICIES = ("ready-time", "precedence-only")

# Replications are drawn and simulated in blocks of this many rows. Block k
# always uses the same generator, whatever the worker count.
CHUNK = 2048


@dataclass(frozen=True)
class ControlGrid:
    times: tuple[int, ...]

    def __post_init__(self):
        t = tuple(int(x) for x in self.times)
        object.__setattr__(self, "times", t)
        if not t or t[0] != 0:
            raise ValidationError("control grid must start at 0")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValidationError("control grid must be strictly increasing")

    @classmethod
    def regular(cls, t_f: int, step: int = 1) -> "ControlGrid":
        if step < 1:
            raise ValidationError("grid step must be >= 1")
        times = list(range(0, t_f, step)) + [t_f]
        return cls(tuple(times) if t_f > 0 else (0,))

    @property
    def end(self) -> int:
        return self.times[-1]

    def __len__(self):
        return len(self.times)


class ConditionalSpec(NamedTuple):
    case: str  # "finished", "ongoing" or "unstarted"
    spec: DurationSpec  # duration still to run (full duration when unstarted)
    elapsed: float


def conditional_spec(spec: DurationSpec, planned_start: int, t: float, policy: str = "linear") -> ConditionalSpec:
    """What is still uncertain about one activity at control time ``t``,
    given execution went exactly as planned until then."""
    mu = spec.mean
    finish = planned_start + mu
    if finish <= t:
        return ConditionalSpec("finished", DurationSpec.fixed(mu), float(mu))
    if planned_start < t:
        elapsed = t - planned_start
        remaining = mu - elapsed
        if spec.is_deterministic:
            rem_spec = DurationSpec.fixed(remaining)
        elif policy == "linear":
            # sd shrinks with the remaining fraction, so the cv is unchanged
            rem_spec = DurationSpec(spec.family, remaining, spec.cv)
        elif policy == "all-or-nothing":
            rem_spec = DurationSpec(spec.family, remaining, spec.sd / remaining)
        else:
            raise ValidationError(f"unknown ongoing policy {policy!r}")
        return ConditionalSpec("ongoing", rem_spec, float(elapsed))
    return ConditionalSpec("unstarted", spec, 0.0)


def deviate_table(seed: int, replications: int, n_activities: int, start: int = 0) -> np.ndarray:
    """Standard-normal deviates for replications ``[start, replications)``.

    Row ``r`` depends only on ``(seed, r)``: block ``r // CHUNK`` has its own
    generator, spawned from the seed.
    """
    if start % CHUNK:
        raise ValueError("start must be a multiple of CHUNK")
    blocks = []
    for b in range(start // CHUNK, -(-replications // CHUNK)):
        rows = min(CHUNK, replications - b * CHUNK)
        ss = np.random.SeedSequence(seed, spawn_key=(b,))
        blocks.append(np.random.Generator(np.random.PCG64(ss)).standard_normal((rows, n_activities)))
    if not blocks:
        return np.zeros((0, n_activities))
    return np.vstack(blocks)


def _specs_for(net: Network, model: DurationModel) -> list[DurationSpec]:
    specs = []
    missing = []
    for i, key in enumerate(net.keys):
        spec = model.spec_for(key)
        if spec is None:
            if net.dummy[i] or net.durations[i] == 0:
                spec = DurationSpec.fixed(net.durations[i])
            else:
                missing.append(key)
                continue
        elif spec.mean != net.durations[i]:
            raise ValidationError(f"activity {key}: model mean {spec.mean} differs from planned duration {net.durations[i]}")
        specs.append(spec)
    if missing:
        raise ValidationError(f"duration model has no spec for activities {missing[:10]}")
    return specs


def _totals(net, starts, specs, times, z, ongoing, start_policy) -> np.ndarray:
    """Total project duration per (control time, replication)."""
    n_rep = z.shape[0]
    dur = net.durations.astype(float)
    full = np.empty((n_rep, len(net)))
    for j, spec in enumerate(specs):
        full[:, j] = sample_duration(spec, z[:, j])
    out = np.empty((len(times), n_rep))
    finish = np.empty((n_rep, len(net)))
    for k, t in enumerate(times):
        for j in net.order:
            s = starts[j]
            if s + dur[j] <= t:
                finish[:, j] = s + dur[j]
            elif s < t:
                cond = conditional_spec(specs[j], int(s), t, ongoing)
                finish[:, j] = t + sample_duration(cond.spec, z[:, j])
            else:
                # dummies are milestones: a ready time on the sink would hide early finishes
                if start_policy == "ready-time" and not net.dummy[j]:
                    ready = float(s)
                else:
                    ready = float(max(t, net.release[j]))
                begin = np.full(n_rep, ready)
                for q in net.preds[j]:
                    np.maximum(begin, finish[:, q], out=begin)
                finish[:, j] = begin + full[:, j]
        out[k] = finish.max(axis=1)
    return out


def _check_policies(ongoing, start_policy):
    if ongoing not in ONGOING_POLICIES:
        raise ValidationError(f"unknown ongoing policy {ongoing!r}; choose from {ONGOING_POLICIES}")
    if start_policy not in START_POLICIES:
        raise ValidationError(f"unknown start policy {start_policy!r}; choose from {START_POLICIES}")


def simulate_duration(
    schedule: Schedule,
    target,
    model: DurationModel,
    t: float,
    z,
    ongoing: str = "linear",
    start_policy: str = "ready-time",
) -> float:
    """Total project duration of one replication driven by deviates ``z``
    (one per network activity, in network order)."""
    _check_policies(ongoing, start_policy)
    net = build_network(target)
    z = np.asarray(z, dtype=float).reshape(1, -1)
    if z.shape[1] != len(net):
        raise ValueError(f"need {len(net)} deviates, got {z.shape[1]}")
    starts = resolve_starts(schedule, net)
    return float(_totals(net, starts, _specs_for(net, model), [t], z, ongoing, start_policy)[0, 0])


def simulate_totals(
    schedule: Schedule,
    target,
    model: DurationModel,
    times: Sequence[float],
    deviates=None,
    ongoing: str = "linear",
    start_policy: str = "ready-time",
    workers: int = 1,
) -> np.ndarray:
    """Simulated total durations, shape ``(len(times), replications)``.

    Deviates default to :func:`deviate_table` for the model's seed and
    replication count; the result does not depend on ``workers``.
    """
    _check_policies(ongoing, start_policy)
    net = build_network(target)
    starts = resolve_starts(schedule, net)
    specs = _specs_for(net, model)
    times = [float(t) for t in times]
    if deviates is not None:
        deviates = np.asarray(deviates, dtype=float)
        if deviates.ndim != 2 or deviates.shape[1] != len(net):
            raise ValueError(f"deviates must have shape (replications, {len(net)})")
        blocks = [deviates[i : i + CHUNK] for i in range(0, deviates.shape[0], CHUNK)]

        def run(block):
            return _totals(net, starts, specs, times, block, ongoing, start_policy)

    else:
        n = model.replications
        blocks = list(range(-(-n // CHUNK)))

        def run(b):
            z = deviate_table(model.seed, min(n, (b + 1) * CHUNK), len(net), start=b * CHUNK)
            return _totals(net, starts, specs, times, z, ongoing, start_policy)

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    return np.concatenate(parts, axis=1)


@dataclass
class SRBCurve:
    label: str
    times: np.ndarray
    variance: np.ndarray
    mean: np.ndarray
    sd: np.ndarray
    replications: int
    seed: int
    planned: int
    totals: np.ndarray | None = field(default=None, repr=False)

    @property
    def points(self) -> list[tuple[int, float, float, float]]:
        return [
            (int(t), float(v), float(m), float(s)) for t, v, m, s in zip(self.times, self.variance, self.mean, self.sd)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "variance", "mean", "sd"])
        for t, v, m, s in self.points:
            w.writerow([t, repr(v), repr(m), repr(s)])
        return buf.getvalue()

    def to_gnuplot(self) -> str:
        lines = [f"# SRB {self.label}: control period, variance"]
        lines += [f"{t} {v!r}" for t, v, _, _ in self.points]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, label: str = "", replications: int = 0, seed: int = 0) -> "SRBCurve":
        rows = list(csv.DictReader(io.StringIO(text)))
        times = np.array([int(r["t"]) for r in rows])
        return cls(
            label=label,
            times=times,
            variance=np.array([float(r["variance"]) for r in rows]),
            mean=np.array([float(r["mean"]) for r in rows]),
            sd=np.array([float(r["sd"]) for r in rows]),
            replications=replications,
            seed=seed,
            planned=int(times[-1]) if len(times) else 0,
        )


def _curve_from_totals(label, times, totals, planned, replications, seed, t_end):
    variance = totals.var(axis=1, ddof=1)
    mean = totals.mean(axis=1)
    terminal = times == t_end
    # nothing is left to vary once the planned finish is reached
    variance[terminal] = 0.0
    mean[terminal] = float(planned)
    return SRBCurve(
        label=label,
        times=np.asarray(times, dtype=np.int64),
        variance=variance,
        mean=mean,
        sd=np.sqrt(variance),
        replications=replications,
        seed=seed,
        planned=planned,
        totals=totals,
    )


def srb_curve(
    schedule: Schedule,
    target,
    model: DurationModel,
    grid: ControlGrid | int | None = None,
    ongoing: str = "linear",
    start_policy: str = "ready-time",
    workers: int = 1,
    deviates=None,
    check_feasible: bool = True,
) -> SRBCurve:
    """Variance of total project duration at each control period.

    ``grid`` is a ControlGrid, an integer step, or None for every period
    from 0 to the planned finish. The same deviate table feeds every
    control period. Infeasible schedules raise InfeasibleScheduleError.
    """
    net = build_network(target)
    if check_feasible:
        report = validate(schedule, net)
        if not report.feasible:
            raise InfeasibleScheduleError(f"schedule {schedule.label!r} is infeasible", report)
    starts = resolve_starts(schedule, net)
    planned = int((starts + net.durations).max())
    if grid is None or isinstance(grid, int):
        grid = ControlGrid.regular(planned, grid or 1)
    if grid.end != planned:
        raise ValidationError(f"control grid ends at {grid.end}, planned finish is {planned}")
    times = np.asarray(grid.times)
    inner = times[times < planned]
    totals_inner = simulate_totals(schedule, net, model, inner, deviates, ongoing, start_policy, workers)
    n_rep = totals_inner.shape[1]
    totals = np.vstack([totals_inner, np.full((len(times) - len(inner), n_rep), float(planned))])
    return _curve_from_totals(schedule.label, times, totals, planned, n_rep, model.seed, planned)


def srv(curve: SRBCurve) -> float:
    """Area under the SRB curve (trapezoidal rule over the control grid)."""
    if len(curve.times) < 2:
        return 0.0
    return float(np.trapezoid(curve.variance, curve.times))


def srv_standard_error(curve: SRBCurve, batches: int = 20) -> float:
    """Batch-means standard error of the curve's SRV."""
    if curve.totals is None:
        raise ValueError("curve was built without per-replication totals")
    n = curve.totals.shape[1]
    if n < 2 * batches:
        raise ValueError(f"need at least {2 * batches} replications for {batches} batches")
    size = n // batches
    values = []
    for b in range(batches):
        part = curve.totals[:, b * size : (b + 1) * size]
        sub = _curve_from_totals("", curve.times, part, curve.planned, size, curve.seed, curve.planned)
        values.append(srv(sub))
    return float(np.std(values, ddof=1) / math.sqrt(batches))


@dataclass
class ScheduleResult:
    label: str
    feasible: bool
    planned: int | None = None
    mean: float | None = None
    p10: float | None = None
    p50: float | None = None
    p90: float | None = None
    srv: float | None = None
    curve: SRBCurve | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "planned": self.planned,
            "mean": self.mean,
            "p10": self.p10,
            "p50": self.p50,
            "p90": self.p90,
            "srv": self.srv,
            "feasible": self.feasible,
        }


@dataclass
class RiskReport:
    run: dict
    schedules: list[ScheduleResult]
    ranking: list[str]

    @property
    def best(self) -> str | None:
        return self.ranking[0] if self.ranking else None

    def result(self, label: str) -> ScheduleResult:
        for r in self.schedules:
            if r.label == label:
                return r
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "run": self.run,
            "schedules": [r.to_dict() for r in self.schedules],
            "ranking": list(self.ranking),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RiskReport":
        return cls(
            run=dict(data["run"]),
            schedules=[ScheduleResult(**r) for r in data["schedules"]],
            ranking=list(data["ranking"]),
        )

    def table(self) -> str:
        """Ranking as a fixed-width text table, lowest SRV first."""
        rows = [f"{'rank':>4}  {'schedule':<24} {'planned':>8} {'mean':>9} {'SRV':>10}"]
        for k, label in enumerate(self.ranking, start=1):
            r = self.result(label)
            rows.append(f"{k:>4}  {label:<24} {r.planned:>8.2f} {r.mean:>9.2f} {r.srv:>10.2f}")
        for r in self.schedules:
            if not r.feasible:
                rows.append(f"{'-':>4}  {r.label:<24} {'infeasible, not ranked':>29}")
        return "\n".join(rows)


def rank_schedules(
    candidates: Sequence[Schedule],
    target,
    model: DurationModel,
    grid_step: int = 1,
    ongoing: str = "linear",
    start_policy: str = "ready-time",
    workers: int = 1,
) -> RiskReport:
    """SRB curve and SRV for every feasible candidate, ranked by ascending SRV.

    All candidates share the model and hence the same deviate table.
    Infeasible candidates are reported but not ranked.
    """
    if not candidates:
        raise ValidationError("no candidate schedules given")
    names = {c.instance_name for c in candidates if c.instance_name}
    if len(names) > 1:
        raise ScheduleError(f"candidates belong to different instances: {sorted(names)}")
    _check_policies(ongoing, start_policy)
    net = build_network(target)
    labelled = [c if c.label else c.relabel(f"schedule-{k}") for k, c in enumerate(candidates, start=1)]
    labels = [c.label for c in labelled]
    if len(set(labels)) != len(labels):
        raise ValidationError(f"candidate labels must be unique, got {labels}")

    results = []
    for cand in labelled:
        if not validate(cand, net).feasible:
            results.append(ScheduleResult(label=cand.label, feasible=False))
            continue
        curve = srb_curve(cand, net, model, grid_step, ongoing, start_policy, workers, check_feasible=False)
        at_zero = curve.totals[0]
        p10, p50, p90 = np.quantile(at_zero, [0.1, 0.5, 0.9])
        results.append(
            ScheduleResult(
                label=cand.label,
                feasible=True,
                planned=curve.planned,
                mean=float(at_zero.mean()),
                p10=float(p10),
                p50=float(p50),
                p90=float(p90),
                srv=srv(curve),
                curve=curve,
            )
        )
    ranked = sorted((r for r in results if r.feasible), key=lambda r: (r.srv, r.label))
    cvs = [s.cv for s in model.specs.values() if not s.is_deterministic]
    cv_range = list(model.cv_range) if model.cv_range else ([min(cvs), max(cvs)] if cvs else [0.0, 0.0])
    run = {
        "instance": net.name,
        "seed": model.seed,
        "cv_seed": model.cv_seed,
        "replications": model.replications,
        "family": model.family,
        "cv_range": cv_range,
        "grid_step": grid_step,
        "policies": {"start": start_policy, "ongoing": ongoing},
    }
    return RiskReport(run=run, schedules=results, ranking=[r.label for r in ranked])
