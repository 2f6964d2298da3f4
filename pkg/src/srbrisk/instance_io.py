"""Project instances, multi-project bundles and schedule files.

Reads and writes the PSPLib single-mode ``.sm`` layout, a line-oriented
multi-project descriptor, and the canonical ``project,activity,start``
schedule CSV.
"""
from __future__ import annotations

import csv
import io
import os
import re
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Callable, Iterable, Mapping

from .errors import ParseError, ScheduleError, UnsupportedFormatError, ValidationError

__all__ = [
    "Activity",
    "ProjectInfo",
    "ProjectInstance",
    "ProjectEntry",
    "MultiProjectProblem",
    "Schedule",
    "make_instance",
    "parse_instance",
    "write_instance",
    "load_instance",
    "parse_multiproject",
    "write_multiproject",
    "load_multiproject",
    "parse_schedule",
    "write_schedule",
    "load_schedule",
    "schedule_from_starts",
]


@dataclass(frozen=True)
class Activity:
    id: int
    duration: int
    demands: Mapping[str, int]
    successors: tuple[int, ...]
    label: int  # job number as written in the source file

    def __post_init__(self):
        if self.duration < 0:
            raise ValidationError(f"activity {self.label}: negative duration {self.duration}")
        for res, units in self.demands.items():
            if units < 0:
                raise ValidationError(f"activity {self.label}: negative demand {units} for {res}")


@dataclass(frozen=True)
class ProjectInfo:
    """The PROJECT INFORMATION row of a PSPLib file. Kept for round-tripping only."""

    release: int = 0
    due_date: int = 0
    tardiness_cost: int = 0
    mpm_time: int = 0


@dataclass(frozen=True)
class ProjectInstance:
    name: str
    activities: tuple[Activity, ...]
    resources: tuple[tuple[str, int], ...]
    horizon: int | None = None
    info: ProjectInfo = field(default_factory=ProjectInfo)
    generator_seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "activities", tuple(self.activities))
        object.__setattr__(self, "resources", tuple((str(r), int(c)) for r, c in self.resources))
        _validate_instance(self)

    def __len__(self):
        return len(self.activities)

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return len(self.activities) - 1

    @property
    def resource_ids(self) -> tuple[str, ...]:
        return tuple(r for r, _ in self.resources)

    @property
    def capacities(self) -> dict[str, int]:
        return dict(self.resources)

    def predecessors(self) -> list[list[int]]:
        preds: list[list[int]] = [[] for _ in self.activities]
        for act in self.activities:
            for s in act.successors:
                preds[s].append(act.id)
        return preds

    def topological_order(self) -> list[int]:
        return _toposort(self.activities)

    def is_dummy(self, activity_id: int) -> bool:
        return activity_id in (self.source, self.sink)

    def by_label(self, label: int) -> Activity:
        for act in self.activities:
            if act.label == label:
                return act
        raise KeyError(label)


def _toposort(activities: Iterable[Activity]) -> list[int]:
    # graphlib wants node -> predecessors; successors give the reversed graph,
    # so sort the reverse and flip it.
    graph = {a.id: set(a.successors) for a in activities}
    try:
        order = list(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        cycle = exc.args[1] if len(exc.args) > 1 else []
        raise ValidationError(f"precedence graph has a cycle through activities {cycle}") from None
    order.reverse()
    return order


def _validate_instance(inst: ProjectInstance) -> None:
    acts = inst.activities
    if len(acts) < 2:
        raise ValidationError("an instance needs at least a source and a sink activity")
    for pos, act in enumerate(acts):
        if act.id != pos:
            raise ValidationError(f"activity ids must be contiguous from 0; found {act.id} at position {pos}")
    labels = [a.label for a in acts]
    if len(set(labels)) != len(labels):
        dup = sorted({x for x in labels if labels.count(x) > 1})
        raise ValidationError(f"duplicate activity id(s) {dup}")
    res_ids = [r for r, _ in inst.resources]
    if len(set(res_ids)) != len(res_ids):
        raise ValidationError(f"duplicate resource id in {res_ids}")
    for r, cap in inst.resources:
        if cap < 0:
            raise ValidationError(f"resource {r}: negative capacity {cap}")
    n = len(acts)
    for act in acts:
        for s in act.successors:
            if not 0 <= s < n:
                raise ValidationError(f"activity {act.label}: successor {s} does not exist")
            if s == act.id:
                raise ValidationError(f"activity {act.label} is its own successor")
        unknown = set(act.demands) - set(res_ids)
        if unknown:
            raise ValidationError(f"activity {act.label}: demand for unknown resource(s) {sorted(unknown)}")
    _toposort(acts)

    has_pred = {s for a in acts for s in a.successors}
    sources = [a.id for a in acts if a.id not in has_pred]
    sinks = [a.id for a in acts if not a.successors]
    if sources != [0]:
        raise ValidationError(f"expected the first activity as the single source, got {sources}")
    if sinks != [n - 1]:
        raise ValidationError(f"expected the last activity as the single sink, got {sinks}")
    for dummy in (acts[0], acts[-1]):
        if dummy.duration != 0 or any(dummy.demands.values()):
            raise ValidationError(f"dummy activity {dummy.label} must have zero duration and demands")


def make_instance(
    durations: Iterable[int],
    precedences: Iterable[tuple[int, int]] = (),
    demands: Iterable[Mapping[str, int]] | None = None,
    capacities: Mapping[str, int] | None = None,
    name: str = "instance",
) -> ProjectInstance:
    """Build an instance from real activities numbered 1..n.

    Dummy source 0 and sink n+1 are added and wired to every activity
    without predecessors / successors.
    """
    durations = [int(d) for d in durations]
    n = len(durations)
    demands = list(demands) if demands is not None else [{} for _ in durations]
    if len(demands) != n:
        raise ValueError("demands must have one entry per activity")
    capacities = dict(capacities or {})
    succ: dict[int, set[int]] = {i: set() for i in range(n + 2)}
    has_pred = set()
    for i, j in precedences:
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValidationError(f"precedence ({i}, {j}) references an unknown activity")
        succ[i].add(j)
        has_pred.add(j)
    for j in range(1, n + 1):
        if j not in has_pred:
            succ[0].add(j)
        if not succ[j]:
            succ[j].add(n + 1)
    if n == 0:
        succ[0].add(1)
    full_durations = [0] + durations + [0]
    full_demands = [{}] + [dict(d) for d in demands] + [{}]
    acts = tuple(
        Activity(
            id=i,
            duration=full_durations[i],
            demands={r: int(full_demands[i].get(r, 0)) for r in capacities},
            successors=tuple(sorted(succ[i])),
            label=i + 1,
        )
        for i in range(n + 2)
    )
    for i, d in enumerate(full_demands):
        extra = set(d) - set(capacities)
        if extra:
            raise ValidationError(f"activity {i}: demand for unknown resource(s) {sorted(extra)}")
    return ProjectInstance(name=name, activities=acts, resources=tuple(capacities.items()))


# --------------------------------------------------------------------------
# PSPLib .sm

_SECTIONS = {
    "PROJECT INFORMATION:": "info",
    "PRECEDENCE RELATIONS:": "precedence",
    "REQUESTS/DURATIONS:": "requests",
    "RESOURCEAVAILABILITIES:": "availability",
}
_REQUIRED = ("precedence", "requests", "availability")
_RES_TOKEN = re.compile(r"([A-Z])\s*(\d+)")
_INT_LINE = re.compile(r"^-?\d+(\s+-?\d+)*$")


def _read_text(text) -> str:
    if hasattr(text, "read"):
        return text.read()
    return text


def _ints(line: str, lineno: int, source) -> list[int]:
    stripped = line.strip()
    if not _INT_LINE.match(stripped):
        raise ParseError(f"expected whitespace-separated integers, got {stripped!r}", lineno, source)
    return [int(tok) for tok in stripped.split()]


def _header_value(value: str, key: str, lineno: int, source) -> int:
    m = re.match(r"\s*(-?\d+)", value)
    if not m:
        raise ParseError(f"header field {key!r} needs an integer value", lineno, source)
    return int(m.group(1))


def parse_instance(text, name: str | None = None, source: str | None = None) -> ProjectInstance:
    """Parse a PSPLib single-mode ``.sm`` file.

    ``text`` is a string or a readable text stream. ``name`` defaults to the
    stem of the ``file with basedata`` header, then to ``source``'s stem.
    Raises ParseError (with a line number) for malformed text,
    UnsupportedFormatError for multi-mode or non-renewable data and
    ValidationError when the parsed network breaks an instance invariant.
    """
    lines = _read_text(text).splitlines()
    header: dict[str, int] = {}
    basedata = None
    seen: dict[str, int] = {}
    info_row = None
    prec_rows: list[tuple[int, list[int]]] = []
    req_rows: list[tuple[int, list[int]]] = []
    res_names: list[str] | None = None
    availability: list[int] | None = None

    section = None
    expect_columns = False
    terminated = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("*"):
            if section == "availability" and availability is not None:
                terminated = True
            section = None
            continue
        if set(line) <= {"-"}:
            continue
        upper = line.upper()
        if upper in _SECTIONS:
            section = _SECTIONS[upper]
            if section in seen:
                raise ParseError(f"duplicate section {line!r}", lineno, source)
            seen[section] = lineno
            expect_columns = True
            continue
        if upper == "RESOURCES":
            section = "resources"
            continue
        if line.endswith(":") and ":" not in line[:-1]:
            raise ParseError(f"unknown section header {line!r}", lineno, source)

        if section is None or section == "resources":
            if ":" not in line:
                raise ParseError(f"expected 'key : value' in header, got {line!r}", lineno, source)
            key, value = (part.strip() for part in line.split(":", 1))
            key_l = key.lower()
            if key_l.startswith("file with basedata"):
                basedata = value
            elif key_l.startswith("initial value random generator"):
                header["seed"] = _header_value(value, key, lineno, source)
            elif key_l.startswith("projects"):
                header["projects"] = _header_value(value, key, lineno, source)
                if header["projects"] != 1:
                    raise UnsupportedFormatError("only single-project .sm files are supported", lineno, source)
            elif key_l.startswith("jobs"):
                header["jobs"] = _header_value(value, key, lineno, source)
            elif key_l.startswith("horizon"):
                header["horizon"] = _header_value(value, key, lineno, source)
            elif key_l.startswith("- renewable"):
                header["renewable"] = _header_value(value, key, lineno, source)
            elif key_l.startswith("- nonrenewable") or key_l.startswith("- doubly constrained"):
                count = _header_value(value, key, lineno, source)
                if count:
                    raise UnsupportedFormatError(
                        f"unsupported: {key.lstrip('- ')} resources ({count}); only renewable resources are handled",
                        lineno,
                        source,
                    )
            else:
                raise ParseError(f"unknown header field {key!r}", lineno, source)
            continue

        if expect_columns:
            expect_columns = False
            low = line.lower()
            if section == "info" and low.startswith("pronr"):
                continue
            if section in ("precedence", "requests") and low.startswith("jobnr"):
                if section == "requests":
                    tail = re.split(r"duration", line, maxsplit=1, flags=re.I)[-1]
                    res_names = [f"{a}{b}" for a, b in _RES_TOKEN.findall(tail)]
                    if any(not r.startswith("R") for r in res_names):
                        raise UnsupportedFormatError("unsupported: non-renewable resource columns", lineno, source)
                continue
            if section == "availability" and _RES_TOKEN.match(line):
                avail_names = [f"{a}{b}" for a, b in _RES_TOKEN.findall(line)]
                if res_names is not None and avail_names != res_names:
                    raise ParseError(
                        f"resource columns {avail_names} differ from REQUESTS/DURATIONS columns {res_names}",
                        lineno,
                        source,
                    )
                res_names = avail_names
                continue
            raise ParseError(f"missing column header line in section, got {line!r}", lineno, source)

        row = _ints(line, lineno, source)
        if section == "info":
            if info_row is not None or len(row) != 6:
                raise ParseError("PROJECT INFORMATION needs exactly one row of 6 integers", lineno, source)
            info_row = row
        elif section == "precedence":
            if len(row) < 3 or len(row) != 3 + row[2]:
                raise ParseError("precedence row must be: job modes #successors successors...", lineno, source)
            if row[1] != 1:
                raise UnsupportedFormatError(f"unsupported: job {row[0]} has {row[1]} modes", lineno, source)
            prec_rows.append((lineno, row))
        elif section == "requests":
            nres = len(res_names or [])
            if len(row) != 3 + nres:
                raise ParseError(f"request row must be: job mode duration and {nres} demands", lineno, source)
            if row[1] != 1:
                raise UnsupportedFormatError(f"unsupported: job {row[0]} mode {row[1]}", lineno, source)
            req_rows.append((lineno, row))
        elif section == "availability":
            if availability is not None:
                raise ParseError("RESOURCEAVAILABILITIES has more than one row", lineno, source)
            availability = row

    end = len(lines)
    for sec in _REQUIRED:
        if sec not in seen:
            title = next(k for k, v in _SECTIONS.items() if v == sec)
            raise ParseError(f"missing section {title!r} (file truncated?)", end, source)
    if "jobs" not in header:
        raise ParseError("missing 'jobs' header field", end, source)
    if res_names is None or availability is None:
        raise ParseError("RESOURCEAVAILABILITIES has no values (file truncated?)", end, source)
    if not terminated:
        raise ParseError("RESOURCEAVAILABILITIES must be closed by a '****' rule line (file truncated?)", end, source)
    if len(availability) != len(res_names):
        raise ParseError(f"expected {len(res_names)} availabilities, got {len(availability)}", end, source)
    if "renewable" in header and header["renewable"] != len(res_names):
        raise ParseError(
            f"header declares {header['renewable']} renewable resources, columns list {len(res_names)}", end, source
        )

    njobs = header["jobs"]
    for title, rows in (("PRECEDENCE RELATIONS", prec_rows), ("REQUESTS/DURATIONS", req_rows)):
        if len(rows) != njobs:
            raise ParseError(f"{title}: expected {njobs} rows, found {len(rows)} (file truncated?)", end, source)
        ids = [r[0] for _, r in rows]
        dup = sorted({x for x in ids if ids.count(x) > 1})
        if dup:
            raise ValidationError(f"{title}: duplicate activity id(s) {dup}")

    labels = [r[0] for _, r in prec_rows]
    index = {label: i for i, label in enumerate(labels)}
    if sorted(labels) != sorted(r[0] for _, r in req_rows):
        raise ValidationError("PRECEDENCE RELATIONS and REQUESTS/DURATIONS list different activities")
    requests = {r[0]: r for _, r in req_rows}
    activities = []
    for i, label in enumerate(labels):
        _, row = prec_rows[i]
        succ = []
        for s in row[3:]:
            if s not in index:
                raise ValidationError(f"activity {label}: successor {s} does not exist")
            succ.append(index[s])
        req = requests[label]
        activities.append(
            Activity(
                id=i,
                duration=req[2],
                demands=dict(zip(res_names, req[3:])),
                successors=tuple(sorted(succ)),
                label=label,
            )
        )

    if name is None:
        if basedata:
            name = os.path.splitext(os.path.basename(basedata))[0]
        elif source:
            name = os.path.splitext(os.path.basename(str(source)))[0]
        else:
            name = "instance"
    info = ProjectInfo(*info_row[2:6]) if info_row else ProjectInfo()
    return ProjectInstance(
        name=name,
        activities=tuple(activities),
        resources=tuple(zip(res_names, availability)),
        horizon=header.get("horizon"),
        info=info,
        generator_seed=header.get("seed"),
    )


def _res_heading(rid: str) -> str:
    m = re.fullmatch(r"R(\d+)", rid)
    return f"R{m.group(1):>2}" if m else rid


def write_instance(inst: ProjectInstance) -> str:
    """Serialize to PSPLib ``.sm`` text; ``parse_instance`` reads it back unchanged."""
    for rid in inst.resource_ids:
        if not re.fullmatch(r"R\d+", rid):
            raise ValueError(f"resource id {rid!r} cannot be written in .sm format (expected R<n>)")
    rule = "*" * 72
    n = len(inst)
    horizon = inst.horizon if inst.horizon is not None else sum(a.duration for a in inst.activities)
    out = [
        rule,
        f"file with basedata            : {inst.name}.bas",
        f"initial value random generator: {inst.generator_seed or 0}",
        rule,
        "projects                      :  1",
        f"jobs (incl. supersource/sink ):  {n}",
        f"horizon                       :  {horizon}",
        "RESOURCES",
        f"  - renewable                 :  {len(inst.resources)}   R",
        "  - nonrenewable              :  0   N",
        "  - doubly constrained        :  0   D",
        rule,
        "PROJECT INFORMATION:",
        "pronr.  #jobs rel.date duedate tardcost  MPM-Time",
        "    1 {:>6} {:>6} {:>8} {:>8} {:>8}".format(
            n - 2, inst.info.release, inst.info.due_date, inst.info.tardiness_cost, inst.info.mpm_time
        ),
        rule,
        "PRECEDENCE RELATIONS:",
        "jobnr.    #modes  #successors   successors",
    ]
    labels = [a.label for a in inst.activities]
    for act in inst.activities:
        succ = "".join(f"{labels[s]:>4}" for s in act.successors)
        out.append(f"{act.label:>4}{1:>9}{len(act.successors):>11}      {succ}".rstrip())
    heading = "".join(f"  {_res_heading(r)}" for r in inst.resource_ids)
    out += [rule, "REQUESTS/DURATIONS:", f"jobnr. mode duration{heading}", "-" * 72]
    for act in inst.activities:
        dem = "".join(f"{act.demands.get(r, 0):>5}" for r in inst.resource_ids)
        out.append(f"{act.label:>3}{1:>7}{act.duration:>6}  {dem}".rstrip())
    out += [
        rule,
        "RESOURCEAVAILABILITIES:",
        heading,
        "".join(f"{cap:>6}" for _, cap in inst.resources),
        rule,
    ]
    return "\n".join(out) + "\n"


def load_instance(path) -> ProjectInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh, source=str(path))


# --------------------------------------------------------------------------
# Multi-project descriptor


@dataclass(frozen=True)
class ProjectEntry:
    name: str
    instance: ProjectInstance
    arrival: int
    path: str

    @property
    def local_capacities(self) -> dict[str, int]:
        return self.instance.capacities


@dataclass(frozen=True)
class MultiProjectProblem:
    name: str
    projects: tuple[ProjectEntry, ...]
    global_resources: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "projects", tuple(self.projects))
        if not self.projects:
            raise ValidationError("a multi-project problem needs at least one project")
        names = [p.name for p in self.projects]
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate project names in {names}")
        for p in self.projects:
            if p.arrival < 0:
                raise ValidationError(f"project {p.name}: negative arrival date {p.arrival}")
        used = {r for p in self.projects for r in p.instance.resource_ids}
        for rid, cap in self.global_resources.items():
            if rid not in used:
                raise ValidationError(f"global resource {rid!r} is not used by any project")
            if cap < 0:
                raise ValidationError(f"global resource {rid!r}: negative capacity {cap}")


def parse_multiproject(
    descriptor, resolver: Callable[[str], str], name: str | None = None, source: str | None = None
) -> MultiProjectProblem:
    """Parse a multi-project descriptor.

    Grammar (one directive per line, ``#`` starts a comment)::

        problem <name>
        project <name> <instance-path> <arrival>
        global  <resource-id> <capacity>

    ``resolver`` maps an instance path to its ``.sm`` text and should raise
    OSError or KeyError for unknown paths.
    """
    projects: list[ProjectEntry] = []
    globals_: dict[str, int] = {}
    global_lines: dict[str, int] = {}
    problem_name = name
    for lineno, raw in enumerate(_read_text(descriptor).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0].lower()
        if kind == "problem" and len(parts) == 2:
            if name is None:
                problem_name = parts[1]
        elif kind == "project" and len(parts) == 4:
            pname, path, arrival_tok = parts[1:]
            try:
                arrival = int(arrival_tok)
            except ValueError:
                raise ParseError(f"arrival date must be an integer, got {arrival_tok!r}", lineno, source) from None
            if arrival < 0:
                raise ParseError(f"project {pname}: negative arrival date {arrival}", lineno, source)
            try:
                text = resolver(path)
            except (OSError, KeyError) as exc:
                raise ParseError(f"cannot resolve instance file {path!r}: {exc}", lineno, source) from None
            inst = parse_instance(text, source=path)
            projects.append(ProjectEntry(name=pname, instance=inst, arrival=arrival, path=path))
        elif kind == "global" and len(parts) == 3:
            rid = parts[1]
            try:
                cap = int(parts[2])
            except ValueError:
                raise ParseError(f"capacity must be an integer, got {parts[2]!r}", lineno, source) from None
            if rid in globals_:
                raise ParseError(f"global resource {rid!r} declared twice", lineno, source)
            if cap < 0:
                raise ParseError(f"global resource {rid!r}: negative capacity", lineno, source)
            globals_[rid] = cap
            global_lines[rid] = lineno
        else:
            raise ParseError(f"unrecognised directive {line!r}", lineno, source)
    if not projects:
        raise ParseError("descriptor lists no projects", None, source)
    used = {r for p in projects for r in p.instance.resource_ids}
    for rid in globals_:
        if rid not in used:
            raise ParseError(f"unknown global resource id {rid!r}", global_lines[rid], source)
    if problem_name is None:
        problem_name = os.path.splitext(os.path.basename(source))[0] if source else "problem"
    return MultiProjectProblem(name=problem_name, projects=tuple(projects), global_resources=globals_)


def write_multiproject(problem: MultiProjectProblem) -> str:
    out = [f"problem {problem.name}"]
    for p in problem.projects:
        out.append(f"project {p.name} {p.path} {p.arrival}")
    for rid, cap in problem.global_resources.items():
        out.append(f"global {rid} {cap}")
    return "\n".join(out) + "\n"


def load_multiproject(path) -> MultiProjectProblem:
    base = os.path.dirname(os.path.abspath(path))

    def resolve(rel):
        with open(os.path.join(base, rel), encoding="utf-8") as fh:
            return fh.read()

    with open(path, encoding="utf-8") as fh:
        return parse_multiproject(fh, resolve, source=str(path))


# --------------------------------------------------------------------------
# Schedules


@dataclass(frozen=True)
class Schedule:
    """Planned start times keyed by ``(project, activity)``.

    Both numbers are 1-based as written in the source files; a single-project
    schedule uses project 1 throughout.
    """

    instance_name: str
    starts: Mapping[tuple[int, int], int]
    label: str = ""

    def __post_init__(self):
        for key, start in self.starts.items():
            if start < 0:
                raise ScheduleError(f"activity {key}: negative start {start}")

    def __len__(self):
        return len(self.starts)

    def start_of(self, activity: int, project: int = 1) -> int:
        return self.starts[(project, activity)]

    def relabel(self, label: str) -> "Schedule":
        return Schedule(self.instance_name, dict(self.starts), label)


def schedule_from_starts(
    instance: ProjectInstance, starts: Mapping[int, int], label: str = "", project: int = 1
) -> Schedule:
    """Build a schedule from 0-based activity ids of ``instance``."""
    acts = instance.activities
    return Schedule(
        instance_name=instance.name,
        starts={(project, acts[i].label): int(s) for i, s in starts.items()},
        label=label,
    )


_HEADER = ["project", "activity", "start"]


def parse_schedule(text, label: str | None = None, instance_name: str | None = None, source=None) -> Schedule:
    """Read the canonical schedule CSV.

    Optional ``# label: ...`` / ``# instance: ...`` lines may precede the
    header; explicit arguments take precedence over them.
    """
    meta: dict[str, str] = {}
    body_lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(_read_text(text).splitlines(), start=1):
        stripped = raw.strip()
        if not body_lines and stripped.startswith("#"):
            key, _, value = stripped[1:].partition(":")
            meta[key.strip().lower()] = value.strip()
            continue
        if not stripped:
            continue
        body_lines.append((lineno, stripped))
    if not body_lines:
        raise ParseError("empty schedule file (missing header)", 1, source)
    hdr_lineno, hdr = body_lines[0]
    if [c.strip().lower() for c in hdr.split(",")] != _HEADER:
        raise ParseError(f"schedule header must be 'project,activity,start', got {hdr!r}", hdr_lineno, source)
    starts: dict[tuple[int, int], int] = {}
    for lineno, row in body_lines[1:]:
        cells = next(csv.reader([row]))
        if len(cells) != 3:
            raise ParseError(f"expected 3 columns, got {len(cells)}", lineno, source)
        try:
            project, activity, start = (int(c.strip()) for c in cells)
        except ValueError:
            raise ParseError(f"non-integer field in {row!r}", lineno, source) from None
        if start < 0:
            raise ParseError(f"activity {activity}: negative start {start}", lineno, source)
        if (project, activity) in starts:
            raise ParseError(f"duplicate record for project {project} activity {activity}", lineno, source)
        starts[(project, activity)] = start
    if label is None:
        label = meta.get("label")
        if label is None and source:
            label = os.path.splitext(os.path.basename(str(source)))[0]
    if instance_name is None:
        instance_name = meta.get("instance", "")
    return Schedule(instance_name=instance_name, starts=starts, label=label or "")


def write_schedule(schedule: Schedule) -> str:
    buf = io.StringIO()
    if schedule.label:
        buf.write(f"# label: {schedule.label}\n")
    if schedule.instance_name:
        buf.write(f"# instance: {schedule.instance_name}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_HEADER)
    for (project, activity), start in sorted(schedule.starts.items()):
        writer.writerow([project, activity, start])
    return buf.getvalue()


def load_schedule(path, label: str | None = None) -> Schedule:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_schedule(fh, label=label, source=str(path))
