"""Command-line front end.

    srbrisk validate --instance j30.sm plan_a.csv plan_b.csv
    srbrisk rank     --instance j30.sm --rules min-slack,latest-finish --out runs/
    srbrisk curve    --problem mp.txt plan.csv --gnuplot --out runs/
    srbrisk sgs      --instance j30.sm --rule random:3 --out schedules/

Exit codes: 0 success, 1 infeasible schedule / nothing to rank,
2 parse or configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass, field, fields

from .errors import InfeasibleScheduleError, SRBError
from .instance_io import load_instance, load_multiproject, load_schedule, write_schedule
from .schedule_core import validate
from .sgs import PriorityRule, serial_sgs
from .srb import ONGOING_POLICIES, START_POLICIES, rank_schedules
from .uncertainty import FAMILIES, DurationModel, build_model

EXIT_OK, EXIT_INFEASIBLE, EXIT_ERROR = 0, 1, 2


class ConfigError(SRBError):
    pass


@dataclass
class RunConfig:
    instance: str | None = None
    problem: str | None = None
    schedules: list[str] = field(default_factory=list)
    rules: list[str] = field(default_factory=list)
    family: str = "lognormal"
    cv_lo: float = 0.10
    cv_hi: float = 0.30
    seed: int = 0
    cv_seed: int | None = None
    replications: int = 10_000
    grid_step: int = 1
    policy_start: str = "ready-time"
    policy_ongoing: str = "linear"
    out: str | None = None
    workers: int = 1
    model: str | None = None
    gnuplot: bool = False

    def check(self):
        if bool(self.instance) == bool(self.problem):
            raise ConfigError("give exactly one of --instance or --problem")
        if self.cv_lo > self.cv_hi:
            raise ConfigError(f"cv-lo ({self.cv_lo}) exceeds cv-hi ({self.cv_hi})")
        if self.cv_lo < 0 or self.cv_hi >= 1:
            raise ConfigError("cv bounds must lie in [0, 1)")
        if self.replications < 2:
            raise ConfigError("--reps must be at least 2")
        if self.grid_step < 1:
            raise ConfigError("--grid-step must be at least 1")
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if self.policy_start not in START_POLICIES:
            raise ConfigError(f"unknown start policy {self.policy_start!r}")
        if self.policy_ongoing not in ONGOING_POLICIES:
            raise ConfigError(f"unknown ongoing policy {self.policy_ongoing!r}")
        if self.workers < 1:
            raise ConfigError("--workers must be at least 1")
        return self


_FLAG_DEST = {f.name for f in fields(RunConfig)}


def _add_target(p):
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--instance", help="PSPLib .sm instance")
    p.add_argument("--problem", help="multi-project descriptor")


def _add_sim(p):
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--cv-lo", dest="cv_lo", type=float)
    p.add_argument("--cv-hi", dest="cv_hi", type=float)
    p.add_argument("--seed", type=int, help="replication seed")
    p.add_argument("--cv-seed", dest="cv_seed", type=int, help="seed for the cv draws (default: --seed)")
    p.add_argument("--reps", dest="replications", type=int)
    p.add_argument("--grid-step", dest="grid_step", type=int)
    p.add_argument("--policy-start", dest="policy_start", choices=START_POLICIES)
    p.add_argument("--policy-ongoing", dest="policy_ongoing", choices=ONGOING_POLICIES)
    p.add_argument("--workers", type=int)
    p.add_argument("--model", help="model.json from an earlier run; reuses its cvs, seed and policies")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srbrisk", description="Schedule risk baselines and risk values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check schedules for precedence and resource feasibility")
    _add_target(p)
    p.add_argument("schedules", nargs="*", help="schedule CSV files")
    p.add_argument("--out", help="directory for validation.json (default: print to stdout)")

    p = sub.add_parser("rank", help="rank candidate schedules by SRV")
    _add_target(p)
    p.add_argument("schedules", nargs="*", help="schedule CSV files")
    p.add_argument("--rules", help="comma-separated SGS rules to generate extra candidates, e.g. min-slack,random:3")
    _add_sim(p)

    p = sub.add_parser("curve", help="SRB curve of one schedule")
    _add_target(p)
    p.add_argument("schedules", nargs="*", help="one schedule CSV file")
    p.add_argument("--rule", dest="rules", help="generate the schedule with this SGS rule instead")
    p.add_argument("--gnuplot", action="store_true", default=None, help="also write a two-column .dat file")
    _add_sim(p)

    p = sub.add_parser("sgs", help="generate schedules with the serial SGS")
    _add_target(p)
    p.add_argument("--rule", dest="rules", action="append", help="priority rule (repeatable); default min-slack")
    p.add_argument("--out", help="directory for schedule CSVs (default: print the first to stdout)")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - _FLAG_DEST
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        base = os.path.dirname(os.path.abspath(args.config))
        for key in ("instance", "problem", "model", "out"):
            if data.get(key):
                data[key] = os.path.join(base, data[key])
        data["schedules"] = [os.path.join(base, s) for s in data.get("schedules", [])]
    for key, value in vars(args).items():
        if key not in _FLAG_DEST or value is None:
            continue
        if key == "schedules" and not value:
            continue
        if key == "rules" and isinstance(value, str):
            value = [r.strip() for r in value.split(",") if r.strip()]
        data[key] = value
    if isinstance(data.get("rules"), str):
        data["rules"] = [data["rules"]]
    try:
        cfg = RunConfig(**data)
    except TypeError as exc:
        raise ConfigError(f"bad configuration: {exc}") from None
    return cfg.check()


def _target(cfg: RunConfig):
    return load_instance(cfg.instance) if cfg.instance else load_multiproject(cfg.problem)


def _safe(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label) or "schedule"


def _candidates(cfg, target):
    cands = [load_schedule(p) for p in cfg.schedules]
    for rule in cfg.rules:
        cands.append(serial_sgs(target, PriorityRule.parse(rule)))
    return cands


def _model(cfg: RunConfig, target, explicit: set[str]) -> DurationModel:
    if cfg.model:
        with open(cfg.model, encoding="utf-8") as fh:
            model = DurationModel.from_json(fh.read())
        if "seed" in explicit:
            model = model.with_seed(cfg.seed)
        if "replications" in explicit:
            model = model.with_replications(cfg.replications)
        extra = model.extra
        if "policy_start" not in explicit and "policy_start" in extra:
            cfg.policy_start = extra["policy_start"]
        if "policy_ongoing" not in explicit and "policy_ongoing" in extra:
            cfg.policy_ongoing = extra["policy_ongoing"]
        if "grid_step" not in explicit and "grid_step" in extra:
            cfg.grid_step = extra["grid_step"]
    else:
        cv_seed = cfg.seed if cfg.cv_seed is None else cfg.cv_seed
        model = build_model(target, cfg.family, cfg.cv_lo, cfg.cv_hi, cv_seed, cfg.seed, cfg.replications)
    model.extra = {"policy_start": cfg.policy_start, "policy_ongoing": cfg.policy_ongoing, "grid_step": cfg.grid_step}
    return model


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_validate(cfg: RunConfig) -> int:
    target = _target(cfg)
    if not cfg.schedules:
        raise ConfigError("validate needs at least one schedule file")
    reports = []
    for path in cfg.schedules:
        sched = load_schedule(path)
        reports.append(validate(sched, target))
    doc = {"schema": 1, "instance": getattr(target, "name", ""), "reports": [r.to_dict() for r in reports]}
    text = json.dumps(doc, indent=2) + "\n"
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        _write(os.path.join(cfg.out, "validation.json"), text)
    else:
        sys.stdout.write(text)
    for r in reports:
        status = "feasible" if r.feasible else "INFEASIBLE"
        print(f"{r.label}: {status}", file=sys.stderr)
        for res, t, use, cap in r.resource_violations[:20]:
            print(f"  resource {res} period {t}: usage {use} > capacity {cap}", file=sys.stderr)
        for a, b, gap in r.precedence_violations[:20]:
            print(f"  precedence {a} -> {b}: gap {gap}", file=sys.stderr)
    return EXIT_OK if all(r.feasible for r in reports) else EXIT_INFEASIBLE


def _analyse(cfg: RunConfig, explicit: set[str], single: bool) -> int:
    target = _target(cfg)
    cands = _candidates(cfg, target)
    if single and len(cands) != 1:
        raise ConfigError(f"curve needs exactly one schedule, got {len(cands)}")
    if not cands:
        raise ConfigError("no candidate schedules: pass schedule files or --rules")
    model = _model(cfg, target, explicit)
    report = rank_schedules(
        cands, target, model, cfg.grid_step, cfg.policy_ongoing, cfg.policy_start, workers=cfg.workers
    )
    out = cfg.out or "."
    os.makedirs(out, exist_ok=True)
    _write(os.path.join(out, "report.json"), report.to_json())
    _write(os.path.join(out, "model.json"), model.to_json())
    for r in report.schedules:
        if r.curve is not None:
            stem = os.path.join(out, f"srb_{_safe(r.label)}")
            _write(stem + ".csv", r.curve.to_csv())
            if single and cfg.gnuplot:
                _write(stem + ".dat", r.curve.to_gnuplot())
    print(report.table())
    for r in report.schedules:
        if not r.feasible:
            print(f"rejected infeasible schedule {r.label}", file=sys.stderr)
    return EXIT_OK if report.ranking else EXIT_INFEASIBLE


def cmd_sgs(cfg: RunConfig) -> int:
    target = _target(cfg)
    rules = cfg.rules or ["min-slack"]
    scheds = [serial_sgs(target, PriorityRule.parse(r)) for r in rules]
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        for s in scheds:
            path = os.path.join(cfg.out, f"{_safe(s.label)}.csv")
            _write(path, write_schedule(s))
            print(path)
    else:
        sys.stdout.write(write_schedule(scheds[0]))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    explicit = {k for k, v in vars(args).items() if v is not None and v != []}
    try:
        cfg = load_config(args)
        if args.command == "validate":
            code = cmd_validate(cfg)
        elif args.command == "rank":
            code = _analyse(cfg, explicit, single=False)
        elif args.command == "curve":
            code = _analyse(cfg, explicit, single=True)
        else:
            code = cmd_sgs(cfg)
    except InfeasibleScheduleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_INFEASIBLE
    except (SRBError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_ERROR
    if argv is None:
        raise SystemExit(code)
    return code

