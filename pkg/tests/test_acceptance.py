"""Acceptance gate: one PASS/FAIL line per criterion, at the stated tolerances."""
import io
import json
import contextlib
import math
import time

import numpy as np
import pytest

from srbrisk import (
    MultiProjectProblem,
    Schedule,
    SRBError,
    build_model,
    generate_candidates,
    load_instance,
    load_multiproject,
    load_schedule,
    make_instance,
    makespan,
    multiproject_metrics,
    parse_instance,
    rank_schedules,
    same_makespan_candidates,
    srb_curve,
    srv,
    srv_standard_error,
    validate,
    write_instance,
)
from srbrisk.cli import main
from srbrisk.data import fixture_path
from srbrisk.instance_io import ProjectEntry

from conftest import SM_FIXTURES
from oracles import chain_srb, enumerate_srb, sign_table, small_network


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return emit


def _targets_and_candidates():
    """Every shipped fixture paired with the feasible schedules tried on it."""
    out = []
    for name in SM_FIXTURES:
        inst = load_instance(fixture_path(name))
        out.append((name, inst, generate_candidates(inst, random_seeds=range(4))))
    out.append(("chain2_plan", load_instance(fixture_path("chain2.sm")), [load_schedule(fixture_path("chain2_plan.csv"))]))
    mp = load_multiproject(fixture_path("mp_demo.txt"))
    out.append(("mp_demo.txt", mp, generate_candidates(mp, random_seeds=range(2))))
    return out


def test_1_terminal_zero(verdict):
    bad = []
    count = 0
    for name, target, cands in _targets_and_candidates():
        model = build_model(target, cv_seed=1, replications=2000)
        for sched in cands:
            curve = srb_curve(sched, target, model)
            count += 1
            if curve.variance[-1] != 0.0:
                bad.append((name, sched.label, curve.variance[-1]))
    verdict(1, not bad, f"SRB(t_f) == 0 exactly for {count} fixture/schedule pairs; failures {bad}")


def test_2_serial_chain_oracle(verdict):
    inst = load_instance(fixture_path("chain2.sm"))
    plan = load_schedule(fixture_path("chain2_plan.csv"))
    model = build_model(inst, cvs={(1, 2): 0.25, (1, 3): 1 / 3}, seed=2, replications=50_000)
    t0 = time.perf_counter()
    curve = srb_curve(plan, inst, model, start_policy="precedence-only")
    elapsed = time.perf_counter() - t0
    acts = [(4.0, 1.0), (3.0, 1.0)]
    misses = []
    for t, v, _, _ in curve.points:
        target = chain_srb(t, acts)
        ok = abs(v - target) <= 0.02 if target < 0.5 else abs(v - target) <= 0.03 * target
        if not ok:
            misses.append((t, v, target))
    value = srv(curve)
    srv_ok = abs(value - 6.4306) <= 0.02 * 6.4306
    ok = not misses and srv_ok and elapsed < 10
    points = ", ".join(f"{v:.4f}" for v in curve.variance)
    verdict(2, ok, f"SRB [{points}], SRV {value:.4f} vs 6.4306, {elapsed:.2f}s; misses {misses}")


def test_3_degeneracy(verdict):
    bad = []
    count = 0
    for name, target, cands in _targets_and_candidates():
        model = build_model(target, cv_lo=0.0, cv_hi=0.0, replications=200)
        for sched in cands:
            curve = srb_curve(sched, target, model)
            count += 1
            if not (np.all(curve.mean == curve.planned) and srv(curve) == 0.0):
                bad.append((name, sched.label))
    verdict(3, not bad, f"mean == planned and SRV == 0 exactly for {count} pairs; failures {bad}")


def test_4_brute_force_equivalence(verdict):
    t0 = time.perf_counter()
    checked, worst, networks = 0, 0.0, 0
    for seed in range(6):
        inst, sched = small_network(seed, n_real=5 if seed % 2 else 4)
        cvs = {a.id: 0.1 + 0.05 * (a.id % 5) for a in inst.activities if not inst.is_dummy(a.id)}
        model = build_model(inst, family="two-point", cvs={(1, k + 1): c for k, c in cvs.items()}, replications=2)
        starts = {a.id: sched.starts[(1, a.label)] for a in inst.activities}
        z = sign_table(len(inst), sorted(cvs))
        m = z.shape[0]
        for policy in ("ready-time", "precedence-only"):
            curve = srb_curve(sched, inst, model, start_policy=policy, deviates=z)
            for t, v, _, _ in curve.points:
                var, _, _ = enumerate_srb(inst, starts, cvs, t, policy)
                worst = max(worst, abs(v * (m - 1) / m - var))
                checked += 1
        networks += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5 and networks >= 3
    verdict(4, ok, f"{networks} networks, {checked} control points, max |engine - enumeration| {worst:.2e}, {elapsed:.2f}s")


def _rank_run(out, workers):
    argv = ["rank", "--instance", str(fixture_path("j30_01.sm")),
            "--rules", "min-slack,latest-finish,shortest-duration,most-successors,random:1,random:2",
            "--reps", "10000", "--seed", "17", "--out", str(out), "--workers", str(workers)]
    with contextlib.redirect_stdout(io.StringIO()):
        assert main(argv) == 0
    return (out / "report.json").read_bytes()


def test_5_determinism_and_parallel_invariance(verdict, tmp_path):
    t0 = time.perf_counter()
    a = _rank_run(tmp_path / "a", 1)
    b = _rank_run(tmp_path / "b", 1)
    c = _rank_run(tmp_path / "c", 4)
    elapsed = time.perf_counter() - t0
    verdict(5, a == b == c and elapsed < 60,
            f"report.json identical across reruns: {a == b}, 1 vs 4 workers: {a == c}; {elapsed:.1f}s")


def test_6_equal_makespan_ranking(verdict):
    t0 = time.perf_counter()
    inst = load_instance(fixture_path("j30_01.sm"))
    cands = same_makespan_candidates(inst, minimum=4)
    planned = {makespan(c, inst) for c in cands}
    a_ok = len(cands) >= 4 and len(planned) == 1 and all(validate(c, inst).feasible for c in cands)

    cv_seed = 0
    model = build_model(inst, cv_lo=0.10, cv_hi=0.30, cv_seed=cv_seed, seed=0, replications=10_000)
    report = rank_schedules(cands, inst, model)
    plan = next(iter(planned))
    means = [r.mean for r in report.schedules]
    b_ok = all(plan <= m <= 1.05 * plan for m in means)

    ses = {r.label: srv_standard_error(r.curve) for r in report.schedules}
    best_z = 0.0
    for i, r in enumerate(report.schedules):
        for s in report.schedules[i + 1:]:
            z = abs(r.srv - s.srv) / math.hypot(ses[r.label], ses[s.label])
            best_z = max(best_z, z)
    c_ok = best_z > 3

    winners = [report.ranking[0]]
    for seed in range(1, 5):
        winners.append(rank_schedules(cands, inst, model.with_seed(seed)).ranking[0])
    top = max(set(winners), key=winners.count)
    d_ok = winners.count(top) >= 4
    elapsed = time.perf_counter() - t0

    rows = "; ".join(f"{r.label} mean {r.mean:.2f} SRV {r.srv:.2f}" for r in report.schedules)
    detail = (f"{len(cands)} candidates at makespan {sorted(planned)} (a {a_ok}); {rows} (b {b_ok}); "
              f"largest pairwise z {best_z:.1f} (c {c_ok}); winners {winners} (d {d_ok}); {elapsed:.0f}s")
    verdict(6, a_ok and b_ok and c_ok and d_ok and elapsed < 300, detail)


def test_7_metrics_calibration(verdict):
    p = make_instance([3, 2], [(1, 2)], [{"R1": 1}, {"R1": 1}], {"R1": 1}, name="p")
    prob = MultiProjectProblem("two", (ProjectEntry("A", p, 0, "p.sm"), ProjectEntry("B", p, 0, "p.sm")), {"R1": 1})
    sched = Schedule("two", {(1, 2): 0, (1, 3): 3, (2, 2): 5, (2, 3): 9})
    m = multiproject_metrics(sched, prob)
    ok = validate(sched, prob).feasible and m.delays == (0, 6) and abs(m.apd - 3) <= 1e-9 and abs(m.dpd - 4.2426406871) <= 1e-9
    verdict(7, ok, f"delays {m.delays}, APD {m.apd}, DPD {m.dpd:.10f}, TMS {m.tms}; "
                   "best-known multi-project solution files not shipped, TMS 65 check skipped")


def test_8_parser_corpus(verdict):
    round_trip, prefixes, crashes = 0, 0, []
    for name in SM_FIXTURES:
        with open(fixture_path(name), encoding="utf-8") as fh:
            text = fh.read()
        inst = parse_instance(text)
        if parse_instance(write_instance(inst)) == inst and write_instance(inst) == text:
            round_trip += 1
        for cut in range(len(text)):
            prefixes += 1
            try:
                got = parse_instance(text[:cut])
            except SRBError as exc:
                if not str(exc):
                    crashes.append((name, cut, "empty message"))
            except Exception as exc:  # anything else is a crash
                crashes.append((name, cut, repr(exc)))
            else:
                if got != inst:
                    crashes.append((name, cut, "truncated file parsed to a different instance"))
    ok = round_trip == len(SM_FIXTURES) and not crashes
    verdict(8, ok, f"{round_trip}/{len(SM_FIXTURES)} fixtures round-trip; {prefixes} truncated prefixes, problems {crashes[:5]}")
