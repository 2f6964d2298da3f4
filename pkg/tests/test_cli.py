import json
import math

import pytest

from srbrisk import FeasibilityReport, RiskReport, load_schedule
from srbrisk.cli import main
from srbrisk.data import fixture_path

J30_01 = str(fixture_path("j30_01.sm"))
EIGHT = "min-slack,latest-finish,shortest-duration,most-successors,random:1,random:2,random:3,random:4"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def check_report_schema(doc):
    """Hand-written check of the documented report.json layout."""
    assert set(doc) == {"schema", "run", "schedules", "ranking"} and doc["schema"] == 1
    run_ = doc["run"]
    for key, kind in (("seed", int), ("replications", int), ("family", str), ("cv_range", list), ("policies", dict)):
        assert isinstance(run_[key], kind), key
    assert set(run_["policies"]) == {"start", "ongoing"}
    labels = []
    for s in doc["schedules"]:
        assert set(s) == {"label", "planned", "mean", "p10", "p50", "p90", "srv", "feasible"}
        assert isinstance(s["feasible"], bool)
        if s["feasible"]:
            assert s["p10"] <= s["p50"] <= s["p90"] and s["srv"] >= 0
        labels.append(s["label"])
    assert set(doc["ranking"]) <= set(labels)


def table_labels(out):
    rows = [line.split() for line in out.splitlines()[1:] if line.strip()]
    return [r[1] for r in rows]


# -- validate --------------------------------------------------------------


def test_validate_feasible_exit_zero(capsys):
    code, out, _ = run(["validate", "--instance", fixture_path("overlap.sm"), fixture_path("overlap_ok.csv")], capsys)
    assert code == 0
    assert json.loads(out)["reports"][0]["feasible"] is True


def test_validate_overlap_lists_resource_and_period(tmp_path, capsys):
    code, _, err = run(
        ["validate", "--instance", fixture_path("overlap.sm"), fixture_path("overlap_bad.csv"), "--out", tmp_path],
        capsys,
    )
    assert code == 1
    assert "resource R1 period 0" in err
    doc = json.loads((tmp_path / "validation.json").read_text())
    viol = doc["reports"][0]["resource_violations"]
    assert [(v["resource"], v["period"]) for v in viol] == [("R1", 0)]


def test_validation_json_round_trips(capsys):
    _, out, _ = run(["validate", "--instance", fixture_path("overlap.sm"), fixture_path("overlap_bad.csv")], capsys)
    doc = json.loads(out)
    for entry in doc["reports"]:
        assert FeasibilityReport.from_dict(entry).to_dict() == entry


def test_validate_chain_plan(capsys):
    code, _, _ = run(["validate", "--instance", fixture_path("chain2.sm"), fixture_path("chain2_plan.csv")], capsys)
    assert code == 0


# -- rank ------------------------------------------------------------------


@pytest.fixture(scope="module")
def eight_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("rank")
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["rank", "--instance", J30_01, "--rules", EIGHT, "--reps", "1000", "--out", str(out)])
    return code, out, buf.getvalue()


def test_rank_eight_candidates(eight_run):
    code, out, stdout = eight_run
    assert code == 0
    assert len(list(out.glob("srb_*.csv"))) == 8
    doc = json.loads((out / "report.json").read_text())
    check_report_schema(doc)
    assert len(doc["ranking"]) == 8
    assert table_labels(stdout) == doc["ranking"]


def test_ranking_is_srv_ascending(eight_run):
    _, out, _ = eight_run
    report = RiskReport.from_dict(json.loads((out / "report.json").read_text()))
    srvs = [report.result(label).srv for label in report.ranking]
    assert srvs == sorted(srvs)


def test_report_round_trips(eight_run):
    _, out, _ = eight_run
    text = (out / "report.json").read_text()
    assert RiskReport.from_dict(json.loads(text)).to_json() == text


def test_curve_files_end_at_zero(eight_run):
    _, out, _ = eight_run
    for path in out.glob("srb_*.csv"):
        lines = path.read_text().splitlines()
        assert lines[0] == "t,variance,mean,sd"
        assert float(lines[-1].split(",")[1]) == 0.0


def test_zero_cv_single_candidate_prints_zero_srv(tmp_path, capsys):
    code, out, _ = run(
        ["rank", "--instance", J30_01, "--rules", "min-slack", "--cv-lo", 0, "--cv-hi", 0, "--reps", 50, "--out", tmp_path],
        capsys,
    )
    assert code == 0
    assert out.splitlines()[1].split()[-1] == "0.00"


def test_rerun_is_byte_identical(tmp_path, capsys):
    args = ["rank", "--instance", J30_01, "--rules", "min-slack,random:5", "--reps", 3000, "--seed", 9]
    run(args + ["--out", tmp_path / "a"], capsys)
    run(args + ["--out", tmp_path / "b", "--workers", 3], capsys)
    for name in ("report.json", "model.json", "srb_min-slack.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_model_sidecar_reproduces_run(tmp_path, capsys):
    args = ["--instance", J30_01, "--rules", "latest-finish,random:2", "--reps", 500]
    run(["rank", *args, "--seed", 4, "--cv-seed", 8, "--policy-start", "precedence-only", "--grid-step", 2,
         "--out", tmp_path / "a"], capsys)
    run(["rank", *args, "--model", tmp_path / "a" / "model.json", "--out", tmp_path / "b"], capsys)
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()


def test_infeasible_candidates_are_rejected(tmp_path, capsys):
    code, _, err = run(["rank", "--instance", fixture_path("overlap.sm"), fixture_path("overlap_bad.csv"),
                        "--reps", 20, "--out", tmp_path], capsys)
    assert code == 1
    assert "rejected infeasible schedule bad" in err
    code, _, _ = run(["rank", "--instance", fixture_path("overlap.sm"), fixture_path("overlap_bad.csv"),
                      fixture_path("overlap_ok.csv"), "--reps", 20, "--out", tmp_path], capsys)
    assert code == 0
    assert json.loads((tmp_path / "report.json").read_text())["ranking"] == ["ok"]


def test_multiproject_rank(tmp_path, capsys):
    code, _, _ = run(["rank", "--problem", fixture_path("mp_demo.txt"), "--rules", "min-slack,random:1",
                      "--reps", 200, "--out", tmp_path], capsys)
    assert code == 0
    check_report_schema(json.loads((tmp_path / "report.json").read_text()))


# -- curve -----------------------------------------------------------------


def test_curve_with_gnuplot(tmp_path, capsys):
    code, _, _ = run(["curve", "--instance", fixture_path("chain2.sm"), fixture_path("chain2_plan.csv"),
                      "--reps", 20_000, "--policy-start", "precedence-only", "--gnuplot", "--out", tmp_path], capsys)
    assert code == 0
    rows = [line.split() for line in (tmp_path / "srb_plan.dat").read_text().splitlines() if not line.startswith("#")]
    assert [int(r[0]) for r in rows] == list(range(8))
    assert float(rows[0][1]) == pytest.approx(2.0, rel=0.05)
    assert float(rows[-1][1]) == 0.0


def test_curve_zero_cv(tmp_path, capsys):
    code, out, _ = run(["curve", "--instance", J30_01, "--rule", "min-slack", "--cv-hi", 0, "--cv-lo", 0,
                        "--reps", 10, "--out", tmp_path], capsys)
    assert code == 0 and out.splitlines()[1].split()[-1] == "0.00"


def test_curve_needs_one_schedule(tmp_path, capsys):
    code, _, err = run(["curve", "--instance", J30_01, "--out", tmp_path], capsys)
    assert code == 2 and "exactly one" in err


# -- sgs -------------------------------------------------------------------


def test_sgs_to_stdout(capsys):
    code, out, _ = run(["sgs", "--instance", fixture_path("chain2.sm")], capsys)
    assert code == 0
    assert "project,activity,start" in out


def test_sgs_writes_files(tmp_path, capsys):
    code, out, _ = run(["sgs", "--instance", J30_01, "--rule", "min-slack", "--rule", "random:3", "--out", tmp_path], capsys)
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["min-slack.csv", "random_3.csv"]
    assert load_schedule(tmp_path / "random_3.csv").label == "random:3"


# -- config and errors -----------------------------------------------------


def test_config_file_with_flag_override(tmp_path, capsys):
    (tmp_path / "cfg.json").write_text(json.dumps({
        "instance": str(fixture_path("j30_02.sm")), "rules": ["min-slack"], "replications": 100,
        "out": "runs", "seed": 3,
    }))
    code, _, _ = run(["rank", "--config", tmp_path / "cfg.json", "--seed", 5], capsys)
    assert code == 0
    run_ = json.loads((tmp_path / "runs" / "report.json").read_text())["run"]
    assert run_["seed"] == 5 and run_["replications"] == 100


@pytest.mark.parametrize(
    "argv",
    [
        ["rank", "--instance", "/nonexistent.sm", "--rules", "min-slack"],
        ["rank", "--instance", J30_01, "--rules", "min-slack", "--cv-lo", "0.3", "--cv-hi", "0.1"],
        ["rank", "--instance", J30_01, "--rules", "min-slack", "--reps", "1"],
        ["rank", "--instance", J30_01, "--rules", "min-slack", "--grid-step", "0"],
        ["rank", "--instance", J30_01, "--rules", "fastest"],
        ["rank", "--instance", J30_01],
        ["rank", "--instance", J30_01, "--problem", str(fixture_path("mp_demo.txt")), "--rules", "min-slack"],
        ["validate", "--instance", J30_01],
    ],
)
def test_errors_exit_two(argv, tmp_path, capsys):
    code, _, err = run(argv + ["--out", tmp_path] if argv[0] == "rank" else argv, capsys)
    assert code == 2
    assert err.startswith("error:")


def test_parse_error_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.sm"
    bad.write_text(open(fixture_path("j30_01.sm")).read()[:400])
    code, _, err = run(["sgs", "--instance", bad], capsys)
    assert code == 2 and "error:" in err


def test_unknown_config_key(tmp_path, capsys):
    (tmp_path / "cfg.json").write_text('{"instanse": "x.sm"}')
    code, _, err = run(["rank", "--config", tmp_path / "cfg.json"], capsys)
    assert code == 2 and "instanse" in err


def test_srv_values_in_table_match_report(eight_run):
    _, out, stdout = eight_run
    doc = json.loads((out / "report.json").read_text())
    printed = {r.split()[1]: float(r.split()[-1]) for r in stdout.splitlines()[1:] if r.strip()}
    for s in doc["schedules"]:
        assert math.isclose(printed[s["label"]], round(s["srv"], 2), abs_tol=0.006)
