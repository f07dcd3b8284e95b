import filecmp
import os

import numpy as np
import pytest
import yaml

from pufattack import harness
from pufattack.errors import ConfigError
from pufattack.fileio import load_record
from pufattack.harness import (
    MISSING,
    CellResult,
    Datasets,
    ExperimentPlan,
    collect_results,
    export_scatter,
    export_violin,
    load_plan,
    min_table,
    parse_size,
    per_thousand,
    run_experiment,
    spearman_table,
    summarize_min_errors,
)
from pufattack.optimizers import RunRecord


def tiny_plan(**kw):
    base = dict(sizes=["1x8"], crps=[200, 400], algorithms=["cmaes", "de"], instances=2, runs=2, budget=600)
    base.update(kw)
    return ExperimentPlan(**base)


def tree(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in files:
            if f != "timing.log":
                p = os.path.join(dirpath, f)
                out[os.path.relpath(p, root)] = open(p, "rb").read()
    return out


def test_parse_size():
    assert parse_size("4x64") == (4, 64)
    assert parse_size("1X16") == (1, 16)
    for bad in ["5y3", "x16", "0x16", "4x0", "4x", "4x16x2", ""]:
        with pytest.raises(ValueError):
            parse_size(bad)


def test_default_plan_matches_protocol():
    plan = ExperimentPlan()
    assert plan.sizes == ("1x16", "1x32", "1x64", "1x128", "4x16", "4x32", "4x64")
    assert plan.crps == (2000, 10000, 50000, 250000)
    assert len(plan.algorithms) == 6
    assert plan.runs_per_cell == 50 and plan.budget == 100_000
    assert len(plan.cells()) == 7 * 4 * 6


def test_plan_yaml_roundtrip(tmp_path):
    plan = tiny_plan(configs={"de": {"scaling_constant": 0.5}}, target=0)
    text = plan.to_yaml()
    assert "plan" in yaml.safe_load(text)
    back = ExperimentPlan.from_yaml(text)
    assert back == plan and back.config_for("de").scaling_constant == 0.5
    p = tmp_path / "plan.yaml"
    p.write_text(ExperimentPlan().to_yaml())
    assert load_plan(p) == ExperimentPlan()


@pytest.mark.parametrize(
    "doc",
    [
        {"plan": {"sizes": ["4y16"]}},
        {"plan": {"algorithms": ["pso"]}},
        {"plan": {"bogus": 1}},
        {"plan": {"runs": 0}},
        {"plan": {"configs": {"de": {"population_size": 2}}}},
        {"plan": {"budget": 10}},
    ],
)
def test_plan_validation(doc):
    with pytest.raises(ConfigError):
        ExperimentPlan.from_dict(doc)
    with pytest.raises(ConfigError):
        ExperimentPlan.from_yaml("- not a mapping")


def test_seeds_are_distinct_and_regenerable():
    plan = tiny_plan()
    seeds = {harness.instance_seed(plan, "1x8", i) for i in range(10)}
    seeds |= {harness.learning_seed(plan, "1x8", 0, c) for c in (200, 400)}
    seeds |= {harness.run_seed(plan, "1x8", 200, "de", 0, j) for j in range(5)}
    assert len(seeds) == 17
    other = tiny_plan(master_seed=1)
    assert harness.instance_seed(other, "1x8", 0) != harness.instance_seed(plan, "1x8", 0)
    d = Datasets(plan)
    assert d.learning("1x8", 1, 200).instance_seed == harness.instance_seed(plan, "1x8", 1)


def test_test_set_is_disjoint_from_every_learning_set():
    plan = tiny_plan(sizes=["1x16"], crps=[500, 2000])
    d = Datasets(plan)
    test = d.test("1x16", 0)
    assert not test.overlap_allowed
    keys = {r.tobytes() for c in plan.crps for r in d.learning("1x16", 0, c).challenges}
    assert all(r.tobytes() not in keys for r in test.challenges)
    assert test.verify(d.instance("1x16", 0)) == 0


def test_counting_example(tmp_path):
    plan = tiny_plan(crps=[200], algorithms=["cmaes"], instances=2, runs=1)
    cells = run_experiment(plan, tmp_path, progress=None)
    assert len(cells) == 1 and len(cells[0].records) == 2 and cells[0].complete
    assert sorted(os.listdir(tmp_path / "1x8" / "200" / "cmaes")) == ["manifest.txt", "run-0-0.rec", "run-1-0.rec"]


def test_grid_is_deterministic_and_recomputable(tmp_path):
    plan = tiny_plan()
    a = run_experiment(plan, tmp_path / "a", progress=None)
    run_experiment(plan, tmp_path / "b", progress=None)
    assert tree(tmp_path / "a") == tree(tmp_path / "b")
    again = collect_results(plan, tmp_path / "a")
    assert [c.test_errors for c in again] == [c.test_errors for c in a]
    for cell in a:
        assert cell.min_test <= min(cell.test_errors) and cell.min_test in cell.test_errors
        rho = cell.spearman
        assert rho != rho or -1 <= rho <= 1


def test_parallel_jobs_give_identical_files(tmp_path):
    plan = tiny_plan(algorithms=["sst"], budget=400)
    run_experiment(plan, tmp_path / "one", progress=None, jobs=1)
    run_experiment(plan, tmp_path / "two", progress=None, jobs=2)
    assert tree(tmp_path / "one") == tree(tmp_path / "two")


def test_resume_runs_only_missing(tmp_path, monkeypatch):
    plan = tiny_plan()
    run_experiment(plan, tmp_path / "full", progress=None)
    run_experiment(plan, tmp_path / "part", progress=None)
    cell = tmp_path / "part" / "1x8" / "400" / "de"
    os.remove(cell / "run-1-0.rec")
    (cell / "run-0-1.rec").write_text("{ truncated")
    lines = (cell / "manifest.txt").read_text().splitlines(keepends=True)
    (cell / "manifest.txt").write_text("".join(lines[:2]))
    done = []
    real = harness._task
    monkeypatch.setattr(harness, "_task", lambda *a: done.append(a[2:]) or real(*a))
    run_experiment(plan, tmp_path / "part", progress=None)
    assert sorted(done) == [("1x8", 400, "de", 0, 1), ("1x8", 400, "de", 1, 0)]
    assert tree(tmp_path / "full") == tree(tmp_path / "part")


def test_failed_run_marks_cell_incomplete(tmp_path, monkeypatch):
    plan = tiny_plan(crps=[200])
    real = harness._task

    def flaky(p, root, size, crp, alg, i, j):
        if (alg, i, j) == ("de", 1, 1):
            raise MemoryError("simulated")
        return real(p, root, size, crp, alg, i, j)

    monkeypatch.setattr(harness, "_task", flaky)
    cells = {c.algorithm: c for c in run_experiment(plan, tmp_path, progress=None)}
    assert cells["cmaes"].complete and not cells["de"].complete
    assert MISSING in min_table(list(cells.values()), plan)
    rows = summarize_min_errors(list(cells.values()), plan)
    assert rows[0][2][1] is None and rows[0][2][0] is not None


def _fake(test_errors, train_errors, learning_size=2000):
    recs = []
    for n, (te, tr) in enumerate(zip(test_errors, train_errors)):
        recs.append(
            RunRecord("cmaes", n, np.zeros(3), tr, 100, [(1, tr)], test_errors=te, test_total=1000,
                      meta={"instance": n, "run": 0, "learning_size": learning_size})
        )
    return recs


def test_summary_min_and_missing():
    plan = ExperimentPlan(sizes=["1x16"], crps=[2000, 10000], algorithms=["cmaes"], instances=3, runs=1)
    full = CellResult("1x16", 2000, "cmaes", _fake([12, 3, 44], [5, 1, 9]), 3)
    empty = CellResult("1x16", 10000, "cmaes", [], 3)
    rows = summarize_min_errors([full, empty], plan)
    assert rows == [("1x16", 2000, [3]), ("1x16", 10000, [None])]
    text = min_table([full, empty], plan)
    assert "—" in text and "CMA-ES" in text
    csv = min_table([full, empty], plan, fmt="csv").splitlines()
    assert csv[0] == "PUF,CRP,CMA-ES" and csv[1] == "1x16,2000,3" and csv[2] == "1x16,10000,—"
    assert spearman_table([full, empty], plan, fmt="csv").splitlines()[1] == "1x16,1.000,—"


def test_constant_cell_spearman_is_undefined():
    plan = ExperimentPlan(sizes=["1x16"], crps=[2000], algorithms=["cmaes"], instances=3, runs=1)
    cell = CellResult("1x16", 2000, "cmaes", _fake([0, 0, 0], [0, 0, 0]), 3)
    assert "undefined" in spearman_table([cell], plan)


def test_exports(tmp_path):
    assert per_thousand(500, 2000) == 250
    plan = ExperimentPlan(sizes=["1x16"], crps=[2000], algorithms=["cmaes"], instances=50, runs=1)
    cell = CellResult("1x16", 2000, "cmaes", _fake(list(range(50)), [500] * 50), 50)
    export_scatter(cell, tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert len(lines) == 51 and lines[1].split(",")[4] == "250.0"
    export_violin([cell], "1x16", "cmaes", tmp_path / "v.csv", plan)
    lines = (tmp_path / "v.csv").read_text().splitlines()
    assert lines[0] == "l-2000,t-2000" and lines[1] == "250.0,0.0" and len(lines) == 51


def test_written_reports(tmp_path):
    plan = tiny_plan(crps=[200], algorithms=["cmaes"])
    run_experiment(plan, tmp_path, progress=None)
    names = set(os.listdir(tmp_path))
    assert {"summary.csv", "spearman.csv", "violin-1x8-cmaes.csv", "scatter-1x8-200-cmaes.csv", "timing.log"} <= names
    rec = load_record(tmp_path / "1x8" / "200" / "cmaes" / "run-0-0.rec")
    assert rec.meta["instance"] == 0 and rec.test_total == plan.test_size
    assert filecmp.cmp(tmp_path / "summary.csv", tmp_path / "summary.csv")
