"""
A small benchmark grid
======================

Run a reduced grid through the harness, then print the summary tables.
Records land in ``demo-results/``; rerunning the script resumes instead
of recomputing.
"""
import sys

from pufattack.harness import ExperimentPlan, min_table, run_experiment, spearman_table

plan = ExperimentPlan(
    sizes=["1x16", "2x16"],
    crps=[1000, 5000],
    algorithms=["cmaes", "de", "sst"],
    instances=3,
    runs=2,
    budget=10000,
)
print(plan.to_yaml())

cells = run_experiment(plan, "demo-results", progress=sys.stdout)
print(min_table(cells, plan))
print()
print(spearman_table(cells, plan, algorithm="cmaes"))
