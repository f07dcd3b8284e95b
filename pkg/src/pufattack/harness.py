"""Benchmark grid: datasets, runs, persistence, aggregation and exports.

Results directory layout::

    <root>/<size>/<crp>/<alg>/run-<i>-<j>.rec   one JSON record per run
    <root>/<size>/<crp>/<alg>/manifest.txt      one line per finished run
    <root>/summary.csv                           minimum test errors
    <root>/spearman.csv                          train/test rank correlation
    <root>/violin-<size>-<alg>.csv               per-1000 errors, l-/t- columns
    <root>/scatter-<size>-<crp>-<alg>.csv        train vs test errors per run
    <root>/timing.log                            wall times (not deterministic)

Everything except ``timing.log`` is a pure function of the plan.
"""
import io
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache

import numpy as np
import yaml

from .attack import PufProblem, evaluate_test
from .errors import ConfigError, FormatError
from .fileio import load_record, save_record
from .optimizers import ALGORITHMS, Budget, config_from_dict, optimize
from .puf import generate_crp_set, sample_challenges, sample_puf_instance
from .seeding import check_seed, derive_seed
from .stats import is_undefined, spearman

log = logging.getLogger(__name__)

PUF_SIZES = ("1x16", "1x32", "1x64", "1x128", "4x16", "4x32", "4x64")
CRP_SIZES = (2000, 10000, 50000, 250000)
MISSING = "—"


def parse_size(token):
    """``"4x64"`` -> ``(k, n) = (4, 64)``."""
    parts = str(token).lower().split("x")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ValueError(f"malformed PUF size {token!r}; expected KxN such as 1x64 or 4x16")
    k, n = int(parts[0]), int(parts[1])
    if k < 1 or n < 1:
        raise ValueError(f"PUF size {token!r} needs k >= 1 and n >= 1")
    return k, n


@dataclass(frozen=True)
class ExperimentPlan:
    sizes: tuple = PUF_SIZES
    crps: tuple = CRP_SIZES
    algorithms: tuple = ALGORITHMS
    instances: int = 10
    runs: int = 5
    budget: int = 100_000
    target: int | None = None
    test_size: int = 1000
    master_seed: int = 0
    jobs: int = 1
    strict: bool = False
    configs: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(str(s).lower() for s in self.sizes))
        object.__setattr__(self, "crps", tuple(int(c) for c in self.crps))
        object.__setattr__(self, "algorithms", tuple(str(a).lower() for a in self.algorithms))
        for s in self.sizes:
            try:
                parse_size(s)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        for c in self.crps:
            if c < 1:
                raise ConfigError(f"CRP counts must be positive, got {c}")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r}; valid tags: {', '.join(ALGORITHMS)}")
        if self.instances < 1 or self.runs < 1 or self.test_size < 1 or self.jobs < 1:
            raise ConfigError("instances, runs, test_size and jobs must all be >= 1")
        check_seed(self.master_seed)
        resolved = {}
        for tag in ALGORITHMS:
            params = dict(self.configs.get(tag, {}))
            params.pop("algorithm", None)
            resolved[tag] = config_from_dict({"algorithm": tag, **params}).to_dict()
        object.__setattr__(self, "configs", resolved)
        Budget(self.budget, self.target)
        for a in self.algorithms:
            if self.budget < resolved[a]["population_size"]:
                raise ConfigError(f"budget {self.budget} is below the {a} population size")

    @property
    def runs_per_cell(self):
        return self.instances * self.runs

    def config_for(self, tag):
        return config_from_dict(self.configs[tag])

    def cells(self):
        return [(s, c, a) for s in self.sizes for c in self.crps for a in self.algorithms]

    def to_dict(self):
        doc = asdict(self)
        doc["sizes"] = list(self.sizes)
        doc["crps"] = list(self.crps)
        doc["algorithms"] = list(self.algorithms)
        configs = {}
        for tag, params in self.configs.items():
            params = {k: v for k, v in params.items() if k != "algorithm"}
            if params.get("generations_to_keep") == math.inf:
                params["generations_to_keep"] = "inf"
            configs[tag] = params
        doc["configs"] = configs
        return doc

    def to_yaml(self):
        return yaml.safe_dump({"plan": self.to_dict()}, sort_keys=False, default_flow_style=None)

    @classmethod
    def from_dict(cls, doc):
        doc = dict(doc.get("plan", doc))
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"unknown plan key(s): {', '.join(unknown)}")
        return cls(**doc)

    @classmethod
    def from_yaml(cls, text):
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"plan file is not valid YAML: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("plan file must be a mapping")
        return cls.from_dict(doc)


def load_plan(path):
    with open(path) as fh:
        return ExperimentPlan.from_yaml(fh.read())


# ---------------------------------------------------------------- datasets


def instance_seed(plan, size, i):
    return derive_seed(plan.master_seed, "instance", size, i)


def learning_seed(plan, size, i, crp):
    return derive_seed(plan.master_seed, "learning", size, i, crp)


def test_seed(plan, size, i):
    return derive_seed(plan.master_seed, "test", size, i)


def run_seed(plan, size, crp, alg, i, j):
    return derive_seed(plan.master_seed, "run", size, i, alg, crp, j)


@lru_cache(maxsize=16)
def _instance(n, k, seed):
    return sample_puf_instance(n, k, seed)


@lru_cache(maxsize=2)
def _learning(n, k, iseed, count, seed):
    return generate_crp_set(_instance(n, k, iseed), count, "learning", seed)


@lru_cache(maxsize=16)
def _test(n, k, iseed, count, seed, forbidden_spec):
    forbidden = [sample_challenges(n, c, s) for c, s in forbidden_spec]
    return generate_crp_set(_instance(n, k, iseed), count, "test", seed, forbidden=forbidden)


class Datasets:
    """Regenerates (and caches) the instances and CRP sets a plan refers to."""

    def __init__(self, plan):
        self.plan = plan

    def instance(self, size, i):
        k, n = parse_size(size)
        return _instance(n, k, instance_seed(self.plan, size, i))

    def learning(self, size, i, crp):
        k, n = parse_size(size)
        return _learning(n, k, instance_seed(self.plan, size, i), crp, learning_seed(self.plan, size, i, crp))

    def test(self, size, i):
        """The instance's single test set, kept disjoint from every learning set of the plan when possible."""
        k, n = parse_size(size)
        spec = tuple((c, learning_seed(self.plan, size, i, c)) for c in self.plan.crps)
        return _test(n, k, instance_seed(self.plan, size, i), self.plan.test_size, test_seed(self.plan, size, i), spec)


# ---------------------------------------------------------------- runs


def cell_dir(root, size, crp, alg):
    return os.path.join(root, size, str(crp), alg)


def record_path(root, size, crp, alg, i, j):
    return os.path.join(cell_dir(root, size, crp, alg), f"run-{i}-{j}.rec")


def run_single(plan, size, crp, alg, i, j, datasets=None):
    """One optimizer run on instance ``i`` of ``size``, scored on that instance's test set."""
    datasets = datasets or Datasets(plan)
    learning = datasets.learning(size, i, crp)
    test = datasets.test(size, i)
    seed = run_seed(plan, size, crp, alg, i, j)
    record = optimize(
        PufProblem(learning, strict=plan.strict),
        plan.config_for(alg),
        Budget(plan.budget, plan.target),
        seed=seed,
    )
    report = evaluate_test(record.best_genes, test, strict=plan.strict)
    record.test_errors = report.errors
    record.test_total = report.total
    record.meta = {
        "size": size,
        "crp": crp,
        "instance": i,
        "run": j,
        "instance_seed": learning.instance_seed,
        "learning_seed": learning.sampling_seed,
        "learning_size": len(learning),
        "test_seed": test.sampling_seed,
        "test_overlap_allowed": test.overlap_allowed,
        "master_seed": plan.master_seed,
    }
    return record


def _task(plan, root, size, crp, alg, i, j):
    record = run_single(plan, size, crp, alg, i, j)
    save_record(record, record_path(root, size, crp, alg, i, j))
    return record.best_fitness, record.test_errors, record.wall_time


def _manifest_line(i, j, train, test):
    return f"run-{i}-{j}.rec train_errors={train} test_errors={test}\n"


def _rebuild_manifest(plan, root, size, crp, alg):
    """Rewrite a cell manifest in canonical order from the record files actually present."""
    lines = []
    for i in range(plan.instances):
        for j in range(plan.runs):
            path = record_path(root, size, crp, alg, i, j)
            if _existing(path):
                rec = load_record(path)
                lines.append(_manifest_line(i, j, rec.best_fitness, rec.test_errors))
    with open(os.path.join(cell_dir(root, size, crp, alg), "manifest.txt"), "w") as fh:
        fh.writelines(lines)


def _existing(path):
    if not os.path.exists(path):
        return False
    try:
        load_record(path)
    except (FormatError, OSError, ValueError, KeyError):
        return False
    return True


def run_experiment(plan, root, progress=sys.stderr, jobs=None):
    """Run every missing cell of ``plan`` under ``root`` and return the aggregated cells.

    Finished runs are skipped, so an interrupted grid resumes where it
    stopped. Results do not depend on ``jobs``.
    """
    jobs = jobs or plan.jobs
    tasks = []
    for size in plan.sizes:
        for i in range(plan.instances):
            for crp in plan.crps:
                for alg in plan.algorithms:
                    for j in range(plan.runs):
                        if not _existing(record_path(root, size, crp, alg, i, j)):
                            tasks.append((size, crp, alg, i, j))
    for size, crp, alg in plan.cells():
        os.makedirs(cell_dir(root, size, crp, alg), exist_ok=True)

    def finish(task, outcome):
        size, crp, alg, i, j = task
        cdir = cell_dir(root, size, crp, alg)
        if isinstance(outcome, BaseException):
            log.error("run %s failed: %r", task, outcome)
            if progress:
                print(f"{size} {crp} {alg} instance={i} run={j} FAILED: {outcome!r}", file=progress, flush=True)
            return
        train, test, secs = outcome
        with open(os.path.join(cdir, "manifest.txt"), "a") as fh:
            fh.write(_manifest_line(i, j, train, test))
        with open(os.path.join(root, "timing.log"), "a") as fh:
            fh.write(f"{size} {crp} {alg} {i} {j} {secs:.3f}\n")
        if progress:
            print(
                f"{size} {crp} {alg} instance={i} run={j} train={train} test={test} {secs:.1f}s",
                file=progress,
                flush=True,
            )

    try:
        if jobs == 1:
            for task in tasks:
                try:
                    outcome = _task(plan, root, *task)
                except (MemoryError, OSError) as exc:
                    outcome = exc
                finish(task, outcome)
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = {pool.submit(_task, plan, root, *t): t for t in tasks}
                try:
                    for fut in as_completed(futures):
                        try:
                            outcome = fut.result()
                        except (MemoryError, OSError) as exc:
                            outcome = exc
                        finish(futures[fut], outcome)
                except KeyboardInterrupt:
                    pool.shutdown(wait=False, cancel_futures=True)
                    raise
    finally:
        # the append-only manifests are progress logs; settle them into canonical order
        for size, crp, alg in plan.cells():
            _rebuild_manifest(plan, root, size, crp, alg)

    cells = collect_results(plan, root)
    write_reports(plan, cells, root)
    return cells


# ---------------------------------------------------------------- aggregation


@dataclass
class CellResult:
    size: str
    crp: int
    algorithm: str
    records: list
    expected_runs: int

    @property
    def complete(self):
        return len(self.records) == self.expected_runs

    @property
    def test_errors(self):
        return [r.test_errors for r in self.records]

    @property
    def train_errors(self):
        return [r.best_fitness for r in self.records]

    def _stat(self, values, fn):
        return fn(values) if values else None

    @property
    def min_test(self):
        return self._stat(self.test_errors, min)

    @property
    def median_test(self):
        return self._stat(self.test_errors, lambda v: float(np.median(v)))

    @property
    def max_test(self):
        return self._stat(self.test_errors, max)

    @property
    def min_train(self):
        return self._stat(self.train_errors, min)

    @property
    def median_train(self):
        return self._stat(self.train_errors, lambda v: float(np.median(v)))

    @property
    def max_train(self):
        return self._stat(self.train_errors, max)

    @property
    def spearman(self):
        if len(self.records) < 2:
            return math.nan
        return spearman(self.train_errors, self.test_errors)

    @property
    def label(self):
        return f"{self.size}-{self.crp}-{self.algorithm}"


def load_cell(root, size, crp, alg, plan):
    records = []
    for i in range(plan.instances):
        for j in range(plan.runs):
            path = record_path(root, size, crp, alg, i, j)
            if _existing(path):
                records.append(load_record(path))
    return CellResult(size, crp, alg, records, plan.runs_per_cell)


def collect_results(plan, root):
    """Rebuild every cell of ``plan`` from the record files under ``root``."""
    return [load_cell(root, s, c, a, plan) for s, c, a in plan.cells()]


def _index(cells):
    return {(c.size, c.crp, c.algorithm): c for c in cells}


def summarize_min_errors(cells, plan):
    """Rows ``(size, crp, [min test error or None per algorithm])``; incomplete cells are None."""
    idx = _index(cells)
    rows = []
    for size in plan.sizes:
        for crp in plan.crps:
            vals = []
            for alg in plan.algorithms:
                cell = idx.get((size, crp, alg))
                vals.append(cell.min_test if cell is not None and cell.complete else None)
            rows.append((size, crp, vals))
    return rows


def spearman_rows(cells, plan, algorithm="cmaes"):
    """Rows ``(size, [rho or None per crp])`` for one algorithm."""
    idx = _index(cells)
    rows = []
    for size in plan.sizes:
        vals = []
        for crp in plan.crps:
            cell = idx.get((size, crp, algorithm))
            vals.append(cell.spearman if cell is not None and cell.complete else None)
        rows.append((size, vals))
    return rows


def _cellfmt(v, digits=None):
    if v is None:
        return MISSING
    if is_undefined(v):
        return "undefined"
    if digits is not None:
        return f"{v:.{digits}f}"
    return str(v)


def _aligned(header, rows):
    table = [header] + rows
    widths = [max(len(r[c]) for r in table) for c in range(len(header))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)).rstrip() for r in table) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    for r in [header] + rows:
        buf.write(",".join(r) + "\n")
    return buf.getvalue()


def min_table(cells, plan, fmt="text"):
    header = ["PUF", "CRP"] + [a.upper() if a != "cmaes" else "CMA-ES" for a in plan.algorithms]
    body = [[s, str(c)] + [_cellfmt(v) for v in vals] for s, c, vals in summarize_min_errors(cells, plan)]
    return _aligned(header, body) if fmt == "text" else _csv(header, body)


def spearman_table(cells, plan, algorithm="cmaes", fmt="text"):
    header = ["PUF"] + [str(c) for c in plan.crps]
    body = [[s] + [_cellfmt(v, 3) for v in vals] for s, vals in spearman_rows(cells, plan, algorithm)]
    return _aligned(header, body) if fmt == "text" else _csv(header, body)


def per_thousand(errors, total):
    return errors * 1000 / total


def export_violin(cells, size, algorithm, path, plan):
    """Per-run errors on a 0..1000 scale with ``l-<crp>`` (learning) and ``t-<crp>`` (test) columns."""
    idx = _index(cells)
    columns = []
    for crp in plan.crps:
        cell = idx.get((size, crp, algorithm))
        recs = cell.records if cell is not None else []
        columns.append((f"l-{crp}", [repr(per_thousand(r.best_fitness, r.meta["learning_size"])) for r in recs]))
        columns.append((f"t-{crp}", [repr(per_thousand(r.test_errors, r.test_total)) for r in recs]))
    depth = max((len(v) for _, v in columns), default=0)
    rows = [[vals[i] if i < len(vals) else "" for _, vals in columns] for i in range(depth)]
    _write_text(path, _csv([name for name, _ in columns], rows))


def export_scatter(cell, path):
    """One row per run: instance, run, raw and per-1000 train/test errors."""
    header = ["instance", "run", "train_errors", "test_errors", "train_per_1000", "test_per_1000"]
    rows = []
    for r in cell.records:
        rows.append(
            [
                str(r.meta["instance"]),
                str(r.meta["run"]),
                str(r.best_fitness),
                str(r.test_errors),
                repr(per_thousand(r.best_fitness, r.meta["learning_size"])),
                repr(per_thousand(r.test_errors, r.test_total)),
            ]
        )
    _write_text(path, _csv(header, rows))


def _write_text(path, text):
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_reports(plan, cells, root):
    _write_text(os.path.join(root, "summary.csv"), min_table(cells, plan, fmt="csv"))
    if "cmaes" in plan.algorithms:
        _write_text(os.path.join(root, "spearman.csv"), spearman_table(cells, plan, fmt="csv"))
    for size in plan.sizes:
        for alg in plan.algorithms:
            export_violin(cells, size, alg, os.path.join(root, f"violin-{size}-{alg}.csv"), plan)
    for cell in cells:
        if cell.complete:
            export_scatter(cell, os.path.join(root, f"scatter-{cell.label}.csv"))


def with_overrides(plan, **overrides):
    """Copy of ``plan`` with the non-None keyword values replaced."""
    return replace(plan, **{k: v for k, v in overrides.items() if v is not None})


def default_plan_yaml():
    return ExperimentPlan().to_yaml()
