"""Budget accounting and run bookkeeping shared by all optimizers."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class Budget:
    """Fitness-evaluation budget.

    Every evaluated candidate counts, including the initial population.
    ``target`` optionally ends the run once the best fitness is ``<= target``.
    With an integer fitness bounded below by 0, ``target=0`` only skips
    evaluations that can no longer change the best candidate or the trace.
    """

    max_evaluations: int = 100_000
    target: float | None = None

    def __post_init__(self):
        if self.max_evaluations < 1:
            raise ConfigError(f"max_evaluations must be >= 1, got {self.max_evaluations}")


@dataclass
class RunRecord:
    algorithm: str
    seed: int
    best_genes: np.ndarray
    best_fitness: float
    evaluations: int
    trace: list
    config: dict = field(default_factory=dict)
    wall_time: float = 0.0
    test_errors: int | None = None
    test_total: int | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "best_genes": self.best_genes,
            "best_fitness": _plain(self.best_fitness),
            "evaluations": self.evaluations,
            "trace": [[int(i), _plain(f)] for i, f in self.trace],
            "config": dict(self.config),
            "wall_time": self.wall_time,
            "test_errors": self.test_errors,
            "test_total": self.test_total,
            "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, doc):
        doc = dict(doc)
        doc["trace"] = [(int(i), f) for i, f in doc["trace"]]
        doc["best_genes"] = np.asarray(doc["best_genes"], dtype=np.float64)
        return cls(**doc)

    @property
    def train_errors(self):
        return self.best_fitness

    def same_outcome(self, other):
        """Equality ignoring wall time."""
        a, b = self.to_dict(), other.to_dict()
        a.pop("wall_time")
        b.pop("wall_time")
        ga, gb = a.pop("best_genes"), b.pop("best_genes")
        return a == b and np.array_equal(ga, gb)


def _plain(x):
    if isinstance(x, (np.integer, int)):
        return int(x)
    return float(x)


class FunctionProblem:
    """Wrap a scalar objective ``f(x) -> float`` as a batch problem of dimension ``dim``."""

    def __init__(self, fn, dim):
        self.fn = fn
        self.dim = dim

    def __call__(self, population):
        return np.array([self.fn(x) for x in np.atleast_2d(population)])


class BudgetExhausted(Exception):
    pass


class Tracker:
    """Counts evaluations against the budget and keeps the best-so-far candidate.

    The trace holds ``(evaluation index, fitness)`` for every strict
    improvement, so it is non-increasing and ends at the best fitness.
    """

    def __init__(self, problem, budget):
        self.problem = problem
        self.budget = budget
        self.used = 0
        self.best_genes = None
        self.best_fitness = np.inf
        self.trace = []

    @property
    def remaining(self):
        return self.budget.max_evaluations - self.used

    @property
    def done(self):
        if self.remaining <= 0:
            return True
        t = self.budget.target
        return t is not None and self.best_fitness <= t

    def evaluate(self, population):
        pop = np.atleast_2d(np.asarray(population, dtype=np.float64))
        if pop.shape[0] > self.remaining:
            raise BudgetExhausted(f"{pop.shape[0]} evaluations requested, {self.remaining} left")
        values = np.asarray(self.problem(pop))
        if values.shape != (pop.shape[0],):
            raise ValueError(f"problem returned shape {values.shape} for {pop.shape[0]} candidates")
        for i, f in enumerate(values):
            if f < self.best_fitness:
                self.best_fitness = f
                self.best_genes = pop[i].copy()
                self.trace.append((self.used + i + 1, _plain(f)))
        self.used += pop.shape[0]
        return values

    def affordable(self, count):
        """How many of ``count`` planned evaluations fit in the remaining budget."""
        return max(0, min(count, self.remaining))

    def record(self, algorithm, seed, config, wall_time):
        return RunRecord(
            algorithm=algorithm,
            seed=seed,
            best_genes=self.best_genes,
            best_fitness=_plain(self.best_fitness),
            evaluations=self.used,
            trace=list(self.trace),
            config=config,
            wall_time=wall_time,
        )
