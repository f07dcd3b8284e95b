"""Six metaheuristics over real-valued genotypes under a fitness-evaluation budget."""
import time

import numpy as np

from ..errors import ConfigError
from . import cmaes, de, ga, immune
from .base import Budget, FunctionProblem, RunRecord, Tracker
from .config import (
    ALGORITHMS,
    CONFIGS,
    AisConfig,
    AlgorithmConfig,
    ClonalgConfig,
    CmaesConfig,
    DeConfig,
    RwConfig,
    SstConfig,
    config_from_dict,
    default_config,
)

_RUNNERS = {
    "ais": immune.run_ais,
    "clonalg": immune.run_clonalg,
    "cmaes": cmaes.run,
    "de": de.run,
    "rw": ga.run_rw,
    "sst": ga.run_sst,
}


def optimize(problem, config, budget=None, seed=0):
    """Minimize ``problem`` with the algorithm selected by ``config``.

    Parameters
    ----------
    problem : callable with a ``dim`` attribute
        Maps an ``(m, dim)`` array of candidates to ``m`` fitness values.
    config : AlgorithmConfig
    budget : Budget, optional
        Defaults to 100,000 evaluations.
    seed : int
        Seeds the algorithm's private PCG64 stream; equal seeds give equal records.

    Returns
    -------
    RunRecord
        Best-ever candidate, its fitness, the improvement trace and the
        number of evaluations used.
    """
    budget = budget or Budget()
    if isinstance(config, dict):
        config = config_from_dict(config)
    if type(config) not in CONFIGS.values():
        raise ConfigError(f"not an algorithm config: {config!r}")
    if problem.dim < 1:
        raise ConfigError(f"genotype length must be >= 1, got {problem.dim}")
    if budget.max_evaluations < config.population_size:
        raise ConfigError(
            f"budget of {budget.max_evaluations} evaluations is smaller than the "
            f"population size {config.population_size}"
        )
    rng = np.random.default_rng(seed)
    tracker = Tracker(problem, budget)
    start = time.perf_counter()
    _RUNNERS[config.tag](problem, config, tracker, rng)
    return tracker.record(config.tag, seed, config.to_dict(), time.perf_counter() - start)


__all__ = [
    "ALGORITHMS",
    "AisConfig",
    "AlgorithmConfig",
    "Budget",
    "ClonalgConfig",
    "CmaesConfig",
    "DeConfig",
    "FunctionProblem",
    "RunRecord",
    "RwConfig",
    "SstConfig",
    "config_from_dict",
    "default_config",
    "optimize",
]
