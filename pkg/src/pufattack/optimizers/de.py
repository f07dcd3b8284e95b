"""Differential evolution, DE/rand/1/bin with synchronous generations."""
import numpy as np

from .operators import random_init


def pick_partners(pop_size, rng):
    """Three mutually distinct partner indices per target, none equal to the target."""
    keys = rng.random((pop_size, pop_size))
    np.fill_diagonal(keys, 2.0)
    part = np.argpartition(keys, 3, axis=1)[:, :3]
    order = np.argsort(np.take_along_axis(keys, part, axis=1), axis=1)
    return np.take_along_axis(part, order, axis=1)


def make_trials(pop, F, CR, rng):
    P, d = pop.shape
    r = pick_partners(P, rng)
    donors = pop[r[:, 0]] + F * (pop[r[:, 1]] - pop[r[:, 2]])
    cross = rng.random((P, d)) < CR
    cross[np.arange(P), rng.integers(0, d, P)] = True
    return np.where(cross, donors, pop)


def run(problem, config, tracker, rng):
    P, d = config.population_size, problem.dim
    pop = random_init(d, rng, P)
    fit = tracker.evaluate(pop)
    while not tracker.done:
        trials = make_trials(pop, config.scaling_constant, config.crossover_rate, rng)
        m = tracker.affordable(P)
        ft = tracker.evaluate(trials[:m])
        # ties go to the trial so the population drifts across plateaus
        win = np.flatnonzero(ft <= fit[:m])
        pop[win] = trials[win]
        fit[win] = ft[win]
    return pop, fit
