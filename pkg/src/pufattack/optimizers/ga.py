"""Genetic algorithms: generational roulette wheel (RW) and steady-state tournament (SST)."""
import numpy as np

from .operators import arithmetic_crossover, gaussian_mutation, random_init


def roulette_weights(errors, pressure):
    """Linear scaling of error counts into selection weights.

    The best individual gets ``pressure`` times the weight of the worst;
    everything in between is interpolated linearly. Equal errors give
    uniform weights.
    """
    e = np.asarray(errors, dtype=np.float64)
    best, worst = e.min(), e.max()
    if worst == best:
        return np.ones_like(e)
    return 1.0 + (pressure - 1.0) * (worst - e) / (worst - best)


def run_rw(problem, config, tracker, rng):
    P, d = config.population_size, problem.dim
    gene_rate = config.gene_mutation_rate if config.gene_mutation_rate is not None else 1.0 / d
    pop = random_init(d, rng, P)
    fit = tracker.evaluate(pop)
    while not tracker.done:
        weights = roulette_weights(fit, config.selection_pressure)
        elite = int(np.argmin(fit))
        n_kids = P - 1
        parents = rng.choice(P, size=(n_kids, 2), p=weights / weights.sum())
        a, b = pop[parents[:, 0]], pop[parents[:, 1]]
        do_cx = rng.random(n_kids) < config.crossover_probability
        kids = np.where(do_cx[:, None], arithmetic_crossover(a, b, rng.random(n_kids)), a)
        do_mut = rng.random(n_kids) < config.mutation_probability
        kids = np.where(do_mut[:, None], gaussian_mutation(kids, gene_rate, config.sigma, rng), kids)
        m = tracker.affordable(n_kids)
        fk = tracker.evaluate(kids[:m])
        if m < n_kids:
            break
        pop = np.vstack([pop[elite], kids])
        fit = np.concatenate([fit[elite : elite + 1], fk])
    return pop, fit


def tournament_loser(members, fit, protected):
    """Worst member of a tournament; the ``protected`` index is never chosen."""
    worst = None
    for i in members:
        if i == protected:
            continue
        if worst is None or fit[i] > fit[worst]:
            worst = i
    return worst


def run_sst(problem, config, tracker, rng):
    P, d = config.population_size, problem.dim
    gene_rate = config.gene_mutation_rate if config.gene_mutation_rate is not None else 1.0 / d
    pop = random_init(d, rng, P)
    fit = tracker.evaluate(pop)
    while not tracker.done:
        members = rng.choice(P, config.tournament_size, replace=False)
        best = int(np.argmin(fit))
        loser = tournament_loser(members, fit, best)
        others = [i for i in members if i != loser]
        a = others[0]
        b = others[1] if len(others) > 1 else a
        child = arithmetic_crossover(pop[a], pop[b], rng.random())
        if rng.random() < config.mutation_probability:
            child = gaussian_mutation(child, gene_rate, config.sigma, rng)
        fit[loser] = tracker.evaluate(child[None, :])[0]
        pop[loser] = child
    return pop, fit
