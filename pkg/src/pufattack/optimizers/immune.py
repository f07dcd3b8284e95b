"""Immune-inspired optimizers: CLONALG and an aging clonal AIS."""
import math

import numpy as np

from .operators import gaussian_mutation, random_init


def clone_counts(pop_size, beta, n_select):
    """Clones per selected antibody: ``round(beta * pop_size / rank)`` for ranks 1..n_select."""
    return [int(math.floor(beta * pop_size / i + 0.5)) for i in range(1, n_select + 1)]


def normalized_errors(values, fit):
    """Map errors onto [0, 1] relative to the population range (0 = best)."""
    lo, hi = np.min(fit), np.max(fit)
    if hi == lo:
        return np.zeros(len(values))
    return (np.asarray(values, dtype=np.float64) - lo) / (hi - lo)


def hypermutation_step(scale, norm_err):
    """Gaussian step size per antibody: ``scale`` for the best, growing by e for the worst."""
    return scale * np.exp(np.asarray(norm_err, dtype=np.float64))


def run_clonalg(problem, config, tracker, rng):
    P, d = config.population_size, problem.dim
    counts = clone_counts(P, config.clones_per_antibody, config.cloned_antibodies)
    n_regen = int(math.floor(config.regenerated_fraction * P + 0.5))
    pop = random_init(d, rng, P)
    fit = tracker.evaluate(pop)
    while not tracker.done:
        order = np.argsort(fit, kind="stable")
        selected = order[: config.cloned_antibodies]
        steps = hypermutation_step(config.sigma * config.mutation_rate, normalized_errors(fit[selected], fit))
        parent = np.repeat(selected, counts)
        # every gene of a clone moves; poorer antibodies take larger steps
        noise = rng.standard_normal((len(parent), d))
        clones = pop[parent] + noise * np.repeat(steps, counts)[:, None]
        m = tracker.affordable(len(clones))
        fc = tracker.evaluate(clones[:m])
        for p in selected:
            mine = np.flatnonzero(parent[:m] == p)
            if mine.size == 0:
                continue
            j = mine[np.argmin(fc[mine])]
            if fc[j] <= fit[p]:
                pop[p] = clones[j]
                fit[p] = fc[j]
        if n_regen and not tracker.done:
            worst = np.argsort(fit, kind="stable")[::-1][:n_regen]
            worst = worst[: tracker.affordable(len(worst))]
            fresh = random_init(d, rng, len(worst))
            fit[worst] = tracker.evaluate(fresh)
            pop[worst] = fresh
    return pop, fit


def run_ais(problem, config, tracker, rng):
    P, d, nc = config.population_size, problem.dim, config.number_of_clones
    max_age = config.generations_to_keep
    pop = random_init(d, rng, P)
    fit = tracker.evaluate(pop)
    age = np.zeros(P)
    while not tracker.done:
        age = age + 1
        parent = np.repeat(np.arange(len(pop)), nc)
        clones = gaussian_mutation(pop[parent], config.mutation_rate, config.sigma, rng)
        m = tracker.affordable(len(clones))
        fc = tracker.evaluate(clones[:m])
        clones, parent = clones[:m], parent[:m]
        cage = age[parent].copy()
        cage[fc < fit[parent]] = 0

        all_pop = np.vstack([pop, clones])
        all_fit = np.concatenate([fit, fc])
        all_age = np.concatenate([age, cage])
        alive = all_age <= max_age
        alive[int(np.argmin(all_fit))] = True
        idx = np.flatnonzero(alive)
        keep = idx[np.argsort(all_fit[idx], kind="stable")[:P]]
        pop, fit, age = all_pop[keep], all_fit[keep], all_age[keep]

        missing = tracker.affordable(P - len(pop))
        if missing and not tracker.done:
            fresh = random_init(d, rng, missing)
            pop = np.vstack([pop, fresh])
            fit = np.concatenate([fit, tracker.evaluate(fresh)])
            age = np.concatenate([age, np.zeros(missing)])
    return pop, fit
