"""Real-vector variation operators shared by the evolutionary algorithms."""
import numpy as np


def random_init(length, rng, count=None):
    """Genes drawn i.i.d. from N(0, 1): shape ``(length,)`` or ``(count, length)``."""
    shape = (length,) if count is None else (count, length)
    return rng.standard_normal(shape)


def gaussian_mutation(genes, rate, sigma, rng):
    """Add N(0, sigma**2) noise to each gene independently with probability ``rate``.

    Works on a single genotype or a ``(m, d)`` batch; ``rate`` may be an array
    broadcastable against ``genes``. Unselected genes are returned unchanged.
    """
    genes = np.asarray(genes, dtype=np.float64)
    mask = rng.random(genes.shape) < rate
    noise = rng.normal(0.0, sigma, genes.shape)
    return np.where(mask, genes + noise, genes)


def arithmetic_crossover(a, b, u):
    """Whole arithmetic crossover ``a * u + b * (1 - u)``, written as ``b + u * (a - b)``.

    The rewritten form returns ``a`` exactly when ``a == b``. ``u`` is a scalar
    or one weight per row of a batch.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if u.ndim == 1 and a.ndim == 2:
        u = u[:, None]
    return b + u * (a - b)
