"""Canonical (mu/mu_w, lambda) CMA-ES without restarts.

Learning rates and damping follow the standard defaults from Hansen's CMA-ES
tutorial. Recombination uses positive log-rank weights over the ``mu`` best.
"""
import logging
import math

import numpy as np

log = logging.getLogger(__name__)


class CMAES:
    """Sampling distribution state; call :meth:`ask` then :meth:`tell` once per generation."""

    def __init__(self, dim, lam=20, mu=3, sigma0=1.0, mean=None, rng=None):
        self.N = N = dim
        self.lam = lam
        self.mu = mu
        self.rng = rng if rng is not None else np.random.default_rng()
        w = math.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
        self.weights = w / w.sum()
        self.mueff = 1.0 / np.sum(self.weights**2)
        me = self.mueff
        self.cc = (4 + me / N) / (N + 4 + 2 * me / N)
        self.cs = (me + 2) / (N + me + 5)
        self.c1 = 2 / ((N + 1.3) ** 2 + me)
        self.cmu = min(1 - self.c1, 2 * (me - 2 + 1 / me) / ((N + 2) ** 2 + me))
        self.damps = 1 + 2 * max(0.0, math.sqrt((me - 1) / (N + 1)) - 1) + self.cs
        self.chiN = math.sqrt(N) * (1 - 1 / (4 * N) + 1 / (21 * N**2))

        self.sigma0 = sigma0
        self.sigma = sigma0
        self.mean = np.zeros(N) if mean is None else np.array(mean, dtype=np.float64)
        self.pc = np.zeros(N)
        self.ps = np.zeros(N)
        self.C = np.eye(N)
        self.B = np.eye(N)
        self.D = np.ones(N)
        self.invsqrtC = np.eye(N)
        self.generation = 0
        self.counteval = 0
        self.eigeneval = 0
        self.resets = 0
        self._y = None

    def ask(self):
        """Sample ``lam`` candidates ``mean + sigma * B D z``."""
        z = self.rng.standard_normal((self.lam, self.N))
        self._y = (z * self.D) @ self.B.T
        return self.mean + self.sigma * self._y

    def tell(self, fitness):
        """Update the distribution from the fitness of the last :meth:`ask` batch."""
        N, mu, w = self.N, self.mu, self.weights
        idx = np.argsort(np.asarray(fitness), kind="stable")[:mu]
        ysel = self._y[idx]
        yw = w @ ysel
        self.generation += 1
        self.counteval += self.lam
        self.mean = self.mean + self.sigma * yw

        cs, cc, c1, cmu = self.cs, self.cc, self.c1, self.cmu
        self.ps = (1 - cs) * self.ps + math.sqrt(cs * (2 - cs) * self.mueff) * (self.invsqrtC @ yw)
        ps_norm = np.linalg.norm(self.ps)
        hsig = ps_norm / math.sqrt(1 - (1 - cs) ** (2 * self.generation)) / self.chiN < 1.4 + 2 / (N + 1)
        self.pc = (1 - cc) * self.pc + hsig * math.sqrt(cc * (2 - cc) * self.mueff) * yw
        rank_mu = (ysel.T * w) @ ysel
        self.C = (
            (1 - c1 - cmu) * self.C
            + c1 * (np.outer(self.pc, self.pc) + (1 - hsig) * cc * (2 - cc) * self.C)
            + cmu * rank_mu
        )
        self.sigma *= math.exp((cs / self.damps) * (ps_norm / self.chiN - 1))

        if self.counteval - self.eigeneval > self.lam / (c1 + cmu) / N / 10:
            self._decompose()
        if not (np.isfinite(self.sigma) and self.sigma > 0 and np.all(np.isfinite(self.mean))):
            log.warning("CMA-ES step size degenerated (sigma=%r); resetting to sigma0", self.sigma)
            self.sigma = self.sigma0
            self._reset_covariance()

    def _decompose(self):
        self.eigeneval = self.counteval
        C = np.triu(self.C) + np.triu(self.C, 1).T
        if not np.all(np.isfinite(C)):
            return self._reset_covariance()
        d2, B = np.linalg.eigh(C)
        if d2.min() <= 0 or d2.max() > 1e14 * d2.min():
            return self._reset_covariance()
        self.C = C
        self.D = np.sqrt(d2)
        self.B = B
        self.invsqrtC = (B / self.D) @ B.T

    def _reset_covariance(self):
        log.warning("CMA-ES covariance degenerated at generation %d; resetting to identity", self.generation)
        self.resets += 1
        self.C = np.eye(self.N)
        self.B = np.eye(self.N)
        self.D = np.ones(self.N)
        self.invsqrtC = np.eye(self.N)
        self.pc = np.zeros(self.N)
        self.ps = np.zeros(self.N)

    def eigenvalues(self):
        return self.D**2


def run(problem, config, tracker, rng):
    es = CMAES(problem.dim, lam=config.population_size, mu=config.mu, sigma0=config.sigma0, rng=rng)
    while not tracker.done:
        X = es.ask()
        take = tracker.affordable(es.lam)
        if take < es.lam:
            tracker.evaluate(X[:take])
            break
        es.tell(tracker.evaluate(X))
    return es
