"""The modeling attack as an optimization problem.

A candidate model is a flat float vector of length ``k * (n + 1)`` holding
the ``k`` hypothesised delay vectors back to back. Its fitness on a learning
set is the number of CRPs it predicts wrongly (an integer, lower is better).
"""
from dataclasses import dataclass

import numpy as np

from ._kernels import strict_errors
from .errors import ContractError
from .puf import CrpSet, chain_dots, responses_from_dots

#: Test accuracy needed to call an attack successful. On 1,000 CRPs a fair
#: coin reaches 550 correct with probability below 1e-3.
SUCCESS_ACCURACY = 0.55

# caps the (candidates * k, N) float64 block materialized per chunk
_MAX_BLOCK = 1 << 22


def as_candidate(genes, k, n):
    """Reshape a flat genotype to ``(k, n + 1)``, validating length and finiteness."""
    g = np.asarray(genes, dtype=np.float64)
    if g.ndim == 2 and g.shape == (k, n + 1):
        g = g.reshape(-1)
    if g.ndim != 1 or g.shape[0] != k * (n + 1):
        raise ContractError(f"candidate must have {k * (n + 1)} genes for a {k}x{n} PUF, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ContractError("candidate genes must be finite")
    return g.reshape(k, n + 1)


def _shape_of(crps):
    return crps.k, crps.n


def predict_responses(genes, phi, k, strict=False):
    """Predicted response bits of a candidate for a batch of feature vectors."""
    phi = np.atleast_2d(np.asarray(phi, dtype=np.float64))
    model = as_candidate(genes, k, phi.shape[1] - 1)
    return responses_from_dots(chain_dots(model, phi, strict=strict))


def predict_response(genes, phi, k=1, strict=False):
    phi = np.asarray(phi, dtype=np.float64)
    if phi.ndim != 1:
        raise ContractError(f"expected a single feature vector, got shape {phi.shape}")
    return int(predict_responses(genes, phi[None, :], k, strict=strict)[0])


def fitness_batch(population, crps, strict=False):
    """Prediction errors of each row of ``population`` on ``crps``.

    Returns an int64 array. In strict mode every candidate goes through the
    fixed-order kernel. Otherwise single candidates still use that kernel
    (it is the faster path for one vector) and larger batches use BLAS in
    bounded chunks; chunking never changes an integer count.
    """
    k, n = _shape_of(crps)
    d = n + 1
    pop = np.atleast_2d(np.asarray(population, dtype=np.float64))
    if pop.ndim != 2 or pop.shape[1] != k * d:
        raise ContractError(f"candidates must have {k * d} genes for a {k}x{n} PUF, got shape {pop.shape}")
    if not np.all(np.isfinite(pop)):
        raise ContractError("candidate genes must be finite")
    m = pop.shape[0]
    out = np.empty(m, dtype=np.int64)
    if strict or m == 1:
        phi_t8 = crps.phi_t8
        for i in range(m):
            out[i] = strict_errors(np.ascontiguousarray(pop[i]), phi_t8, crps.responses, k)
        return out
    N = len(crps)
    step = max(1, _MAX_BLOCK // max(1, k * N))
    target = crps.responses.astype(bool)
    for lo in range(0, m, step):
        block = pop[lo : lo + step]
        dots = chain_dots(block.reshape(-1, d), crps.phi)
        neg = (dots < 0).reshape(block.shape[0], k, N)
        wrong = neg[:, 0, :] ^ target
        for j in range(1, k):
            wrong ^= neg[:, j, :]
        out[lo : lo + step] = np.count_nonzero(wrong, axis=1)
    return out


def fitness(genes, crps, strict=False):
    """Number of CRPs in ``crps`` that the candidate predicts wrongly."""
    k, n = _shape_of(crps)
    as_candidate(genes, k, n)
    return int(fitness_batch(np.asarray(genes, dtype=np.float64).reshape(1, -1), crps, strict=strict)[0])


@dataclass(frozen=True)
class EvaluationReport:
    errors: int
    total: int

    @property
    def accuracy(self):
        return 1.0 - self.errors / self.total

    @property
    def success(self):
        return self.accuracy >= SUCCESS_ACCURACY

    def __str__(self):
        return (
            f"test errors {self.errors}/{self.total}  accuracy {self.accuracy:.3f}  "
            f"success {'yes' if self.success else 'no'}"
        )


def evaluate_test(genes, test, strict=False):
    """Score a candidate on a test set."""
    if test.role != "test":
        raise ContractError(f"evaluate_test needs a test-role CRP set, got role {test.role!r}")
    return EvaluationReport(errors=fitness(genes, test, strict=strict), total=len(test))


class PufProblem:
    """Batch fitness oracle over a learning set, in the form optimizers expect.

    Calling the problem with a ``(m, dim)`` array returns ``m`` error counts.
    """

    def __init__(self, learning: CrpSet, strict=False):
        self.learning = learning
        self.strict = strict
        self.k = learning.k
        self.n = learning.n
        self.dim = learning.k * (learning.n + 1)

    def __call__(self, population):
        return fitness_batch(population, self.learning, strict=self.strict)

    def __repr__(self):
        return f"PufProblem({self.k}x{self.n}, {len(self.learning)} CRPs)"
