"""Fixed-order error-count kernel.

Accumulates each delay difference in index order ``0 .. n`` in float64 without
FMA contraction, so it reproduces ``chain_dots(..., strict=True)`` bit for bit.
Features are read from an int8 ``(n + 1, N)`` transposed block, which keeps the
single-candidate case far below BLAS gemv memory traffic.
"""
import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _strict_errors_py(genes, phi_t8, responses, k):
    d, N = phi_t8.shape
    wrong = responses.astype(bool)
    for c in range(k):
        acc = np.zeros(N)
        for j in range(d):
            acc += genes[c * d + j] * phi_t8[j].astype(np.float64)
        wrong ^= acc < 0
    return int(np.count_nonzero(wrong))


if numba is not None:

    @numba.njit(cache=True)
    def _strict_errors_nb(genes, phi_t8, responses, k):
        d = phi_t8.shape[0]
        N = phi_t8.shape[1]
        wrong = responses.copy()
        acc = np.empty(N)
        for c in range(k):
            acc[:] = 0.0
            for j in range(d):
                wj = genes[c * d + j]
                row = phi_t8[j]
                for i in range(N):
                    acc[i] += wj * row[i]
            for i in range(N):
                if acc[i] < 0:
                    wrong[i] ^= 1
        return np.count_nonzero(wrong)

    def strict_errors(genes, phi_t8, responses, k):
        return int(_strict_errors_nb(genes, phi_t8, responses, k))

else:  # pragma: no cover
    strict_errors = _strict_errors_py
