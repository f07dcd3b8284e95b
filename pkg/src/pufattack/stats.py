"""Rank statistics for train/test error analysis."""
import math

import numpy as np
from scipy.stats import rankdata

from .errors import ContractError

#: Returned by :func:`spearman` when either sequence is constant.
UNDEFINED = math.nan


def spearman(x, y):
    """Spearman's rank correlation with average ranks for ties.

    Computed as the Pearson correlation of the fractional ranks. Returns
    :data:`UNDEFINED` (NaN) when either input is constant, since a constant
    column carries no rank information.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise ContractError(f"spearman needs two sequences of equal length, got {x.shape} and {y.shape}")
    if x.size < 2:
        raise ContractError("spearman needs at least two observations")
    rx = rankdata(x) - (x.size + 1) / 2
    ry = rankdata(y) - (y.size + 1) / 2
    sxx = rx @ rx
    syy = ry @ ry
    if sxx == 0 or syy == 0:
        return UNDEFINED
    rho = (rx @ ry) / math.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, rho)))


def is_undefined(value):
    return value is None or (isinstance(value, float) and math.isnan(value))
