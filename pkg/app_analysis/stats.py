"""
Statistics used by the analyses.
"""

# 1. Third-party
import numpy as np
from scipy import stats

# 2. Local imports
from .exceptions import AnalysisError


def pearson(x, y):
    """
    Product-moment correlation of two equally long samples.

    Raises:
        AnalysisError: fewer than two samples, unequal lengths, or a sample
            without variance (r undefined).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise AnalysisError('pearson needs two one-dimensional samples of equal length')
    if x.size < 2:
        raise AnalysisError('pearson needs at least two samples')
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(np.dot(dx, dx)), float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise AnalysisError('correlation is undefined for a sample without variance')
    r = float(np.dot(dx, dy)) / np.sqrt(sxx * syy)
    # Clamp floating-point overshoot.
    return float(min(1.0, max(-1.0, r)))


def association_p_value(table):
    """
    Chi-square test of independence on a contingency table.

    Empty rows and columns are dropped first; tables smaller than 2x2 carry
    no evidence of association and give p = 1.
    """
    table = np.asarray(table, dtype=np.float64)
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    if table.ndim != 2 or min(table.shape) < 2:
        return 1.0
    return float(stats.chi2_contingency(table).pvalue)
