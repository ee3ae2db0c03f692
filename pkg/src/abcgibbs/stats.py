"""Quantiles, normal CDF and effective sample size."""

from __future__ import annotations

import math

import numpy as np
from scipy import special


def std_normal_cdf(x):
    return 0.5 * special.erfc(-np.asarray(x, dtype=float) / math.sqrt(2.0))


def std_normal_quantile(p):
    """Inverse of the standard normal CDF.

    Raises
    ------
    ValueError
        If any ``p`` lies outside the open interval (0, 1).
    """
    p_arr = np.asarray(p, dtype=float)
    if np.any(~((p_arr > 0.0) & (p_arr < 1.0))):
        raise ValueError("std_normal_quantile is defined on (0, 1) only")
    z = special.ndtri(p_arr)
    return float(z) if z.ndim == 0 else z


def empirical_quantile(sample, p, axis=-1):
    """Linearly interpolated order-statistic quantile.

    Sorts the sample and interpolates between the order statistics at
    ``floor(p*(n-1))`` and ``ceil(p*(n-1))`` (the "type 7" convention).
    ``p`` may be a scalar or an array of levels; ``sample`` may be batched
    along leading axes.
    """
    x = np.asarray(sample, dtype=float)
    if x.size == 0 or x.shape[axis] == 0:
        raise ValueError("empirical_quantile of an empty sample")
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr < 0) | (p_arr > 1)):
        raise ValueError("quantile level must lie in [0, 1]")
    x = np.sort(np.moveaxis(x, axis, -1), axis=-1)
    n = x.shape[-1]
    pos = p_arr * (n - 1)
    lo = np.floor(pos).astype(int)
    hi = np.ceil(pos).astype(int)
    frac = pos - lo
    xl = np.take(x, lo, axis=-1)
    xh = np.take(x, hi, axis=-1)
    return xl + frac * (xh - xl)


def ess(weights) -> float:
    """Effective sample size ``1 / sum(w_i^2)`` of normalized weights."""
    w = np.asarray(weights, dtype=float)
    if w.size == 0 or np.any(w < 0):
        raise ValueError("weights must be non-negative and non-empty")
    total = w.sum()
    if total == 0:
        raise ValueError("ess of all-zero weights is undefined")
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got {total}")
    return float(1.0 / np.sum(w * w))
