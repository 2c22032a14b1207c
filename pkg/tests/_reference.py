"""Independent O(N^2) implementations used as test oracles."""
import math

import numpy as np
from scipy.special import digamma


def chebyshev_matrix(x):
    x = np.asarray(x, float)
    if x.ndim == 1:
        x = x[:, None]
    return np.abs(x[:, None, :] - x[None, :, :]).max(axis=-1)


def brute_force_profile(samples, alpha, k):
    """Radii and neighbour counts by direct pairwise distances.

    Counting follows the documented convention: strict ``< eps`` with the
    point itself included, and ``== 0`` (exact duplicates) when ``eps`` is 0.
    """
    d_t = chebyshev_matrix(samples.target)
    d_s = [chebyshev_matrix(s) for s in samples.sources]
    d_src = np.min([np.max([d_s[j - 1] for j in a], axis=0) for a in alpha.sets], axis=0)
    region = np.maximum(d_t, d_src)
    np.fill_diagonal(region, np.inf)
    eps = np.sort(region, axis=1)[:, k - 1]
    e = eps[:, None]
    n_alpha = np.where(e > 0, d_src < e, d_src == 0).sum(axis=1)
    n_t = np.where(e > 0, d_t < e, d_t == 0).sum(axis=1)
    return eps, n_alpha, n_t


def ksg_mi_bits(x, y, k):
    """Classical KSG mutual information (first variant), self excluded from counts."""
    d_x, d_y = chebyshev_matrix(x), chebyshev_matrix(y)
    joint = np.maximum(d_x, d_y)
    np.fill_diagonal(joint, np.inf)
    eps = np.sort(joint, axis=1)[:, k - 1][:, None]
    np.fill_diagonal(d_x, np.inf)
    np.fill_diagonal(d_y, np.inf)
    n_x = (d_x < eps).sum(axis=1)
    n_y = (d_y < eps).sum(axis=1)
    n = len(n_x)
    mean_x = math.fsum(digamma(n_x + 1.0).tolist()) / n
    mean_y = math.fsum(digamma(n_y + 1.0).tolist()) / n
    return (digamma(float(k)) + digamma(float(n)) - mean_x - mean_y) / math.log(2)
