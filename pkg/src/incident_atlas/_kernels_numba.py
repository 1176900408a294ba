"""Numba-jitted layout kernels: the default backend when numba is present.

Loop bodies accumulate in a fixed order, so repeated runs are bit-identical.
Results agree with `_kernels_numpy` to floating-point rounding (the two sum
in different orders, so cross-backend equality is close, not exact).
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def pairwise_sq_dists(x):
    n, d = x.shape
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(d):
                diff = x[i, k] - x[j, k]
                s += diff * diff
            out[i, j] = s
    return out


@njit(cache=True)
def iteration_terms(p_eff, p_plain, y):
    n, m = y.shape
    w = np.zeros((n, n))
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d2 = 0.0
            for k in range(m):
                diff = y[i, k] - y[j, k]
                d2 += diff * diff
            wij = 1.0 / (1.0 + d2)
            w[i, j] = wij
            s += wij

    grad = np.zeros((n, m))
    kl = 0.0
    q_sum = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            qij = w[i, j] / s
            q_sum += qij
            coeff = 4.0 * (p_eff[i, j] - qij) * w[i, j]
            for k in range(m):
                grad[i, k] += coeff * (y[i, k] - y[j, k])
            p = p_plain[i, j]
            if p > 0.0:
                kl += p * np.log(p / qij)
    return grad, kl, q_sum
