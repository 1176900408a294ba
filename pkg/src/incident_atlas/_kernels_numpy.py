"""Pure-numpy layout kernels: the portable fallback backend.

Must stay semantically identical to the numba twin in `_kernels_numba`;
the benchmark and the backend-agreement tests compare the two directly.
"""

from __future__ import annotations

import numpy as np


def pairwise_sq_dists(x: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between all row pairs. Exactly symmetric."""
    diff = x[:, None, :] - x[None, :, :]
    return np.sum(diff * diff, axis=-1)


def iteration_terms(p_eff: np.ndarray, p_plain: np.ndarray, y: np.ndarray):
    """One gradient-descent evaluation at coordinates `y`.

    Student-t weights w_ij = 1 / (1 + ||y_i - y_j||^2) define the
    low-dimensional affinities q_ij = w_ij / sum(w). Returns:

      grad:  dC/dy with C = KL(p_eff || q), the 4 * sum_j (p - q) * w * (y_i - y_j) form
      kl:    KL(p_plain || q), tracked against the unexaggerated affinities
      q_sum: recomputed sum of q entries, a rounding diagnostic (should be ~1)
    """
    d2 = pairwise_sq_dists(y)
    w = 1.0 / (1.0 + d2)
    np.fill_diagonal(w, 0.0)
    s = w.sum()

    q = w / s
    pq_w = (p_eff - q) * w
    grad = 4.0 * (pq_w.sum(axis=1)[:, None] * y - pq_w @ y)

    mask = p_plain > 0.0
    kl = float(np.sum(p_plain[mask] * np.log(p_plain[mask] / q[mask])))
    q_sum = float(q.sum())
    return grad, kl, q_sum
