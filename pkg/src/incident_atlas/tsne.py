"""Exact t-SNE for small corpora.

Plain O(N^2) gradient descent of KL(P || Q): Gaussian neighbor affinities
in the input space, calibrated per point by bisection so every conditional
row hits the requested perplexity, against Student-t affinities in 2-D.
No tree approximations; at atlas scale (tens of points) exactness and
reproducibility matter more than speed. Given a seed, repeated runs on one
backend produce bit-identical coordinates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, InputError, NumericalError
from .kernels import get_kernels
from .rng import Xoshiro256StarStar

logger = logging.getLogger(__name__)

# Seed tag for the duplicate-distance jitter stream, kept separate from the
# init stream so coordinates with and without duplicates share the same init.
_JITTER_SEED_XOR = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 10.0
    iterations: int = 1000
    early_exaggeration_factor: float = 12.0
    exaggeration_iters: int = 250
    learning_rate: float = 200.0
    momentum_initial: float = 0.5
    momentum_final: float = 0.8
    seed: int = 0
    entropy_tolerance: float = 1e-5
    max_bisection_steps: int = 50

    def validate(self, n_points: int | None = None) -> None:
        if self.perplexity <= 0:
            raise InputError("perplexity must be positive")
        if self.iterations <= 0:
            raise InputError("iterations must be positive")
        if self.early_exaggeration_factor <= 0:
            raise InputError("early_exaggeration_factor must be positive")
        if not 0 < self.exaggeration_iters < self.iterations:
            raise InputError("exaggeration_iters must lie in (0, iterations)")
        if self.learning_rate <= 0:
            raise InputError("learning_rate must be positive")
        for name in ("momentum_initial", "momentum_final"):
            value = getattr(self, name)
            if not 0.0 <= value < 1.0:
                raise InputError(f"{name} must be in [0, 1)")
        if self.entropy_tolerance <= 0:
            raise InputError("entropy_tolerance must be positive")
        if self.max_bisection_steps <= 0:
            raise InputError("max_bisection_steps must be positive")
        if n_points is not None and n_points >= 2 and 3.0 * self.perplexity >= n_points - 1:
            raise InputError(
                f"perplexity {self.perplexity} too large for {n_points} points: "
                f"3 * perplexity must stay below N - 1"
            )

    def to_dict(self) -> dict:
        return {
            "perplexity": self.perplexity,
            "iterations": self.iterations,
            "early_exaggeration_factor": self.early_exaggeration_factor,
            "exaggeration_iters": self.exaggeration_iters,
            "learning_rate": self.learning_rate,
            "momentum_initial": self.momentum_initial,
            "momentum_final": self.momentum_final,
            "seed": self.seed,
            "entropy_tolerance": self.entropy_tolerance,
            "max_bisection_steps": self.max_bisection_steps,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TsneConfig":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


@dataclass
class ConditionalAffinities:
    """Row-stochastic P(j|i) plus the calibrated bandwidth per row."""

    probabilities: np.ndarray
    sigmas: np.ndarray
    unconverged_rows: list[int] = field(default_factory=list)


@dataclass
class LayoutResult:
    row_ids: list[str]
    coordinates: np.ndarray  # N x 2, min-max scaled to [0, 1] per axis
    kl_trace: list[float]
    config: TsneConfig
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "row_ids": list(self.row_ids),
            "coordinates": [[float(x), float(y)] for x, y in self.coordinates],
            "kl_trace": [float(v) for v in self.kl_trace],
            "config": self.config.to_dict(),
        }


def _row_entropy_bits(distances: np.ndarray, beta: float) -> tuple[float, np.ndarray]:
    """Entropy (bits) and probabilities of exp(-d * beta), shift-stabilized."""
    shifted = distances - distances.min()
    weights = np.exp(-shifted * beta)
    total = weights.sum()
    probs = weights / total
    positive = probs[probs > 0.0]
    entropy = float(-np.sum(positive * np.log2(positive)))
    return entropy, probs


def conditional_affinities(
    distances: np.ndarray,
    perplexity: float,
    tolerance: float = 1e-5,
    max_steps: int = 50,
) -> ConditionalAffinities:
    """Calibrate Gaussian bandwidths so each row's perplexity matches the target.

    `distances` is the squared Euclidean matrix (symmetric, zero diagonal,
    finite). Bisection runs on beta = 1 / (2 sigma^2) until the row entropy
    in bits is within `tolerance` of log2(perplexity); rows that do not
    converge within `max_steps` keep their best bracket and are flagged.
    """
    d = np.asarray(distances, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InputError(f"distance matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    if n < 2:
        raise InputError("need at least 2 points to calibrate affinities")
    if not np.all(np.isfinite(d)):
        raise InputError("distance matrix contains non-finite values")
    if np.any(np.diag(d) != 0.0):
        raise InputError("distance matrix must have a zero diagonal")
    if not np.array_equal(d, d.T):
        raise InputError("distance matrix must be symmetric")
    if np.any(d < 0.0):
        raise InputError("squared distances must be non-negative")
    if perplexity <= 0:
        raise InputError("perplexity must be positive")

    off_diagonal = d[~np.eye(n, dtype=bool)]
    if np.all(off_diagonal == 0.0):
        raise DegenerateInputError("all points are identical: affinities are undefined")

    target = math.log2(perplexity)
    probs = np.zeros((n, n))
    sigmas = np.zeros(n)
    unconverged: list[int] = []
    others = ~np.eye(n, dtype=bool)

    for i in range(n):
        row = d[i][others[i]]
        beta, beta_lo, beta_hi = 1.0, 0.0, math.inf
        best_beta, best_probs, best_gap = beta, None, math.inf
        converged = False
        for _ in range(max_steps):
            entropy, p = _row_entropy_bits(row, beta)
            gap = entropy - target
            if abs(gap) < best_gap:
                best_gap, best_beta, best_probs = abs(gap), beta, p
            if abs(gap) < tolerance:
                converged = True
                break
            if gap > 0:
                # Entropy too high: sharpen the kernel.
                beta_lo = beta
                beta = beta * 2.0 if math.isinf(beta_hi) else (beta_lo + beta_hi) / 2.0
            else:
                beta_hi = beta
                beta = beta / 2.0 if beta_lo == 0.0 else (beta_lo + beta_hi) / 2.0
        if not converged:
            unconverged.append(i)
        probs[i][others[i]] = best_probs
        sigmas[i] = math.sqrt(1.0 / (2.0 * best_beta))

    if unconverged:
        logger.warning(
            "perplexity %.3g not reached within %d bisection steps for rows %s; keeping best brackets",
            perplexity, max_steps, unconverged,
        )
    return ConditionalAffinities(probs, sigmas, unconverged)


def symmetrize(p_conditional: np.ndarray) -> np.ndarray:
    """Joint affinities P_ij = (P(j|i) + P(i|j)) / 2N; entries sum to 1."""
    p = np.asarray(p_conditional, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise InputError(f"conditional matrix must be square, got shape {p.shape}")
    row_sums = p.sum(axis=1)
    if not np.allclose(row_sums, 1.0, atol=1e-6):
        raise InputError("conditional matrix must be row-stochastic")
    n = p.shape[0]
    joint = (p + p.T) / (2.0 * n)
    np.fill_diagonal(joint, 0.0)
    return joint


def check_affinity_matrix(p: np.ndarray, atol: float = 1e-9) -> list[str]:
    """Return the affinity-matrix invariants `p` violates (empty = ok)."""
    problems = []
    if not np.array_equal(p, p.T):
        problems.append("not symmetric")
    if np.any(np.diag(p) != 0.0):
        problems.append("non-zero diagonal")
    if np.any(p < 0.0):
        problems.append("negative entries")
    if abs(float(p.sum()) - 1.0) > atol:
        problems.append(f"total sum {p.sum():.12f} != 1")
    return problems


def kl_objective(p: np.ndarray, y: np.ndarray, backend: str | None = None) -> float:
    """KL(P || Q) at coordinates y; the quantity the descent minimizes."""
    _, kl, _ = get_kernels(backend).iteration_terms(p, p, y)
    return kl


def kl_gradient(p: np.ndarray, y: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Analytic gradient of `kl_objective` with respect to y."""
    grad, _, _ = get_kernels(backend).iteration_terms(p, p, y)
    return grad


def _jitter_duplicate_distances(d: np.ndarray, seed: int) -> tuple[np.ndarray, int]:
    """Break exact-duplicate rows apart with tiny seeded jitter on their distances."""
    n = d.shape[0]
    dup_i, dup_j = np.where((d == 0.0) & ~np.eye(n, dtype=bool))
    pairs = [(i, j) for i, j in zip(dup_i, dup_j) if i < j]
    if not pairs:
        return d, 0
    rng = Xoshiro256StarStar((seed ^ _JITTER_SEED_XOR) & ((1 << 64) - 1))
    jittered = d.copy()
    for i, j in pairs:
        # Folded to keep squared distances non-negative.
        value = abs(rng.gaussian()) * 1e-8
        jittered[i, j] = value
        jittered[j, i] = value
    return jittered, len(pairs)


def run_tsne(
    vectors: np.ndarray,
    row_ids: list[str] | None = None,
    config: TsneConfig | None = None,
    backend: str | None = None,
    on_iteration=None,
) -> LayoutResult:
    """Map N x D vectors to [0, 1]^2 coordinates.

    `on_iteration(iteration, kl, q_sum)`, when given, observes every
    gradient step; the KL trace is recorded against the unexaggerated
    affinities so the two optimization phases stay comparable.
    """
    config = config or TsneConfig()
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2:
        raise InputError(f"expected an N x D matrix, got shape {x.shape}")
    n = x.shape[0]
    if row_ids is None:
        row_ids = [str(i) for i in range(n)]
    if len(row_ids) != n:
        raise InputError(f"{len(row_ids)} row ids for {n} vectors")

    if n == 0:
        return LayoutResult(list(row_ids), np.zeros((0, 2)), [], config)
    if n == 1:
        return LayoutResult(list(row_ids), np.array([[0.5, 0.5]]), [], config)

    config.validate(n)
    kernels = get_kernels(backend)
    warnings: list[str] = []

    distances = kernels.pairwise_sq_dists(x)
    if np.all(distances[~np.eye(n, dtype=bool)] == 0.0):
        # Jitter exists to split stray duplicates, not to invent structure
        # where the corpus has none.
        raise DegenerateInputError("all points are identical: affinities are undefined")
    distances, jittered_pairs = _jitter_duplicate_distances(distances, config.seed)
    if jittered_pairs:
        message = f"jittered {jittered_pairs} exact-duplicate pair(s) in the input vectors"
        warnings.append(message)
        logger.warning(message)

    cond = conditional_affinities(
        distances, config.perplexity, config.entropy_tolerance, config.max_bisection_steps
    )
    if cond.unconverged_rows:
        warnings.append(f"perplexity calibration unconverged for rows {cond.unconverged_rows}")
    p = symmetrize(cond.probabilities)
    p_exaggerated = p * config.early_exaggeration_factor

    rng = Xoshiro256StarStar(config.seed)
    y = rng.gaussians((n, 2), std=1e-4)
    update = np.zeros_like(y)
    kl_trace: list[float] = []

    for iteration in range(config.iterations):
        exaggerating = iteration < config.exaggeration_iters
        p_eff = p_exaggerated if exaggerating else p
        grad, kl, q_sum = kernels.iteration_terms(p_eff, p, y)
        if not (np.all(np.isfinite(grad)) and math.isfinite(kl)):
            raise NumericalError(
                f"non-finite gradient at iteration {iteration}", iteration=iteration
            )
        kl_trace.append(kl)
        if on_iteration is not None:
            on_iteration(iteration, kl, q_sum)
        momentum = config.momentum_initial if exaggerating else config.momentum_final
        update = momentum * update - config.learning_rate * grad
        y = y + update

    return LayoutResult(list(row_ids), _scale_to_unit_square(y), kl_trace, config, warnings)


def _scale_to_unit_square(y: np.ndarray) -> np.ndarray:
    """Affine per-axis min-max rescale to [0, 1]; a collapsed axis pins to 0.5."""
    lo = y.min(axis=0)
    span = y.max(axis=0) - lo
    out = np.empty_like(y)
    for axis in range(y.shape[1]):
        if span[axis] == 0.0:
            out[:, axis] = 0.5
        else:
            out[:, axis] = (y[:, axis] - lo[axis]) / span[axis]
    return out


def layout_result_from_dict(d: dict) -> LayoutResult:
    return LayoutResult(
        row_ids=list(d["row_ids"]),
        coordinates=np.asarray(d["coordinates"], dtype=np.float64).reshape(-1, 2),
        kl_trace=[float(v) for v in d.get("kl_trace", [])],
        config=TsneConfig.from_dict(d.get("config", {})),
    )
