"""Closed-form divergences between discrete (multinomial) distributions.

Everything is in nats. Sums go through :func:`math.fsum` in ascending index
order, so results do not depend on how callers batch their work.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import UndefinedDivergence

_STOCHASTIC_TOL = 1e-9
_PRIOR_TOL = 1e-12


def as_distribution(p, name="distribution") -> np.ndarray:
    """Validate a probability vector (length >= 2, non-negative, sums to 1)."""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise ValueError(f"{name} must be a 1-d vector with at least 2 entries")
    if not (np.isfinite(p).all() and (p >= 0).all()):
        raise ValueError(f"{name} has negative or non-finite entries")
    total = math.fsum(p.tolist())
    if abs(total - 1.0) > _STOCHASTIC_TOL:
        raise ValueError(f"{name} sums to {total!r}, not 1")
    return p


def as_priors(priors, n=None) -> np.ndarray:
    priors = np.asarray(priors, dtype=np.float64)
    if priors.ndim != 1 or (n is not None and priors.size != n):
        raise ValueError(f"expected {n} class priors, got shape {priors.shape}")
    if np.any(priors <= 0):
        raise ValueError("class priors must be strictly positive")
    if abs(math.fsum(priors) - 1.0) > _PRIOR_TOL:
        raise ValueError(f"class priors sum to {math.fsum(priors)!r}, not 1")
    return priors


def _check_pair(p, q):
    p, q = as_distribution(p, "p"), as_distribution(q, "q")
    if p.shape != q.shape:
        raise ValueError("p and q must have the same number of bins")
    return p.tolist(), q.tolist()


def _kl_lists(p, q) -> float:
    terms = []
    for i, (pi, qi) in enumerate(zip(p, q)):
        if pi > 0:
            if qi == 0:
                raise UndefinedDivergence(f"q is zero where p is positive (bin {i})")
            terms.append(pi * math.log(pi / qi))
    # Gibbs: true value is >= 0; clip rounding noise at the zero end
    return max(math.fsum(terms), 0.0)


def kl(p, q) -> float:
    """KL(p || q) = sum_i p_i ln(p_i / q_i), with 0 ln(0/q) = 0."""
    return _kl_lists(*_check_pair(p, q))


def jeffreys(p, q) -> float:
    """Symmetrized KL: KL(p || q) + KL(q || p)."""
    p, q = _check_pair(p, q)
    return _kl_lists(p, q) + _kl_lists(q, p)


def mixture_weights(priors) -> np.ndarray:
    """N x N matrix W with W[c, k] = prior_k / sum_{m != c} prior_m for k != c, 0 on the diagonal."""
    priors = np.asarray(priors, dtype=np.float64)
    n = priors.size
    W = np.tile(priors, (n, 1))
    np.fill_diagonal(W, 0.0)
    return W / W.sum(axis=1, keepdims=True)


def pooled_complement(theta_column, priors, excluded: int) -> float:
    """Prior-weighted mixture of one feature's probabilities over every class but ``excluded``."""
    col = np.asarray(theta_column, dtype=np.float64)
    priors = as_priors(priors, col.size)
    if col.size < 2:
        raise ValueError("need at least two classes")
    rest = [k for k in range(col.size) if k != excluded]
    norm = math.fsum(priors[k] for k in rest)
    return math.fsum(priors[k] / norm * col[k] for k in rest)


def pooled_rows(theta, priors) -> np.ndarray:
    """Row c is the mixture of all other rows of ``theta`` (N x K)."""
    return mixture_weights(priors) @ np.asarray(theta, dtype=np.float64)


def jmh(theta, priors) -> float:
    """Sum over classes of KL(row_c || mixture of the remaining rows)."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 2 or theta.shape[0] < 2:
        raise ValueError("theta must be N x K with N >= 2")
    priors = as_priors(priors, theta.shape[0])
    for c in range(theta.shape[0]):
        as_distribution(theta[c], f"theta[{c}]")
    rows, pooled = theta.tolist(), pooled_rows(theta, priors).tolist()
    return math.fsum(_kl_lists(r, q) for r, q in zip(rows, pooled))


def noncentrality_d(p_hat, p_ref, length: float = 1.0) -> float:
    """Pearson chi-square noncentrality, l * sum (p_hat - p_ref)^2 / p_ref."""
    p_hat, p_ref = _nc_inputs(p_hat, p_ref, length)
    return length * math.fsum([(a - b) ** 2 / b for a, b in zip(p_hat, p_ref)])


def noncentrality_j(p_hat, p_ref, length: float = 1.0) -> float:
    """Noncentrality of the J statistic: half Pearson plus half Neyman chi-square."""
    p_hat, p_ref = _nc_inputs(p_hat, p_ref, length)
    pearson = math.fsum([(a - b) ** 2 / b for a, b in zip(p_hat, p_ref)])
    neyman = math.fsum([(a - b) ** 2 / a for a, b in zip(p_hat, p_ref)])
    return 0.5 * length * pearson + 0.5 * length * neyman


def _nc_inputs(p_hat, p_ref, length):
    p_hat, p_ref = as_distribution(p_hat, "p_hat"), as_distribution(p_ref, "p_ref")
    if p_hat.shape != p_ref.shape:
        raise ValueError("distributions must have the same number of bins")
    if not length > 0:
        raise ValueError("length must be positive")
    if np.any(p_hat == 0) or np.any(p_ref == 0):
        raise UndefinedDivergence("noncentrality needs strictly positive distributions")
    return p_hat.tolist(), p_ref.tolist()
