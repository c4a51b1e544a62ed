"""Synthetic multinomial corpora with known term probabilities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import LabeledCorpus, SparseDocVector, Vocabulary, synthetic_terms
from .ranking import md_rank_two_class_greedy

MONOTONE_TOL = 1e-9


def random_theta(n_classes: int, n_features: int, concentration: float = 1.0, seed=None):
    """Rows drawn from a symmetric Dirichlet(concentration).

    Small concentrations give sparse rows (most terms rare); as it grows the
    rows approach the uniform 1/M.
    """
    if n_features < 2:
        raise ValueError("need at least two features")
    if not concentration > 0:
        raise ValueError("concentration must be positive")
    rng = np.random.default_rng(seed)
    theta = rng.dirichlet(np.full(n_features, float(concentration)), size=n_classes)
    return theta / theta.sum(axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    theta_star: np.ndarray
    docs_per_class: tuple
    doc_length: int | tuple = 100  # fixed l, or inclusive (low, high)
    seed: int | np.random.Generator = 0

    def __post_init__(self):
        theta = np.asarray(self.theta_star, dtype=np.float64)
        if theta.ndim != 2 or theta.shape[1] < 1:
            raise ValueError("theta_star must be N x M")
        if np.any(theta < 0) or np.any(np.abs(theta.sum(axis=1) - 1.0) > 1e-9):
            raise ValueError("theta_star rows must be probability distributions")
        docs = tuple(int(n) for n in np.broadcast_to(self.docs_per_class, theta.shape[:1]))
        if any(n < 1 for n in docs):
            raise ValueError("docs_per_class entries must be >= 1")
        object.__setattr__(self, "theta_star", theta)
        object.__setattr__(self, "docs_per_class", docs)

    @property
    def n_classes(self) -> int:
        return self.theta_star.shape[0]

    @property
    def n_features(self) -> int:
        return self.theta_star.shape[1]


def sample_counts(spec: GeneratorSpec):
    """Dense documents x features counts and the label of each row."""
    rng = np.random.default_rng(spec.seed)
    blocks, labels = [], []
    for c, n_docs in enumerate(spec.docs_per_class):
        if isinstance(spec.doc_length, tuple):
            low, high = spec.doc_length
            lengths = rng.integers(low, high + 1, size=n_docs)
        else:
            lengths = np.full(n_docs, int(spec.doc_length))
        blocks.append(rng.multinomial(lengths, spec.theta_star[c]))
        labels.append(np.full(n_docs, c, dtype=np.int64))
    return np.vstack(blocks).astype(np.int64), np.concatenate(labels)


def sample_corpus(spec: GeneratorSpec) -> LabeledCorpus:
    """Class c contributes ``docs_per_class[c]`` documents of i.i.d. draws from ``theta_star[c]``."""
    counts, labels = sample_counts(spec)
    docs = []
    for row, label in zip(counts, labels):
        idx = np.flatnonzero(row)
        docs.append(SparseDocVector(int(label), idx, row[idx]))
    vocab = Vocabulary(synthetic_terms(spec.n_features), (counts > 0).sum(axis=0))
    return LabeledCorpus(vocab, [str(c) for c in range(spec.n_classes)], docs)


def smoothed_estimate(theta_star, terms_per_class: int, rng) -> np.ndarray:
    """Laplace-smoothed estimate from one multinomial draw per class."""
    counts = np.array([rng.multinomial(terms_per_class, row) for row in theta_star])
    m = theta_star.shape[1]
    return (counts + 1.0) / (counts.sum(axis=1, keepdims=True) + m)


@dataclass(frozen=True)
class Theorem1Report:
    trials: int
    violations: int
    max_violation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}: {self.violations}/{self.trials} trials with a decreasing greedy step "
            f"(max drop {self.max_violation:.3e}, tolerance {self.tolerance:g})"
        )


def step_violation(steps) -> float:
    """Largest drop between consecutive greedy step divergences (0 if non-decreasing)."""
    if len(steps) < 2:
        return 0.0
    return float(max(0.0, -np.diff(steps).min()))


def theorem1_harness(
    trials: int = 100,
    n_features: int = 20,
    seed: int = 0,
    concentration: float = 1.0,
    terms_per_class: int = 1000,
    tolerance: float = MONOTONE_TOL,
) -> Theorem1Report:
    """Check that greedy step divergences never decrease on random smoothed models."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    violations, worst = 0, 0.0
    for _ in range(trials):
        theta_star = rng.dirichlet(np.full(n_features, concentration), size=2)
        theta = smoothed_estimate(theta_star, terms_per_class, rng)
        drop = step_violation(md_rank_two_class_greedy(theta).step_divergences)
        worst = max(worst, drop)
        violations += drop > tolerance
    return Theorem1Report(trials, int(violations), worst, tolerance)
