"""Multinomial naive Bayes with additive smoothing and MAP classification.

All likelihoods are natural-log and omit the multinomial coefficient
``l! / (x_1! ... x_M!)``, which is the same for every class and so never
changes the argmax.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .corpus import LabeledCorpus, SparseDocVector
from .errors import EmptySubset, InvalidSmoothing, ParseError


@dataclass(frozen=True, eq=False)
class ClassCounts:
    term_counts: np.ndarray  # N x M, l_ic
    doc_counts: np.ndarray  # N

    @property
    def class_totals(self) -> np.ndarray:
        return self.term_counts.sum(axis=1)


@dataclass(frozen=True, eq=False)
class MnbModel:
    theta: np.ndarray
    log_theta: np.ndarray
    class_log_prior: np.ndarray
    smoothing: tuple
    classes: tuple = ()

    @property
    def vocab_size(self) -> int:
        return self.theta.shape[1]

    @property
    def n_classes(self) -> int:
        return self.theta.shape[0]

    @property
    def priors(self) -> np.ndarray:
        return np.exp(self.class_log_prior)

    def joint_log_likelihood(self, X) -> np.ndarray:
        """Class scores for a documents x features count matrix."""
        return np.asarray(X @ self.log_theta.T) + self.class_log_prior

    def predict(self, X) -> np.ndarray:
        # np.argmax returns the first maximum, i.e. ties go to the lowest class id
        return np.argmax(self.joint_log_likelihood(X), axis=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        beta1, beta2 = self.smoothing
        w.writerow(["M", "N", "beta1", "beta2"])
        w.writerow([self.vocab_size, self.n_classes, _fmt(beta1), _fmt(beta2)])
        names = self.classes or tuple(str(c) for c in range(self.n_classes))
        for name, lp, row in zip(names, self.class_log_prior, self.theta):
            w.writerow([name, _fmt(lp)] + [_fmt(p) for p in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "MnbModel":
        rows = list(csv.reader(io.StringIO(text)))
        try:
            if rows[0] != ["M", "N", "beta1", "beta2"]:
                raise ValueError("bad header")
            m, n = int(rows[1][0]), int(rows[1][1])
            smoothing = (float(rows[1][2]), float(rows[1][3]))
            body = rows[2:]
            if len(body) != n or any(len(r) != m + 2 for r in body):
                raise ValueError("shape mismatch")
            theta = np.array([[float(x) for x in r[2:]] for r in body])
            log_prior = np.array([float(r[1]) for r in body])
        except (IndexError, ValueError) as exc:
            raise ParseError(f"malformed model CSV ({exc})") from None
        return cls(theta, np.log(theta), log_prior, smoothing, tuple(r[0] for r in body))


def _fmt(x) -> str:
    return format(float(x), ".17g")


def accumulate_counts(corpus: LabeledCorpus) -> ClassCounts:
    X = corpus.term_matrix
    tc = _kernels.class_term_counts(
        corpus.labels, X.indptr.astype(np.int64), X.indices.astype(np.int64),
        X.data.astype(np.int64), corpus.n_classes, corpus.n_features,
    )
    docs = np.bincount(corpus.labels, minlength=corpus.n_classes).astype(np.int64)
    return ClassCounts(tc, docs)


def fit(counts: ClassCounts, beta1: float = 1.0, beta2: float | None = None, classes=()):
    """Smoothed estimates ``p_ic = (l_ic + beta1) / (l_c + beta2)``.

    ``beta2`` defaults to ``M`` (Laplace, with ``beta1 = 1``). Class priors are
    document-count fractions.
    """
    m = counts.term_counts.shape[1]
    if beta2 is None:
        beta2 = float(m)
    if not beta1 > 0 or not beta2 > 0:
        raise InvalidSmoothing(f"smoothing must be positive, got beta1={beta1}, beta2={beta2}")
    lc = counts.term_counts.astype(np.float64)
    theta = (lc + beta1) / (lc.sum(axis=1, keepdims=True) + beta2)
    total = counts.doc_counts.sum()
    with np.errstate(divide="ignore"):
        log_prior = np.log(counts.doc_counts / total) if total else np.full(len(lc), -np.log(len(lc)))
    return MnbModel(theta, np.log(theta), log_prior, (float(beta1), float(beta2)), tuple(classes))


def log_likelihood(model: MnbModel, doc: SparseDocVector, class_id: int) -> float:
    return float(np.dot(doc.counts, model.log_theta[class_id, doc.indices]))


def classify(model: MnbModel, doc: SparseDocVector) -> int:
    scores = model.log_theta[:, doc.indices] @ doc.counts + model.class_log_prior
    return int(np.argmax(scores))


def reduce_matrix(X, subset, pool_rest: bool = False):
    """Columns ``subset`` of a count matrix, optionally with one trailing column
    holding the mass of every unselected term."""
    subset = np.asarray(subset, dtype=np.int64)
    X = sp.csr_matrix(X)
    R = X[:, subset]
    if pool_rest and subset.size < X.shape[1]:
        rest = np.asarray(X.sum(axis=1)).ravel() - np.asarray(R.sum(axis=1)).ravel()
        R = sp.hstack([R, sp.csr_matrix(rest[:, None])], format="csr")
    return R


def _check_subset(subset, m):
    subset = np.asarray(subset, dtype=np.int64)
    if subset.size == 0:
        raise EmptySubset("feature subset is empty")
    if subset.min() < 0 or subset.max() >= m or np.unique(subset).size != subset.size:
        raise ValueError("feature subset must hold distinct indices in 0..M-1")
    return subset


def refit_on_subset(corpus: LabeledCorpus, feature_subset, beta1=1.0, pool_rest=False):
    """Retrain on the reduced vocabulary ``feature_subset`` with ``beta2 = r``.

    With ``pool_rest`` the unselected terms are kept as one extra pooled
    feature (so ``beta2 = r + 1``); otherwise their counts are discarded.
    """
    subset = _check_subset(feature_subset, corpus.n_features)
    if not pool_rest or subset.size == corpus.n_features:
        reduced = corpus.restrict(subset)
        return fit(accumulate_counts(reduced), beta1, beta1 * reduced.n_features, corpus.classes)
    R = reduce_matrix(corpus.term_matrix, subset, pool_rest=True)
    tc = np.zeros((corpus.n_classes, R.shape[1]), dtype=np.int64)
    for c in range(corpus.n_classes):
        tc[c] = np.asarray(R[corpus.labels == c].sum(axis=0)).ravel()
    counts = ClassCounts(tc, np.bincount(corpus.labels, minlength=corpus.n_classes))
    return fit(counts, beta1, beta1 * R.shape[1], corpus.classes)


class MultinomialNB:
    """Classifier adapter used by the evaluation harness.

    Any object with ``fit(X, y, n_classes)`` and ``predict(X)`` over
    documents x features count matrices can stand in for it.
    """

    def __init__(self, beta1: float = 1.0, beta2: float | None = None):
        self.beta1 = beta1
        self.beta2 = beta2
        self.model_ = None

    def fit(self, X, y, n_classes):
        X = sp.csr_matrix(X, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        tc = _kernels.class_term_counts(
            y, X.indptr.astype(np.int64), X.indices.astype(np.int64),
            X.data.astype(np.int64), n_classes, X.shape[1],
        )
        counts = ClassCounts(tc, np.bincount(y, minlength=n_classes).astype(np.int64))
        self.model_ = fit(counts, self.beta1, self.beta2)
        return self

    def predict(self, X):
        return self.model_.predict(X)
