"""Feature rankers built on class-conditional term probabilities.

Every ranker takes an ``N x M`` matrix ``theta`` (row ``c`` is class ``c``'s
smoothed term distribution) and returns a :class:`FeatureRanking`. Ties are
always broken toward the lower feature index.

``md``         per-feature JMH score of the split {term i, every other term}
``md-greedy``  forward selection maximising J over {selected..., candidate, rest}
``md-chi2``    per-feature sum of Pearson + Neyman noncentralities
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, baselines
from .corpus import LabeledCorpus
from .divergence import as_priors, jmh, pooled_rows
from .errors import BudgetOutOfRange, InvalidModel, UnknownMethod
from .nb import accumulate_counts, fit

MD_METHODS = ("md", "md-greedy", "md-chi2")
METHODS = MD_METHODS + baselines.METHODS

_ROW_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FeatureRanking:
    method: str
    order: np.ndarray
    scores: np.ndarray  # aligned with order
    step_divergences: np.ndarray = field(default_factory=lambda: np.zeros(0))
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        order = np.asarray(self.order, dtype=np.int64)
        if not np.array_equal(np.sort(order), np.arange(order.size)):
            raise ValueError("order must be a permutation of 0..M-1")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "scores", np.asarray(self.scores, dtype=np.float64))
        object.__setattr__(
            self, "step_divergences", np.asarray(self.step_divergences, dtype=np.float64)
        )

    def __len__(self):
        return self.order.size

    def score_by_feature(self) -> np.ndarray:
        out = np.empty_like(self.scores)
        out[self.order] = self.scores
        return out

    def to_csv(self, terms=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = " ".join([f"method={self.method}"] + [f"{k}={v}" for k, v in self.params.items()])
        buf.write(f"# {header}\n")
        w.writerow(["rank", "feature_index", "term", "score"])
        for rank, (i, s) in enumerate(zip(self.order, self.scores), 1):
            term = terms[i] if terms is not None else ""
            w.writerow([rank, int(i), term, format(float(s), ".17g")])
        return buf.getvalue()


def descending_order(scores) -> np.ndarray:
    """Indices by decreasing score; equal scores keep ascending index order."""
    scores = np.asarray(scores, dtype=np.float64)
    if not np.all(np.isfinite(scores)):
        raise InvalidModel("non-finite feature score")
    return np.argsort(-scores, kind="stable")


def _ranked(method, scores, **params):
    order = descending_order(scores)
    return FeatureRanking(method, order, scores[order], params=params)


def check_theta(theta, n_classes=None) -> np.ndarray:
    """Validate class-conditional probabilities: rows stochastic, entries in (0, 1)."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 2 or theta.shape[0] < 2:
        raise InvalidModel(f"theta must be N x M with N >= 2, got shape {theta.shape}")
    if n_classes is not None and theta.shape[0] != n_classes:
        raise InvalidModel(f"expected {n_classes} classes, got {theta.shape[0]}")
    if not np.all(np.isfinite(theta)) or np.any(theta <= 0):
        raise InvalidModel("theta entries must be strictly positive (use smoothed estimates)")
    sums = np.array([math.fsum(r) for r in theta])
    if np.any(np.abs(sums - 1.0) > _ROW_TOL):
        raise InvalidModel(f"theta rows must sum to 1, got {sums}")
    if theta.shape[1] > 1 and np.any(theta >= 1):
        raise InvalidModel("a single term cannot carry all probability mass when M > 1")
    return theta


def md_rank_two_class_greedy(theta, rtol: float = 1e-12) -> FeatureRanking:
    """Greedy forward selection maximising two-class J.

    At step k each free feature i is scored by J over the k + 1 bins
    {selected..., i, pooled remainder}; the best one is fixed. Scores within
    ``rtol`` (relative) of the best count as ties. ``step_divergences[k]`` is
    the J attained at step k.
    """
    theta = check_theta(theta, 2)
    p1, p2 = np.ascontiguousarray(theta[0]), np.ascontiguousarray(theta[1])
    order, steps = _kernels.greedy_j(p1, p2, math.fsum(p1), math.fsum(p2), float(rtol))
    return FeatureRanking("md-greedy", order, steps, step_divergences=steps)


def md_scores(theta, priors) -> np.ndarray:
    """Per-feature sum over classes of KL({p_ic, 1-p_ic} || {q_ic, 1-q_ic})."""
    q = pooled_rows(theta, priors)
    return _kernels.two_bin_kl_sum(np.ascontiguousarray(theta), np.ascontiguousarray(q))


def md_rank_two_class(theta) -> FeatureRanking:
    theta = check_theta(theta, 2)
    # at N = 2 the pooled complement is the other class whatever the priors
    return _ranked("md", md_scores(theta, np.array([0.5, 0.5])))


def md_rank_multiclass(theta, priors) -> FeatureRanking:
    theta = check_theta(theta)
    priors = as_priors(priors, theta.shape[0])
    return _ranked("md", md_scores(theta, priors))


def md_chi2_scores(theta, priors, length: float = 1.0) -> np.ndarray:
    if not length > 0:
        raise ValueError("length must be positive")
    q = pooled_rows(theta, priors)
    return _kernels.two_bin_nu_j(
        np.ascontiguousarray(theta), np.ascontiguousarray(q), float(length)
    )


def md_chi2_rank(theta, priors, length: float = 1.0) -> FeatureRanking:
    theta = check_theta(theta)
    priors = as_priors(priors, theta.shape[0])
    return _ranked("md-chi2", md_chi2_scores(theta, priors, length), length=length)


def prefix_divergences(theta, order, priors=None) -> np.ndarray:
    """JMH (J when N = 2) of {first k features of ``order``, pooled rest} for k = 1..M."""
    theta = np.asarray(theta, dtype=np.float64)
    n, m = theta.shape
    priors = np.full(n, 1.0 / n) if priors is None else priors
    order = np.asarray(order)
    out = np.empty(m)
    for k in range(1, m + 1):
        head = theta[:, order[:k]]
        if k < m:
            rest = theta[:, order[k:]].sum(axis=1, keepdims=True)
            head = np.hstack([head, rest])
        head = head / head.sum(axis=1, keepdims=True)
        out[k - 1] = jmh(head, priors)
    return out


@dataclass(frozen=True)
class AgreementReport:
    first: int  # e_1 from the efficient ranking
    second: int  # e_2
    delta: float
    bound: float
    condition_holds: bool
    greedy_first: int
    greedy_second: int

    @property
    def first_picks_agree(self) -> bool:
        return self.first == self.greedy_first

    @property
    def second_picks_agree(self) -> bool:
        return self.second == self.greedy_second


def algorithm_agreement_check(theta) -> AgreementReport:
    """Compare the top of the efficient and greedy two-class rankings.

    ``delta`` is the difference of the absent-term parts of the top two
    scores; the efficient pick agrees with the greedy one when
    ``delta <= bound``, ``bound`` being the difference of their present-term
    parts.
    """
    theta = check_theta(theta, 2)
    if theta.shape[1] < 2:
        raise ValueError("need at least two features")
    eff = md_rank_two_class(theta)
    greedy = md_rank_two_class_greedy(theta)
    e1, e2 = int(eff.order[0]), int(eff.order[1])

    def present(i):
        return theta[0, i] * math.log(theta[0, i] / theta[1, i])

    def absent(i):
        a, b = 1.0 - theta[0, i], 1.0 - theta[1, i]
        return a * math.log(a / b)

    delta = absent(e2) - absent(e1)
    bound = present(e1) - present(e2)
    return AgreementReport(
        e1, e2, delta, bound, bool(delta <= bound),
        int(greedy.order[0]), int(greedy.order[1]),
    )


def select_top(ranking: FeatureRanking, r: int) -> np.ndarray:
    if not 1 <= r <= len(ranking):
        raise BudgetOutOfRange(f"budget {r} outside 1..{len(ranking)}")
    return ranking.order[:r].copy()


def rank_corpus(
    corpus: LabeledCorpus,
    method: str,
    beta1: float = 1.0,
    beta2: float | None = None,
    length: float = 1.0,
    aggregate: str = "mean",
) -> FeatureRanking:
    """Rank the features of ``corpus`` with any method in :data:`METHODS`.

    MD-family methods work from the smoothed MNB estimates and document-count
    class priors of ``corpus``.
    """
    method = method.lower()
    if method not in METHODS:
        raise UnknownMethod(f"unknown method {method!r}; expected one of {METHODS}")
    if method in baselines.METHODS:
        scores = baselines.baseline_scores(corpus, method, aggregate)
        params = {"aggregate": aggregate} if method in baselines.TABLE_METHODS else {}
        return _ranked(method, scores, **params)

    model = fit(accumulate_counts(corpus), beta1, beta2)
    priors = model.priors
    if np.any(priors <= 0):
        raise InvalidModel("every class needs at least one training document")
    priors = priors / math.fsum(priors)
    params = {"beta1": model.smoothing[0], "beta2": model.smoothing[1]}
    if method == "md-greedy":
        if corpus.n_classes != 2:
            raise InvalidModel(f"md-greedy needs exactly 2 classes, got {corpus.n_classes}")
        r = md_rank_two_class_greedy(model.theta)
    elif method == "md":
        r = md_rank_multiclass(model.theta, priors)
    else:
        r = md_chi2_rank(model.theta, priors, length)
        params["length"] = length
    return FeatureRanking(r.method, r.order, r.scores, r.step_divergences, params)
