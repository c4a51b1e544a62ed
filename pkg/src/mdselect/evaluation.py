"""Metrics, stratified splits and feature-budget sweeps."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .corpus import LabeledCorpus
from .errors import BudgetOutOfRange, EmptyEvaluation, TooFewDocuments
from .nb import MultinomialNB, reduce_matrix
from .ranking import FeatureRanking, rank_corpus, select_top

DEFAULT_BUDGETS = (10, 20, 50, 100, 200, 500, 1000, 2000)


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    counts: np.ndarray  # [true, predicted]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion(pairs: Iterable, n_classes: int) -> ConfusionMatrix:
    """Tally (true class, predicted class) pairs."""
    pairs = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (pairs[:, 0], pairs[:, 1]), 1)
    return ConfusionMatrix(cm)


@dataclass(frozen=True, eq=False)
class Metrics:
    accuracy: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float


def _ratio(num, den):
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den > 0)
    return out


def metrics(cm: ConfusionMatrix, priors) -> Metrics:
    """Accuracy plus one-vs-rest precision, recall and F1 for every class.

    Zero denominators give 0. The weighted figures average the per-class
    values with ``priors``.
    """
    counts = cm.counts
    if cm.total <= 0:
        raise EmptyEvaluation("confusion matrix is empty")
    priors = np.asarray(priors, dtype=np.float64)
    tp = np.diag(counts)
    fp = counts.sum(axis=0) - tp
    fn = counts.sum(axis=1) - tp
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = _ratio(2 * precision * recall, precision + recall)
    return Metrics(
        accuracy=float(np.trace(counts) / cm.total),
        precision=precision,
        recall=recall,
        f1=f1,
        weighted_precision=float(priors @ precision),
        weighted_recall=float(priors @ recall),
        weighted_f1=float(priors @ f1),
    )


def _labels(corpus_or_labels):
    if isinstance(corpus_or_labels, LabeledCorpus):
        return corpus_or_labels.labels
    return np.asarray(corpus_or_labels, dtype=np.int64)


def kfold_split(corpus, k: int, seed: int = 0) -> list:
    """Stratified k-fold partition as a list of ``(train_idx, test_idx)``."""
    labels = _labels(corpus)
    if k < 2:
        raise ValueError("k must be at least 2")
    classes, sizes = np.unique(labels, return_counts=True)
    if labels.size == 0 or np.any(sizes < k):
        raise TooFewDocuments(f"every class needs at least {k} documents, got sizes {sizes}")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(labels.size, dtype=np.int64)
    offset = 0
    for c in classes:
        members = rng.permutation(np.flatnonzero(labels == c))
        fold_of[members] = (offset + np.arange(members.size)) % k
        offset += members.size
    everything = np.arange(labels.size)
    return [(everything[fold_of != f], everything[fold_of == f]) for f in range(k)]


def holdout_split(corpus, test_fraction: float = 0.3, seed: int = 0):
    """Stratified train/test split; each class keeps at least one document on both sides."""
    labels = _labels(corpus)
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    test = []
    for c in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == c))
        if members.size < 2:
            raise TooFewDocuments(f"class {c} needs at least 2 documents for a holdout split")
        n_test = min(max(1, int(round(test_fraction * members.size))), members.size - 1)
        test.extend(members[:n_test])
    is_test = np.zeros(labels.size, dtype=bool)
    is_test[test] = True
    everything = np.arange(labels.size)
    return everything[~is_test], everything[is_test]


@dataclass(frozen=True)
class SweepRow:
    method: str
    r: int
    fold: str
    accuracy: float
    precision: float
    recall: float
    f1: float
    train_docs: int
    test_docs: int


@dataclass
class SweepReport:
    rows: list = field(default_factory=list)
    rankings: dict = field(default_factory=dict)  # (method, fold) -> FeatureRanking

    HEADER = ("method", "r", "fold", "accuracy", "precision", "recall", "f1", "train_docs", "test_docs")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.HEADER)
        for row in self.rows:
            w.writerow([
                row.method, row.r, row.fold,
                *(format(x, ".10g") for x in (row.accuracy, row.precision, row.recall, row.f1)),
                row.train_docs, row.test_docs,
            ])
        return buf.getvalue()

    def select(self, method=None, fold=None) -> list:
        return [
            row for row in self.rows
            if (method is None or row.method == method) and (fold is None or row.fold == fold)
        ]


def resolve_budgets(budgets, n_features: int) -> list:
    if budgets is None:
        grid = [r for r in DEFAULT_BUDGETS if r <= n_features]
        return grid or [n_features]
    budgets = sorted(set(int(r) for r in budgets))
    bad = [r for r in budgets if not 1 <= r <= n_features]
    if bad:
        raise BudgetOutOfRange(f"budgets {bad} outside 1..{n_features}")
    return budgets


def evaluate_split(
    train: LabeledCorpus,
    test: LabeledCorpus,
    methods: Sequence[str],
    budgets: Sequence[int],
    fold: str = "holdout",
    classifier_factory: Callable = MultinomialNB,
    pool_rest: bool = False,
    rank_options: dict | None = None,
):
    """Rank on ``train`` only, then score every (method, budget) on ``test``.

    Returns ``(rows, rankings)``.
    """
    n = train.n_classes
    X_train, y_train = train.term_matrix, train.labels
    X_test, y_test = test.term_matrix, test.labels
    priors = np.bincount(y_train, minlength=n) / len(y_train)
    rows, rankings = [], {}
    for method in methods:
        ranking = rank_corpus(train, method, **(rank_options or {}))
        rankings[(method, fold)] = ranking
        for r in budgets:
            subset = select_top(ranking, r)
            clf = classifier_factory().fit(reduce_matrix(X_train, subset, pool_rest), y_train, n)
            pred = clf.predict(reduce_matrix(X_test, subset, pool_rest))
            m = metrics(confusion(zip(y_test, pred), n), priors)
            rows.append(SweepRow(
                method, r, fold, m.accuracy, m.weighted_precision, m.weighted_recall,
                m.weighted_f1, len(train), len(test),
            ))
    return rows, rankings


def sweep(
    corpus: LabeledCorpus,
    methods: Sequence[str],
    budgets: Sequence[int] | None = None,
    protocol: str = "holdout",
    folds: int = 10,
    test_fraction: float = 0.3,
    seed: int = 0,
    test_corpus: LabeledCorpus | None = None,
    classifier_factory: Callable = MultinomialNB,
    pool_rest: bool = False,
    rank_options: dict | None = None,
) -> SweepReport:
    """Accuracy and prior-weighted precision/recall/F1 against feature budget.

    ``protocol`` is ``"holdout"`` (stratified split of ``corpus``, or
    ``corpus`` vs ``test_corpus`` when one is given) or ``"kfold"``. In
    k-fold mode every fold gets its own rows plus a ``"mean"`` row per
    (method, budget). Rankings always come from the training part only.

    ``pool_rest`` keeps the unselected terms as one extra pooled feature in
    the reduced classifier instead of dropping them.
    """
    methods = [m.lower() for m in methods]
    budgets = resolve_budgets(budgets, corpus.n_features)
    options = dict(classifier_factory=classifier_factory, pool_rest=pool_rest,
                   rank_options=rank_options)

    if protocol == "holdout":
        if test_corpus is not None:
            if test_corpus.n_features != corpus.n_features or test_corpus.classes != corpus.classes:
                raise ValueError("test corpus must share the training vocabulary and classes")
            train, test = corpus, test_corpus
        else:
            tr, te = holdout_split(corpus, test_fraction, seed)
            train, test = corpus.subset(tr), corpus.subset(te)
        rows, rankings = evaluate_split(train, test, methods, budgets, "holdout", **options)
        return SweepReport(_ordered(rows, methods), rankings)

    if protocol != "kfold":
        raise ValueError(f"protocol must be 'holdout' or 'kfold', got {protocol!r}")
    rows, rankings = [], {}
    for f, (tr, te) in enumerate(kfold_split(corpus, folds, seed)):
        fr, rk = evaluate_split(corpus.subset(tr), corpus.subset(te), methods, budgets, str(f), **options)
        rows.extend(fr)
        rankings.update(rk)
    for method in methods:
        for r in budgets:
            cell = [row for row in rows if row.method == method and row.r == r]
            rows.append(SweepRow(
                method, r, "mean",
                *(float(np.mean([getattr(c, a) for c in cell]))
                  for a in ("accuracy", "precision", "recall", "f1")),
                int(round(np.mean([c.train_docs for c in cell]))),
                int(round(np.mean([c.test_docs for c in cell]))),
            ))
    return SweepReport(_ordered(rows, methods), rankings)


def _ordered(rows, methods):
    def fold_key(fold):
        return (1, 0) if fold == "mean" else (0, int(fold)) if fold.isdigit() else (0, -1)

    rank = {m: i for i, m in enumerate(methods)}
    return sorted(rows, key=lambda row: (rank[row.method], row.r, fold_key(row.fold)))
