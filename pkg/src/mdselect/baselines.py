"""Classical filter scores: DF, TF-IDF and the presence/absence measures MI, CET, IG, CHI, GSS.

The presence/absence measures work on a per (term, class) 2x2 table of
document-level probabilities::

                 class c       not class c
    term         p_tc          p_tnc
    no term      p_ntc         p_ntnc

Cells are add-one smoothed, ``(count + 1) / (D + 4)``, so no log or division
ever sees a zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import LabeledCorpus
from .errors import UnknownMethod

TABLE_METHODS = ("mi", "cet", "ig", "chi", "gss")
METHODS = ("df", "tfidf") + TABLE_METHODS


@dataclass(frozen=True, eq=False)
class BinaryEventTables:
    """Smoothed joint probabilities, each N x M (class by term)."""

    p_tc: np.ndarray
    p_tnc: np.ndarray
    p_ntc: np.ndarray
    p_ntnc: np.ndarray

    @property
    def p_t(self):
        return self.p_tc + self.p_tnc

    @property
    def p_nt(self):
        return self.p_ntc + self.p_ntnc

    @property
    def p_c(self):
        return self.p_tc + self.p_ntc

    @property
    def p_nc(self):
        return self.p_tnc + self.p_ntnc


def document_frequency(corpus: LabeledCorpus) -> np.ndarray:
    return np.bincount(corpus.term_matrix.indices, minlength=corpus.n_features).astype(np.int64)


def class_document_frequency(corpus: LabeledCorpus) -> np.ndarray:
    """N x M: number of class-c documents containing term i."""
    X = corpus.term_matrix.copy()
    X.data[:] = 1
    out = np.zeros((corpus.n_classes, corpus.n_features), dtype=np.int64)
    for c in range(corpus.n_classes):
        out[c] = np.asarray(X[corpus.labels == c].sum(axis=0)).ravel()
    return out


def build_binary_event_tables(corpus: LabeledCorpus) -> BinaryEventTables:
    if len(corpus) == 0:
        raise ValueError("corpus is empty")
    a = class_document_frequency(corpus)  # term present, in class
    n_docs = len(corpus)
    df = a.sum(axis=0, keepdims=True)
    n_c = np.bincount(corpus.labels, minlength=corpus.n_classes)[:, None]
    b = df - a  # present, other class
    c = n_c - a  # absent, in class
    d = n_docs - a - b - c
    z = n_docs + 4.0
    return BinaryEventTables((a + 1) / z, (b + 1) / z, (c + 1) / z, (d + 1) / z)


def mutual_information(p_tc, p_t, p_c):
    return np.log(p_tc / (p_t * p_c))


def expected_cross_entropy(p_tc, p_t, p_c):
    return p_tc * np.log(p_tc / (p_t * p_c))


def information_gain(p_tc, p_ntc, p_t, p_nt, p_c):
    # both log terms use the scored class c_i
    return p_tc * np.log(p_tc / (p_t * p_c)) + p_ntc * np.log(p_ntc / (p_nt * p_c))


def chi_square(p_tc, p_tnc, p_ntc, p_ntnc):
    num = (p_tc * p_ntnc - p_tnc * p_ntc) ** 2
    return num / (p_tc * p_tnc * p_ntc * p_ntnc)


def gss(p_tc, p_tnc, p_ntc, p_ntnc):
    return p_tc * p_ntnc - p_tnc * p_ntc


def per_class_scores(tables: BinaryEventTables, method: str) -> np.ndarray:
    t = tables
    if method == "mi":
        return mutual_information(t.p_tc, t.p_t, t.p_c)
    if method == "cet":
        return expected_cross_entropy(t.p_tc, t.p_t, t.p_c)
    if method == "ig":
        return information_gain(t.p_tc, t.p_ntc, t.p_t, t.p_nt, t.p_c)
    if method == "chi":
        return chi_square(t.p_tc, t.p_tnc, t.p_ntc, t.p_ntnc)
    if method == "gss":
        return gss(t.p_tc, t.p_tnc, t.p_ntc, t.p_ntnc)
    raise UnknownMethod(method)


def baseline_scores(corpus: LabeledCorpus, method: str, aggregate: str = "mean") -> np.ndarray:
    """One global score per term.

    Per-class measures are combined by a class-prior-weighted average
    (``aggregate="mean"``) or by the maximum over classes (``"max"``).
    """
    method = method.lower()
    if method == "df":
        return document_frequency(corpus).astype(np.float64)
    if method == "tfidf":
        tf = np.asarray(corpus.term_matrix.sum(axis=0)).ravel().astype(np.float64)
        df = document_frequency(corpus)
        idf = np.log(len(corpus) / np.maximum(df, 1))
        return np.where(df > 0, tf * idf, 0.0)
    if method not in TABLE_METHODS:
        raise UnknownMethod(f"unknown baseline {method!r}; expected one of {METHODS}")
    per_class = per_class_scores(build_binary_event_tables(corpus), method)
    if aggregate == "max":
        return per_class.max(axis=0)
    if aggregate != "mean":
        raise ValueError(f"aggregate must be 'mean' or 'max', got {aggregate!r}")
    priors = np.bincount(corpus.labels, minlength=corpus.n_classes) / len(corpus)
    return priors @ per_class
