"""Corpus ingestion: tokenization, vocabulary pruning and sparse term-frequency vectors.

Three on-disk formats are understood:

``dir``
    ``root/<class-name>/*.txt``, one UTF-8 document per file.
``tsv``
    ``<class-name> TAB <text>`` per line.
``sparse``
    first line ``M N``, then ``<label_id> <idx>:<count> ...`` per document,
    with 0-based feature indices.
"""

from __future__ import annotations

import csv
import io
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import EmptyVocabulary, ParseError, UnknownClass

# contiguous runs of Unicode letters (no digits, no underscore)
ALPHA_RUNS = r"[^\W\d_]+"

FORMATS = ("dir", "tsv", "sparse")


@dataclass(frozen=True)
class PreprocessConfig:
    stoplist: frozenset = frozenset()
    min_df: int = 2
    lowercase: bool = True
    token_pattern: str = ALPHA_RUNS

    def __post_init__(self):
        if self.min_df < 1:
            raise ValueError(f"min_df must be >= 1, got {self.min_df}")
        object.__setattr__(self, "stoplist", frozenset(self.stoplist))

    @cached_property
    def _regex(self):
        return re.compile(self.token_pattern)


@dataclass(frozen=True)
class RawDocument:
    label: str
    text: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("document label must be non-empty")


@dataclass(frozen=True, eq=False)
class Vocabulary:
    terms: tuple
    doc_freq: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "doc_freq", np.asarray(self.doc_freq, dtype=np.int64))
        if len(self.index) != len(self.terms):
            raise ValueError("vocabulary terms must be unique")
        if self.doc_freq.shape != (len(self.terms),):
            raise ValueError("doc_freq must align with terms")

    @cached_property
    def index(self) -> dict:
        return {t: i for i, t in enumerate(self.terms)}

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self.terms == other.terms and np.array_equal(self.doc_freq, other.doc_freq)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "term", "doc_freq"])
        for i, (term, df) in enumerate(zip(self.terms, self.doc_freq)):
            writer.writerow([i, term, int(df)])
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class SparseDocVector:
    """One document as sorted (feature index, count) pairs."""

    label_id: int
    indices: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        cnt = np.asarray(self.counts, dtype=np.int64)
        if idx.shape != cnt.shape or idx.ndim != 1:
            raise ValueError("indices and counts must be 1-d and aligned")
        if idx.size and (np.any(np.diff(idx) <= 0) or idx[0] < 0):
            raise ValueError("feature indices must be non-negative and strictly increasing")
        if np.any(cnt < 1):
            raise ValueError("stored counts must be >= 1")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "counts", cnt)

    @property
    def length(self) -> int:
        return int(self.counts.sum())

    def items(self) -> list:
        return [(int(i), int(c)) for i, c in zip(self.indices, self.counts)]

    def __eq__(self, other):
        if not isinstance(other, SparseDocVector):
            return NotImplemented
        return (
            self.label_id == other.label_id
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.counts, other.counts)
        )

    @classmethod
    def from_pairs(cls, label_id, pairs):
        pairs = sorted(pairs)
        return cls(label_id, [i for i, _ in pairs], [c for _, c in pairs])


@dataclass(frozen=True, eq=False)
class LabeledCorpus:
    vocabulary: Vocabulary
    classes: tuple
    docs: list = field(default_factory=list)

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        n, m = len(self.classes), len(self.vocabulary)
        for d in self.docs:
            if not 0 <= d.label_id < n:
                raise ValueError(f"label_id {d.label_id} out of range for {n} classes")
            if d.indices.size and d.indices[-1] >= m:
                raise ValueError(f"feature index {d.indices[-1]} out of range for M={m}")

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def n_features(self) -> int:
        return len(self.vocabulary)

    def __len__(self):
        return len(self.docs)

    @cached_property
    def labels(self) -> np.ndarray:
        return np.fromiter((d.label_id for d in self.docs), dtype=np.int64, count=len(self.docs))

    @cached_property
    def term_matrix(self) -> sp.csr_matrix:
        """Documents x features count matrix."""
        indptr = np.zeros(len(self.docs) + 1, dtype=np.int64)
        np.cumsum([d.indices.size for d in self.docs], out=indptr[1:])
        if self.docs:
            indices = np.concatenate([d.indices for d in self.docs])
            data = np.concatenate([d.counts for d in self.docs])
        else:
            indices = np.zeros(0, dtype=np.int64)
            data = np.zeros(0, dtype=np.int64)
        return sp.csr_matrix(
            (data, indices, indptr), shape=(len(self.docs), self.n_features), dtype=np.int64
        )

    def subset(self, doc_indices) -> "LabeledCorpus":
        """Same vocabulary and classes, selected documents only."""
        return LabeledCorpus(self.vocabulary, self.classes, [self.docs[i] for i in doc_indices])

    def restrict(self, feature_subset) -> "LabeledCorpus":
        """Reduced corpus over ``feature_subset``; new feature j is old ``feature_subset[j]``."""
        subset = np.asarray(feature_subset, dtype=np.int64)
        remap = np.full(self.n_features, -1, dtype=np.int64)
        remap[subset] = np.arange(subset.size)
        docs = []
        for d in self.docs:
            new = remap[d.indices]
            keep = new >= 0
            new, cnt = new[keep], d.counts[keep]
            order = np.argsort(new, kind="stable")
            docs.append(SparseDocVector(d.label_id, new[order], cnt[order]))
        vocab = Vocabulary(
            [self.vocabulary.terms[i] for i in subset], self.vocabulary.doc_freq[subset]
        )
        return LabeledCorpus(vocab, self.classes, docs)


def tokenize(text: str, config: PreprocessConfig = PreprocessConfig()) -> list:
    if config.lowercase:
        text = text.lower()
    stop = config.stoplist
    return [t for t in config._regex.findall(text) if t not in stop]


def build_vocabulary(docs: Sequence[RawDocument], config: PreprocessConfig = PreprocessConfig()):
    if not docs:
        raise ValueError("build_vocabulary needs at least one document")
    df = Counter()
    for doc in docs:
        df.update(set(tokenize(doc.text, config)))
    terms = sorted(t for t, n in df.items() if n >= config.min_df)
    if not terms:
        raise EmptyVocabulary(
            f"no term appears in at least {config.min_df} documents after stoplist removal"
        )
    return Vocabulary(terms, [df[t] for t in terms])


def vectorize(doc: RawDocument, vocab: Vocabulary, classes, config=PreprocessConfig()):
    try:
        label_id = list(classes).index(doc.label)
    except ValueError:
        raise UnknownClass(doc.label) from None
    index = vocab.index
    tf = Counter(index[t] for t in tokenize(doc.text, config) if t in index)
    return SparseDocVector.from_pairs(label_id, tf.items())


def corpus_from_raw(docs, config=PreprocessConfig(), vocabulary=None, classes=None):
    """Build (or reuse) a vocabulary and vectorize ``docs``.

    Class order defaults to first appearance in ``docs``.
    """
    docs = list(docs)
    if classes is None:
        classes = list(dict.fromkeys(d.label for d in docs))
    if vocabulary is None:
        vocabulary = build_vocabulary(docs, config)
    return LabeledCorpus(
        vocabulary, classes, [vectorize(d, vocabulary, classes, config) for d in docs]
    )


def read_directory(root) -> list:
    root = Path(root)
    if not root.is_dir():
        raise ParseError("not a directory", locus=str(root))
    docs = []
    for class_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for f in sorted(class_dir.glob("*.txt")):
            docs.append(RawDocument(class_dir.name, _read_text(f)))
    if not docs:
        raise ParseError("no <class>/*.txt documents found", locus=str(root))
    return docs


def read_tsv(path) -> list:
    path = Path(path)
    docs = []
    # split on \n only: str.splitlines would also break on form feeds etc. inside text
    for lineno, line in enumerate(_read_text(path).split("\n"), 1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        label, tab, text = line.partition("\t")
        if not tab or not label:
            raise ParseError("expected '<class-name>\\t<text>'", locus=f"{path}:{lineno}")
        docs.append(RawDocument(label, text))
    if not docs:
        raise ParseError("no documents", locus=str(path))
    return docs


def read_sparse(path) -> LabeledCorpus:
    """Parse the pre-vectorized format; feature indices are kept as-is (no pruning)."""
    path = Path(path)
    lines = _read_text(path).splitlines()
    body = [(n, ln) for n, ln in enumerate(lines, 1) if ln.strip()]
    if not body:
        raise ParseError("empty file", locus=str(path))
    lineno, header = body[0]
    try:
        m, n = (int(x) for x in header.split())
    except ValueError:
        raise ParseError("header must be 'M N'", locus=f"{path}:{lineno}") from None
    if m < 1 or n < 1:
        raise ParseError("M and N must be positive", locus=f"{path}:{lineno}")

    docs = []
    for lineno, line in body[1:]:
        locus = f"{path}:{lineno}"
        fields = line.split()
        try:
            label = int(fields[0])
            pairs = [tuple(int(x) for x in tok.split(":")) for tok in fields[1:]]
        except ValueError:
            raise ParseError("expected '<label_id> <idx>:<count> ...'", locus=locus) from None
        if not 0 <= label < n:
            raise ParseError(f"label_id {label} outside 0..{n - 1}", locus=locus)
        if any(len(p) != 2 for p in pairs):
            raise ParseError("expected '<idx>:<count>' pairs", locus=locus)
        idx = [p[0] for p in pairs]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ParseError("feature indices must be strictly increasing", locus=locus)
        if idx and (idx[0] < 0 or idx[-1] >= m):
            raise ParseError(f"feature index outside 0..{m - 1}", locus=locus)
        if any(c < 0 for _, c in pairs):
            raise ParseError("negative count", locus=locus)
        pairs = [p for p in pairs if p[1] > 0]
        docs.append(SparseDocVector.from_pairs(label, pairs))

    df = np.zeros(m, dtype=np.int64)
    for d in docs:
        df[d.indices] += 1
    return LabeledCorpus(Vocabulary(synthetic_terms(m), df), [str(c) for c in range(n)], docs)


def synthetic_terms(m: int) -> list:
    """Zero-padded names whose lexicographic order equals index order."""
    width = len(str(max(m - 1, 0)))
    return [f"f{i:0{width}d}" for i in range(m)]


def load_corpus(path, fmt, config=PreprocessConfig(), vocabulary=None, classes=None):
    """Load a corpus in one of :data:`FORMATS`.

    Passing ``vocabulary`` and ``classes`` (e.g. from a training corpus)
    vectorizes a test set onto the same feature space. Both are ignored for
    the ``sparse`` format, which carries its own indices.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    path = Path(path)
    if not path.exists():
        raise ParseError("no such file or directory", locus=str(path))
    if fmt == "sparse":
        return read_sparse(path)
    if fmt == "dir":
        raw = read_directory(path)
        if classes is None:
            classes = sorted(dict.fromkeys(d.label for d in raw))
    else:
        raw = read_tsv(path)
    return corpus_from_raw(raw, config, vocabulary=vocabulary, classes=classes)


def write_sparse(corpus: LabeledCorpus) -> str:
    out = [f"{corpus.n_features} {corpus.n_classes}"]
    for d in corpus.docs:
        out.append(" ".join([str(d.label_id)] + [f"{i}:{c}" for i, c in d.items()]))
    return "\n".join(out) + "\n"


def read_stoplist(path) -> frozenset:
    lines = _read_text(Path(path)).splitlines()
    return frozenset(w.strip().lower() for w in lines if w.strip() and not w.startswith("#"))


def raw_from_corpus(corpus: LabeledCorpus) -> Iterable[RawDocument]:
    """Re-expand vectors into token streams (used to check pruning idempotence)."""
    terms = corpus.vocabulary.terms
    for d in corpus.docs:
        words = []
        for i, c in d.items():
            words.extend([terms[i]] * c)
        yield RawDocument(corpus.classes[d.label_id], " ".join(words))


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"invalid UTF-8 ({exc.reason})", locus=str(path)) from None
    except OSError as exc:
        raise ParseError(exc.strerror or "cannot read", locus=str(path)) from None
