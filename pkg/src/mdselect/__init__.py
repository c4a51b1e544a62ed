"""Maximum-discrimination feature selection for multinomial naive Bayes text classifiers."""

from ._kernels import BACKEND
from .corpus import (
    LabeledCorpus,
    PreprocessConfig,
    RawDocument,
    SparseDocVector,
    Vocabulary,
    build_vocabulary,
    load_corpus,
    tokenize,
    vectorize,
)
from .divergence import jeffreys, jmh, kl, noncentrality_j, pooled_complement
from .evaluation import confusion, kfold_split, metrics, sweep
from .nb import MnbModel, MultinomialNB, accumulate_counts, classify, fit, refit_on_subset
from .ranking import (
    FeatureRanking,
    algorithm_agreement_check,
    md_chi2_rank,
    md_rank_multiclass,
    md_rank_two_class,
    md_rank_two_class_greedy,
    rank_corpus,
    select_top,
)

__version__ = "0.1.0"
