"""Command-line entry point: ``mdselect {build-vocab,rank,sweep,gen-synthetic}``.

Exit codes: 0 success, 1 property check failed, 2 bad input or usage,
3 precondition violated (e.g. ``md-greedy`` on more than two classes).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .corpus import FORMATS, PreprocessConfig, load_corpus, read_stoplist, write_sparse
from .errors import (
    BudgetOutOfRange,
    EmptySubset,
    EmptyVocabulary,
    InvalidModel,
    ParseError,
    TooFewDocuments,
    UnknownClass,
    UnknownMethod,
)
from .evaluation import sweep
from .ranking import METHODS, rank_corpus
from .synthetic import GeneratorSpec, random_theta, sample_corpus, theorem1_harness

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2, 3

_INPUT_ERRORS = (ParseError, UnknownClass, EmptyVocabulary, UnknownMethod)
_PRECONDITION_ERRORS = (InvalidModel, BudgetOutOfRange, TooFewDocuments, EmptySubset)


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _method_list(text):
    methods = [m.strip().lower() for m in text.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise argparse.ArgumentTypeError(f"unknown method(s) {unknown}; choose from {METHODS}")
    return methods


def _doc_length(text):
    try:
        if ":" in text:
            low, high = (int(x) for x in text.split(":"))
            if not 1 <= low <= high:
                raise ValueError
            return (low, high)
        value = int(text)
        if value < 1:
            raise ValueError
        return value
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected L or LOW:HIGH (positive), got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdselect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p):
        p.add_argument("--input", required=True, type=Path)
        p.add_argument("--format", choices=FORMATS, default="dir")
        p.add_argument("--min-df", type=int, default=2)
        p.add_argument("--stoplist", type=Path, help="file with one stop word per line")
        p.add_argument("--threads", type=int, default=None, help="thread hint for numba kernels")
        p.add_argument("--out", type=Path, help="output file (default: standard output)")

    def add_model(p):
        p.add_argument("--beta1", type=float, default=1.0)
        p.add_argument("--beta2", type=float, default=None, help="default: vocabulary size")
        p.add_argument("--length", type=float, default=1.0, help="effective length l for md-chi2")
        p.add_argument("--aggregate", choices=("mean", "max"), default="mean")

    p = sub.add_parser("build-vocab", help="build and export the pruned vocabulary")
    add_input(p)

    p = sub.add_parser("rank", help="rank features with one method")
    add_input(p)
    add_model(p)
    p.add_argument("--method", choices=METHODS, required=True)

    p = sub.add_parser("sweep", help="accuracy/F1 against feature budget")
    add_input(p)
    add_model(p)
    p.add_argument("--method", "--methods", dest="methods", type=_method_list,
                   default=["md", "md-chi2", "df", "cet", "chi", "gss"],
                   help="comma-separated methods")
    p.add_argument("--budgets", type=_int_list, default=None)
    p.add_argument("--folds", type=int, default=None, help="k-fold CV instead of a holdout split")
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.add_argument("--test-input", type=Path, help="separate test corpus (same --format)")
    p.add_argument("--pool-rest", action="store_true",
                   help="keep unselected terms as one pooled feature")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gen-synthetic", help="sample a synthetic sparse corpus")
    p.add_argument("--classes", type=int, default=2)
    p.add_argument("--vocab", type=int, default=50)
    p.add_argument("--docs", type=int, default=100, help="documents per class")
    p.add_argument("--doc-length", type=_doc_length, default=100, help="L or LOW:HIGH")
    p.add_argument("--concentration", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path)
    p.add_argument("--theta-out", type=Path, help="also write the true term probabilities (CSV)")
    p.add_argument("--theorem1-check", action="store_true")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--threads", type=int, default=None)
    return parser


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_bytes(text.encode("utf-8"))


def _config(args) -> PreprocessConfig:
    stop = read_stoplist(args.stoplist) if args.stoplist else frozenset()
    return PreprocessConfig(stoplist=stop, min_df=args.min_df)


def _set_threads(n):
    if n and _kernels.USE_NUMBA:
        import numba

        numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


def cmd_build_vocab(args) -> int:
    corpus = load_corpus(args.input, args.format, _config(args))
    _emit(corpus.vocabulary.to_csv(), args.out)
    stats = (
        f"documents={len(corpus)} classes={corpus.n_classes} "
        f"vocabulary={corpus.n_features} tokens={int(corpus.term_matrix.sum())}\n"
    )
    (sys.stdout if args.out else sys.stderr).write(stats)
    return EXIT_OK


def cmd_rank(args) -> int:
    corpus = load_corpus(args.input, args.format, _config(args))
    ranking = rank_corpus(corpus, args.method, args.beta1, args.beta2, args.length, args.aggregate)
    _emit(ranking.to_csv(corpus.vocabulary.terms), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _config(args)
    corpus = load_corpus(args.input, args.format, config)
    test = None
    if args.test_input is not None:
        if args.folds:
            return _usage_error("--test-input cannot be combined with --folds")
        test = load_corpus(args.test_input, args.format, config, corpus.vocabulary, corpus.classes)
    report = sweep(
        corpus, args.methods, args.budgets,
        protocol="kfold" if args.folds else "holdout",
        folds=args.folds or 10, test_fraction=args.test_fraction, seed=args.seed,
        test_corpus=test, pool_rest=args.pool_rest,
        rank_options=dict(beta1=args.beta1, beta2=args.beta2, length=args.length,
                          aggregate=args.aggregate),
    )
    _emit(report.to_csv(), args.out)
    return EXIT_OK


def cmd_gen_synthetic(args) -> int:
    if args.theorem1_check:
        if args.classes != 2:
            return _usage_error("--theorem1-check needs --classes 2")
        report = theorem1_harness(args.trials, args.vocab, args.seed, args.concentration)
        print(report.summary())
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED
    if args.classes < 2 or args.vocab < 2 or args.docs < 1:
        return _usage_error("need --classes >= 2, --vocab >= 2, --docs >= 1")
    rng = np.random.default_rng(args.seed)
    theta = random_theta(args.classes, args.vocab, args.concentration, rng)
    spec = GeneratorSpec(theta, (args.docs,) * args.classes, args.doc_length, seed=rng)
    _emit(write_sparse(sample_corpus(spec)), args.out)
    if args.theta_out:
        lines = [",".join(format(p, ".17g") for p in row) for row in theta]
        args.theta_out.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    return EXIT_OK


def _usage_error(message):
    sys.stderr.write(f"mdselect: error: {message}\n")
    return EXIT_INPUT


COMMANDS = {
    "build-vocab": cmd_build_vocab,
    "rank": cmd_rank,
    "sweep": cmd_sweep,
    "gen-synthetic": cmd_gen_synthetic,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _set_threads(args.threads)
    if getattr(args, "input", None) is not None and not args.input.exists():
        sys.stderr.write(f"mdselect: error: input path not found: {args.input}\n")
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except _PRECONDITION_ERRORS as exc:
        sys.stderr.write(f"mdselect: precondition failed: {exc}\n")
        return EXIT_PRECONDITION
    except (*_INPUT_ERRORS, ValueError) as exc:
        sys.stderr.write(f"mdselect: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
