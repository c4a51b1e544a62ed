import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from mdselect.corpus import LabeledCorpus, SparseDocVector, Vocabulary, synthetic_terms
from mdselect.divergence import jeffreys
from mdselect.errors import BudgetOutOfRange, InvalidModel, UnknownMethod
from mdselect.ranking import (
    FeatureRanking,
    algorithm_agreement_check,
    md_chi2_rank,
    md_rank_multiclass,
    md_rank_two_class,
    md_rank_two_class_greedy,
    prefix_divergences,
    rank_corpus,
    select_top,
)

THETA = np.array([[0.7, 0.2, 0.1], [0.1, 0.2, 0.7]])
SIX_TENTHS_LN21 = 0.6 * math.log(21)  # 1.8267134...


def random_positive_theta(rng, n, m, conc=1.0):
    theta = rng.dirichlet(np.full(m, conc), size=n)
    theta = 0.95 * theta + 0.05 / m
    return theta / theta.sum(axis=1, keepdims=True)


seeds = st.integers(0, 2**32 - 1)


class TestGreedy:
    def test_example_step_one(self):
        r = md_rank_two_class_greedy(THETA)
        assert r.order[0] == 0
        assert r.step_divergences[0] == pytest.approx(SIX_TENTHS_LN21, abs=1e-12)

    def test_example_matches_oracle(self):
        order, steps = oracles.greedy_order(THETA[0], THETA[1])
        r = md_rank_two_class_greedy(THETA)
        # both step-2 candidates reach J = 1.2 ln 7, so the lower index wins
        assert order == [0, 1, 2]
        assert r.order.tolist() == order
        assert np.allclose(r.step_divergences, steps, atol=1e-12)
        assert steps[1] == pytest.approx(1.2 * math.log(7), abs=1e-12)

    def test_identical_rows(self):
        r = md_rank_two_class_greedy(np.full((2, 5), 0.2))
        assert r.order.tolist() == [0, 1, 2, 3, 4]
        assert np.all(r.step_divergences == 0)

    def test_matches_oracle_random(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            m = int(rng.integers(2, 9))
            theta = random_positive_theta(rng, 2, m, conc=float(rng.choice([0.3, 1.0, 5.0])))
            order, steps = oracles.greedy_order(theta[0], theta[1])
            r = md_rank_two_class_greedy(theta)
            assert r.order.tolist() == order
            assert np.allclose(r.step_divergences, steps, atol=1e-12)

    @settings(max_examples=60)
    @given(seeds, st.integers(2, 30))
    def test_theorem1_monotone(self, seed, m):
        theta = random_positive_theta(np.random.default_rng(seed), 2, m, conc=0.5)
        steps = md_rank_two_class_greedy(theta).step_divergences
        assert np.all(np.diff(steps) >= -1e-9)

    def test_last_step_is_full_j(self):
        rng = np.random.default_rng(12)
        theta = random_positive_theta(rng, 2, 12)
        steps = md_rank_two_class_greedy(theta).step_divergences
        assert steps[-1] == pytest.approx(jeffreys(theta[0], theta[1]), abs=1e-12)

    def test_rejects_three_classes(self):
        with pytest.raises(InvalidModel):
            md_rank_two_class_greedy(np.full((3, 2), 0.5))

    @pytest.mark.parametrize(
        "theta",
        [[[0.5, 0.6], [0.5, 0.5]], [[1.0, 0.0], [0.5, 0.5]], [[0.5, 0.5], [0.5, np.nan]]],
    )
    def test_invalid_model(self, theta):
        with pytest.raises(InvalidModel):
            md_rank_two_class_greedy(theta)


class TestTwoClass:
    def test_example(self):
        r = md_rank_two_class(THETA)
        assert r.order.tolist() == [0, 2, 1]
        assert r.score_by_feature() == pytest.approx([SIX_TENTHS_LN21, 0.0, SIX_TENTHS_LN21], abs=1e-12)

    def test_identical_rows(self):
        assert np.all(md_rank_two_class(np.full((2, 4), 0.25)).scores == 0)

    def test_two_features_tie(self):
        s = md_rank_two_class([[0.3, 0.7], [0.6, 0.4]]).score_by_feature()
        assert s[0] == pytest.approx(s[1], abs=1e-15)

    def test_scores_non_increasing(self):
        rng = np.random.default_rng(13)
        r = md_rank_two_class(random_positive_theta(rng, 2, 40))
        assert np.all(np.diff(r.scores) <= 0)

    @settings(max_examples=40)
    @given(seeds, st.integers(2, 25))
    def test_prefix_growth(self, seed, m):
        theta = random_positive_theta(np.random.default_rng(seed), 2, m, conc=0.5)
        growth = prefix_divergences(theta, md_rank_two_class(theta).order)
        assert np.all(np.diff(growth) >= -1e-9)

    def test_sparse_regime_agrees_with_greedy_top(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            theta = random_positive_theta(rng, 2, 400, conc=1.0)
            assert theta.max() <= 0.05
            assert md_rank_two_class(theta).order[0] == md_rank_two_class_greedy(theta).order[0]


class TestMulticlass:
    @settings(max_examples=50)
    @given(seeds, st.integers(2, 20), st.floats(0.05, 0.95))
    def test_reduces_to_two_class(self, seed, m, prior):
        theta = random_positive_theta(np.random.default_rng(seed), 2, m)
        a = md_rank_multiclass(theta, [prior, 1 - prior])
        b = md_rank_two_class(theta)
        assert np.array_equal(a.order, b.order)
        assert np.array_equal(a.scores, b.scores)

    def test_identical_classes(self):
        assert np.all(md_rank_multiclass(np.full((4, 5), 0.2), [0.25] * 4).scores == 0)

    def test_three_class_oracle(self):
        theta = np.array([[0.6, 0.2, 0.2], [0.2, 0.4, 0.4], [0.2, 0.4, 0.4]])
        priors = [1 / 3] * 3
        got = md_rank_multiclass(theta, priors).score_by_feature()
        for i in range(3):
            assert got[i] == pytest.approx(float(oracles.two_bin_md_score(theta[:, i], priors)), abs=1e-12)

    def test_random_against_oracle(self):
        rng = np.random.default_rng(15)
        for _ in range(40):
            n, m = int(rng.integers(2, 6)), int(rng.integers(2, 8))
            theta = random_positive_theta(rng, n, m)
            priors = rng.dirichlet(np.ones(n))
            got = md_rank_multiclass(theta, priors).score_by_feature()
            want = [float(oracles.two_bin_md_score(theta[:, i], priors)) for i in range(m)]
            assert np.allclose(got, want, atol=1e-12)

    @settings(max_examples=40)
    @given(seeds, st.integers(2, 5), st.integers(2, 15))
    def test_feature_permutation(self, seed, n, m):
        rng = np.random.default_rng(seed)
        theta = random_positive_theta(rng, n, m)
        priors = rng.dirichlet(np.ones(n))
        perm = rng.permutation(m)
        base = md_rank_multiclass(theta, priors)
        moved = md_rank_multiclass(theta[:, perm], priors)
        assert np.allclose(moved.score_by_feature(), base.score_by_feature()[perm], atol=1e-13)
        if np.unique(base.scores).size == m:
            assert np.array_equal(perm[moved.order], base.order)

    def test_ties_resolve_to_lowest_index(self):
        theta = np.array([[0.3, 0.2, 0.3, 0.2], [0.2, 0.3, 0.2, 0.3]])
        r = md_rank_multiclass(theta, [0.5, 0.5])
        assert r.order.tolist() == [0, 1, 2, 3]

    @settings(max_examples=30)
    @given(seeds, st.integers(3, 5), st.integers(2, 15))
    def test_prefix_growth_multiclass(self, seed, n, m):
        rng = np.random.default_rng(seed)
        theta = random_positive_theta(rng, n, m, conc=0.5)
        priors = rng.dirichlet(np.ones(n))
        growth = prefix_divergences(theta, md_rank_multiclass(theta, priors).order, priors)
        assert np.all(np.diff(growth) >= -1e-9)


class TestChi2:
    def test_two_class_example(self):
        # each class contributes nu_J([.5,.5],[.25,.75]; 10) = 35/12; the score sums both
        r = md_chi2_rank([[0.5, 0.5], [0.25, 0.75]], [0.5, 0.5], length=10)
        per_class = float(oracles.noncentrality_j([0.5, 0.5], [0.25, 0.75], 10))
        assert per_class == pytest.approx(2.916667, abs=1e-6)
        assert r.score_by_feature()[0] == pytest.approx(2 * per_class, abs=1e-12)

    def test_identical_classes(self):
        assert np.all(md_chi2_rank(np.full((3, 4), 0.25), [1 / 3] * 3).scores == 0)

    def test_random_against_oracle(self):
        rng = np.random.default_rng(16)
        for _ in range(30):
            n, m = int(rng.integers(2, 5)), int(rng.integers(2, 7))
            theta = random_positive_theta(rng, n, m)
            priors = rng.dirichlet(np.ones(n))
            got = md_chi2_rank(theta, priors, 3.0).score_by_feature()
            want = [float(oracles.two_bin_chi2_score(theta[:, i], priors, 3)) for i in range(m)]
            assert np.allclose(got, want, rtol=1e-12, atol=1e-13)

    @settings(max_examples=40)
    @given(seeds, st.floats(0.01, 1e4))
    def test_length_invariance(self, seed, length):
        rng = np.random.default_rng(seed)
        theta = random_positive_theta(rng, 3, 12)
        a = md_chi2_rank(theta, [0.2, 0.3, 0.5], 1.0)
        b = md_chi2_rank(theta, [0.2, 0.3, 0.5], length)
        assert np.array_equal(a.order, b.order)
        assert np.allclose(b.scores, length * a.scores, rtol=1e-12)


class TestAgreement:
    def test_very_sparse_example(self):
        rng = np.random.default_rng(18)
        theta = rng.dirichlet(np.full(1000, 5.0), size=2)
        assert theta.max() <= 0.01
        rep = algorithm_agreement_check(theta)
        assert rep.condition_holds and rep.first_picks_agree

    def test_identical(self):
        rep = algorithm_agreement_check(np.full((2, 3), 1 / 3))
        assert rep.delta == 0.0 and rep.bound == 0.0 and rep.condition_holds

    def test_delta_matches_definition(self):
        theta = np.array([[0.5, 0.3, 0.2], [0.2, 0.3, 0.5]])
        rep = algorithm_agreement_check(theta)
        e1, e2 = rep.first, rep.second
        a = lambda i: (1 - theta[0, i]) * math.log((1 - theta[0, i]) / (1 - theta[1, i]))
        b = lambda i: theta[0, i] * math.log(theta[0, i] / theta[1, i])
        assert rep.delta == pytest.approx(a(e2) - a(e1), abs=1e-15)
        assert rep.bound == pytest.approx(b(e1) - b(e2), abs=1e-15)

    def test_first_picks_agree_off_ties(self):
        # the greedy first step scores every feature by the same two-bin J
        rng = np.random.default_rng(19)
        for _ in range(300):
            theta = random_positive_theta(rng, 2, int(rng.integers(2, 8)), conc=0.7)
            top = md_rank_two_class(theta).scores
            if top[0] - top[1] <= 1e-12 * max(1.0, top[0]):
                continue
            assert algorithm_agreement_check(theta).first_picks_agree

    def test_adversarial_dense(self):
        """Found by randomized search over dense 2 x 3 models, then confirmed by the exhaustive greedy oracle."""
        theta = np.array([[0.0233, 0.0581, 0.9186], [0.8475, 0.0769, 0.0756]])
        rep = algorithm_agreement_check(theta)
        assert not rep.condition_holds
        assert rep.first_picks_agree and not rep.second_picks_agree
        order, _ = oracles.greedy_order(theta[0], theta[1])
        assert (rep.first, rep.second) == (0, 2)
        assert (rep.greedy_first, rep.greedy_second) == tuple(order[:2]) == (0, 1)


class TestSelectTop:
    def test_example(self):
        r = md_rank_two_class(THETA)
        assert select_top(r, 3).tolist() == [0, 2, 1]
        assert select_top(r, 1).tolist() == [0]

    @pytest.mark.parametrize("r", [0, 4])
    def test_out_of_range(self, r):
        with pytest.raises(BudgetOutOfRange):
            select_top(md_rank_two_class(THETA), r)


def test_ranking_csv():
    r = md_rank_two_class(THETA)
    lines = r.to_csv(["a", "b", "c"]).splitlines()
    assert lines[0] == "# method=md"
    assert lines[1] == "rank,feature_index,term,score"
    assert lines[2].startswith("1,0,a,1.826713")
    assert lines[4].startswith("3,1,b,")


def test_ranking_requires_permutation():
    with pytest.raises(ValueError):
        FeatureRanking("md", [0, 0], [1.0, 1.0])


def _toy_corpus(n_classes=2):
    rng = np.random.default_rng(21)
    docs = []
    for c in range(n_classes):
        for _ in range(6):
            counts = rng.multinomial(20, np.roll([0.5, 0.2, 0.1, 0.1, 0.1], c))
            idx = np.flatnonzero(counts)
            docs.append(SparseDocVector(c, idx, counts[idx]))
    vocab = Vocabulary(synthetic_terms(5), np.ones(5, dtype=int))
    return LabeledCorpus(vocab, [str(c) for c in range(n_classes)], docs)


class TestRankCorpus:
    @pytest.mark.parametrize("method", ["md", "md-greedy", "md-chi2", "df", "tfidf", "mi", "cet", "ig", "chi", "gss"])
    def test_all_methods_give_permutations(self, method):
        r = rank_corpus(_toy_corpus(), method)
        assert sorted(r.order.tolist()) == list(range(5))
        assert r.method == method

    def test_md_greedy_multiclass_rejected(self):
        with pytest.raises(InvalidModel):
            rank_corpus(_toy_corpus(3), "md-greedy")

    def test_unknown(self):
        with pytest.raises(UnknownMethod):
            rank_corpus(_toy_corpus(), "svm")

    def test_informative_feature_first(self):
        r = rank_corpus(_toy_corpus(), "md")
        assert r.order[0] in (0, 1)
