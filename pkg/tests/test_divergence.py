import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from mdselect.divergence import (
    jeffreys,
    jmh,
    kl,
    noncentrality_d,
    noncentrality_j,
    pooled_complement,
)
from mdselect.errors import UndefinedDivergence


def distributions(k_min=2, k_max=6, positive=True):
    low = 1 if positive else 0

    def normalise(ws):
        w = np.asarray(ws, dtype=float)
        return w / w.sum()

    return st.integers(k_min, k_max).flatmap(
        lambda k: st.lists(st.integers(low, 1000), min_size=k, max_size=k)
        .filter(lambda ws: sum(ws) > 0)
        .map(normalise)
    )


def same_size_pair(k_max=6):
    return st.integers(2, k_max).flatmap(
        lambda k: st.tuples(distributions(k, k), distributions(k, k))
    )


class TestKL:
    def test_identity(self):
        assert kl([0.3, 0.7], [0.3, 0.7]) == 0.0

    def test_two_bin_value(self):
        # 0.5 ln 2 + 0.5 ln(2/3), frozen from the mpmath oracle
        expected = float(oracles.kl([0.5, 0.5], [0.25, 0.75]))
        assert expected == pytest.approx(0.143841036225890, abs=1e-14)
        assert kl([0.5, 0.5], [0.25, 0.75]) == pytest.approx(expected, abs=1e-15)

    def test_zero_mass_bin(self):
        assert kl([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)

    def test_undefined(self):
        with pytest.raises(UndefinedDivergence):
            kl([0.5, 0.5], [1.0, 0.0])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            kl([0.5, 0.5], [0.2, 0.3, 0.5])

    def test_rejects_non_distribution(self):
        with pytest.raises(ValueError):
            kl([0.5, 0.6], [0.5, 0.5])

    @given(same_size_pair())
    def test_nonnegative(self, pq):
        p, q = pq
        assert kl(p, q) >= 0.0


class TestJeffreys:
    def test_value(self):
        expected = float(oracles.jeffreys([0.5, 0.5], [0.25, 0.75]))
        assert expected == pytest.approx(0.2746530721670274, abs=1e-15)
        assert jeffreys([0.5, 0.5], [0.25, 0.75]) == pytest.approx(expected, abs=1e-15)

    @given(same_size_pair())
    def test_symmetric(self, pq):
        p, q = pq
        assert jeffreys(p, q) == pytest.approx(jeffreys(q, p), abs=1e-15)

    def test_zero_iff_equal(self):
        assert jeffreys([0.2, 0.8], [0.2, 0.8]) == 0.0
        assert jeffreys([0.2, 0.8], [0.2 + 1e-6, 0.8 - 1e-6]) > 0.0


class TestPooledComplement:
    def test_two_classes_is_other_class(self):
        assert pooled_complement([0.1, 0.37], [0.3, 0.7], 0) == 0.37
        assert pooled_complement([0.1, 0.37], [0.3, 0.7], 1) == 0.1

    def test_uniform_three(self):
        assert pooled_complement([0.1, 0.2, 0.3], [1 / 3] * 3, 0) == pytest.approx(0.25, abs=1e-15)

    def test_weighted(self):
        # excluded 2: (0.2 * 0.1 + 0.3 * 0.2) / 0.5
        assert pooled_complement([0.1, 0.2, 0.9], [0.2, 0.3, 0.5], 2) == pytest.approx(0.16, abs=1e-15)

    def test_fixed_point(self):
        assert pooled_complement([0.4] * 4, [0.1, 0.2, 0.3, 0.4], 1) == pytest.approx(0.4, abs=1e-15)


class TestJMH:
    def test_two_classes_is_jeffreys(self):
        p, q = [0.2, 0.5, 0.3], [0.6, 0.1, 0.3]
        assert jmh([p, q], [0.9, 0.1]) == jeffreys(p, q)

    def test_identical_rows(self):
        assert jmh([[0.3, 0.7]] * 3, [0.2, 0.3, 0.5]) == 0.0

    def test_three_class_example(self):
        rows = [[0.7, 0.3], [0.5, 0.5], [0.3, 0.7]]
        expected = float(oracles.jmh(rows, [1 / 3] * 3))
        # frozen oracle value
        assert expected == pytest.approx(0.3675737947736245, abs=1e-15)
        assert jmh(rows, [1 / 3] * 3) == pytest.approx(expected, abs=1e-14)

    @settings(max_examples=50)
    @given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 2**32 - 1))
    def test_class_permutation_invariance(self, n, k, seed):
        rng = np.random.default_rng(seed)
        theta = rng.dirichlet(np.ones(k), size=n) * 0.98 + 0.02 / k
        priors = rng.dirichlet(np.ones(n))
        priors /= priors.sum()
        perm = rng.permutation(n)
        assert jmh(theta[perm], priors[perm]) == pytest.approx(jmh(theta, priors), abs=1e-12)


class TestNoncentrality:
    def test_example(self):
        # Pearson 5 * (0.25 + 1/12) = 1.666..., Neyman 5 * 0.25 = 1.25
        assert noncentrality_j([0.5, 0.5], [0.25, 0.75], 10) == pytest.approx(35 / 12, abs=1e-14)

    def test_equal(self):
        assert noncentrality_j([0.2, 0.8], [0.2, 0.8], 3.0) == 0.0

    def test_linear_in_length(self):
        a = noncentrality_j([0.1, 0.6, 0.3], [0.3, 0.3, 0.4], 1.0)
        assert noncentrality_j([0.1, 0.6, 0.3], [0.3, 0.3, 0.4], 2.0) == pytest.approx(2 * a, rel=1e-15)

    def test_pearson_part(self):
        # 10 * (0.0625 / 0.25 + 0.0625 / 0.75)
        assert noncentrality_d([0.5, 0.5], [0.25, 0.75], 10) == pytest.approx(10 / 3, abs=1e-14)

    def test_zero_bin(self):
        with pytest.raises(UndefinedDivergence):
            noncentrality_j([1.0, 0.0], [0.5, 0.5])

    def test_bad_length(self):
        with pytest.raises(ValueError):
            noncentrality_j([0.5, 0.5], [0.5, 0.5], 0)


def test_brute_force_agreement_small_rationals():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        k = int(rng.integers(2, 5))
        n = int(rng.integers(2, 5))
        rows = [oracles.random_rational_distribution(rng, k) for _ in range(n)]
        priors = oracles.random_rational_distribution(rng, n)
        f = [[float(x) for x in r] for r in rows]
        fp = [float(x) for x in priors]
        p, q = rows[0], rows[1]
        assert kl(f[0], f[1]) == pytest.approx(float(oracles.kl(p, q)), abs=1e-12)
        assert jeffreys(f[0], f[1]) == pytest.approx(float(oracles.jeffreys(p, q)), abs=1e-12)
        assert jmh(f, fp) == pytest.approx(float(oracles.jmh(rows, priors)), abs=1e-12)
        assert noncentrality_j(f[0], f[1], 7) == pytest.approx(
            float(oracles.noncentrality_j(p, q, 7)), abs=1e-12
        )
