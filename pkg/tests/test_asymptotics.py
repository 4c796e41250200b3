import math

import numpy as np
import pytest

from corrmax import distributions as D
from corrmax.asymptotics import (
    jiang_transform,
    limit_cdf,
    limit_quantile,
    limit_sf,
    p_value,
    run_test,
)
from corrmax.errors import DomainError
from corrmax.matrix import DataMatrix
from corrmax.rng import derive_seed
from corrmax.sim import sample_matrix

# 30-digit mpmath evaluations of the closed forms
T_L0_N3 = -4.30040132705573974940664661561
T_L1_N3 = -1.30040132705573974940664661561
T_L0_N2 = -3.13910164282144556468136764407
NEG_LOG_8PI = -3.22417142752923610239512371573
GAMMAS = (0.25, 0.5, 1.0, 2.0, 4.0)


class TestTransform:
    @pytest.mark.parametrize("L, n, expected", [(0, 3, T_L0_N3), (1, 3, T_L1_N3), (0, 2, T_L0_N2)])
    def test_values(self, L, n, expected):
        assert jiang_transform(L, n) == pytest.approx(expected, rel=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            jiang_transform(0.5, 1)
        with pytest.raises(DomainError):
            jiang_transform(-0.1, 10)

    def test_scalar_recomputation(self, rng):
        for L, n in zip(rng.uniform(0, 1, 200), rng.integers(2, 10**6, 200)):
            ref = n * L * L - 4 * math.log(n) + math.log(math.log(n))
            assert jiang_transform(L, int(n)) == pytest.approx(ref, rel=1e-12, abs=1e-12)


class TestLimitLaw:
    def test_examples(self):
        assert limit_cdf(100.0, 1.0) > 1 - 1e-15
        assert limit_cdf(NEG_LOG_8PI, 1.0) == pytest.approx(math.exp(-1), rel=1e-14)
        assert limit_cdf(0.0, 1.0) < limit_cdf(1.0, 1.0)
        assert limit_quantile(math.exp(-1), 1.0) == pytest.approx(NEG_LOG_8PI, rel=1e-14)

    def test_valid_cdf(self):
        for g in GAMMAS:
            t = np.linspace(-200, 200, 10_000)
            F = np.array([limit_cdf(x, g) for x in t])
            assert (np.diff(F) >= 0).all()
            assert F[0] <= 1e-12 and F[-1] >= 1 - 1e-12

    def test_round_trip(self):
        qs = [1e-6, 1e-3, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 1 - 1e-3, 1 - 1e-6]
        for g in GAMMAS:
            for q in qs:
                assert abs(limit_cdf(limit_quantile(q, g), g) - q) <= 1e-12
        assert limit_cdf(limit_quantile(0.95, 2), 2) == pytest.approx(0.95, abs=1e-12)

    def test_quantile_monotone_to_infinity(self):
        qs = 1 - np.logspace(-1, -15, 15)
        ts = [limit_quantile(q, 1.0) for q in qs]
        assert all(b > a for a, b in zip(ts, ts[1:])) and ts[-1] > 60

    def test_scaling_relation(self):
        for g in GAMMAS:
            for t in np.linspace(-20, 40, 301):
                assert limit_cdf(t, g) == pytest.approx(limit_cdf(t + 4 * math.log(g), 1.0), abs=1e-12)

    def test_sf_complements_cdf(self):
        for t in np.linspace(-10, 30, 41):
            assert limit_sf(t, 1.5) + limit_cdf(t, 1.5) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_gamma_domain(self, bad):
        with pytest.raises(DomainError):
            limit_cdf(0.0, bad)

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.5, 2.0])
    def test_quantile_domain(self, q):
        with pytest.raises(DomainError):
            limit_quantile(q, 1.0)


class TestPValue:
    def test_null_extreme(self):
        assert p_value(0.0, 10**6, 1.0) > 1 - 1e-6

    def test_far_right_tail(self):
        assert p_value(1.0, 10_000, 1.0) < 1e-12

    def test_quantile_matched(self):
        for g in GAMMAS:
            n = 500
            t = limit_quantile(0.95, g)
            L = math.sqrt((t + 4 * math.log(n) - math.log(math.log(n))) / n)
            assert p_value(L, n, g) == pytest.approx(0.05, abs=1e-12)


class TestRunTest:
    def test_duplicate_columns_reject(self, rng):
        X = rng.standard_normal((500, 20))
        X[:, 7] = X[:, 2]
        rep = run_test(DataMatrix(X))
        assert rep.L == pytest.approx(1.0, abs=4e-16)
        assert rep.p_value < 1e-12 and rep.reject
        assert rep.argmax_pair == (2, 7)
        assert rep.to_dict()["argmax_pair"] == [3, 8]

    def test_report_fields(self, rng):
        rep = run_test(DataMatrix(rng.standard_normal((60, 30))), level=0.1)
        d = rep.to_dict()
        assert list(d) == ["n", "p", "gamma_hat", "L", "t_stat", "p_value", "level", "reject", "argmax_pair"]
        assert rep.gamma_hat == 2.0
        assert rep.t_stat == pytest.approx(jiang_transform(rep.L, 60), rel=1e-12)
        assert rep.reject == (rep.p_value < rep.level)

    def test_affine_invariance(self, rng):
        X = rng.standard_normal((80, 15))
        a, b = rng.uniform(0.2, 5, 15), rng.uniform(-50, 50, 15)
        r0, r1 = run_test(DataMatrix(X)), run_test(DataMatrix(X * a + b))
        assert r1.argmax_pair == r0.argmax_pair
        assert r1.p_value == pytest.approx(r0.p_value, rel=1e-8)

    @pytest.mark.parametrize("level", [0.0, 1.0, 1.5, -0.1])
    def test_level_domain(self, rng, level):
        with pytest.raises(DomainError):
            run_test(DataMatrix(rng.standard_normal((10, 3))), level=level)

    @pytest.mark.slow
    def test_size_under_null(self):
        accept = sum(
            not run_test(sample_matrix(D.normal(), 500, 500, derive_seed(77, k))).reject for k in range(100)
        )
        assert accept >= 90
