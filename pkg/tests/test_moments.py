import math

import numpy as np
import pytest

from corrmax import distributions as D
from corrmax.errors import DomainError, UnsupportedError
from corrmax.moments import (
    FAILS,
    HOLDS,
    INDETERMINATE,
    INFINITE,
    abs_moment,
    ll_condition_verdict,
    ll_functionals,
    series_partial_sums,
    slln_condition_verdict,
    top_two_product_tail,
)

SQRT_2_OVER_PI = 0.797884560802865355879892119869
LOG_E1_M3 = 0.441515725375556371982302632169  # ln(e+1)^-3
LOG_E1_M2 = 0.579825686572535400114397107783  # ln(e+1)^-2


def _mc_top_two(sampler, n, a, reps, seed):
    """Monte Carlo P(max_{i<j}|X_i X_j| >= a) with its standard error."""
    g = np.random.default_rng(seed)
    z = np.abs(sampler(g, (reps, n)))
    z.sort(axis=1)
    hit = z[:, -1] * z[:, -2] >= a
    p = hit.mean()
    return p, math.sqrt(max(p * (1 - p), 1e-300) / reps)


class TestAbsMoment:
    @pytest.mark.parametrize(
        "dist, r, expected",
        [
            (D.point_mass(0), 1.7, 0.0),
            (D.normal(), 1, SQRT_2_OVER_PI),
            (D.normal(), 6, 15.0),
            (D.normal(0, 2), 2, 4.0),
            (D.uniform(-1, 3), 2, 7 / 3),
            (D.pareto(1, 3), 2, 3.0),
            (D.pareto(2, 4), 1, 8 / 3),
            (D.student_t(5), 2, 5 / 3),
            (D.rademacher(), 3.3, 1.0),
            (D.point_mass(-2), 3, 8.0),
        ],
        ids=str,
    )
    def test_closed_forms(self, dist, r, expected):
        assert abs_moment(dist, r) == pytest.approx(expected, rel=1e-8, abs=1e-300)

    def test_student_t_closed_form(self):
        # E|T_nu|^r = nu^(r/2) Gamma((r+1)/2) Gamma((nu-r)/2) / (sqrt(pi) Gamma(nu/2))
        for nu, r in [(3, 2.5), (6, 5.5), (10, 1.3)]:
            ref = nu ** (r / 2) * math.gamma((r + 1) / 2) * math.gamma((nu - r) / 2) / (math.sqrt(math.pi) * math.gamma(nu / 2))
            assert abs_moment(D.student_t(nu), r) == pytest.approx(ref, rel=1e-8)

    @pytest.mark.parametrize("dist, r", [(D.student_t(3), 4), (D.student_t(3), 3), (D.pareto(1, 1.5), 2), (D.pareto(1, 2), 2)], ids=str)
    def test_tail_rule(self, dist, r):
        assert abs_moment(dist, r) is INFINITE

    def test_standardized_wrapper(self):
        assert abs_moment(D.student_t(5).standardized(), 2) == pytest.approx(1.0, rel=1e-8)

    def test_monotone_in_r_for_pareto(self):
        r = np.linspace(0.1, 2.9, 30)
        m = [abs_moment(D.pareto(1.0, 3.0), x) for x in r]
        assert all(b >= a for a, b in zip(m, m[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            abs_moment(D.normal(), 0)
        with pytest.raises(UnsupportedError):
            abs_moment("normal", 1)


class TestVerdicts:
    @pytest.mark.parametrize(
        "dist, alpha, verdict",
        [
            (D.normal(), 0.6, HOLDS),
            (D.pareto(1, 1.5), 1.0, FAILS),
            (D.student_t(4), 0.75, INDETERMINATE),
            (D.normal(), 0.75, HOLDS),
        ],
        ids=str,
    )
    def test_slln(self, dist, alpha, verdict):
        v = slln_condition_verdict(dist, alpha)
        assert v.verdict == verdict
        assert v.condition == f"SLLN({alpha:g})"
        assert v.evidence["sufficient_order"] == pytest.approx(3 / alpha)
        assert v.evidence["necessary_order"] == pytest.approx(2 / alpha)

    @pytest.mark.parametrize("dist, verdict", [(D.normal(), HOLDS), (D.student_t(3), FAILS), (D.student_t(6), INDETERMINATE), (D.student_t(7), HOLDS)], ids=str)
    def test_ll(self, dist, verdict):
        assert ll_condition_verdict(dist).verdict == verdict

    def test_normal_holds_on_grid(self):
        for alpha in np.linspace(0.51, 3.0, 12):
            assert slln_condition_verdict(D.normal(), alpha).verdict == HOLDS

    def test_alpha_domain(self):
        with pytest.raises(DomainError):
            slln_condition_verdict(D.normal(), 0.5)

    def test_json_infinity(self):
        d = ll_condition_verdict(D.student_t(3)).to_dict()
        assert d["evidence"]["sufficient_moment"] == "inf"


class TestFunctionals:
    def test_point_mass(self):
        f = ll_functionals(D.point_mass(0), 10_000)
        assert (f.f27, f.f28) == (0.0, 0.0)

    def test_rademacher(self):
        f = ll_functionals(D.rademacher(), 10_000)
        assert f.f27 == pytest.approx(LOG_E1_M3, rel=1e-14)
        assert f.f28 == pytest.approx(LOG_E1_M2, rel=1e-14)
        assert f.se27 == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.slow
    def test_normal_two_seeds(self):
        a, b = ll_functionals(D.normal(), 10**6, seed=1), ll_functionals(D.normal(), 10**6, seed=2)
        assert abs(a.f27 - b.f27) <= 3 * math.hypot(a.se27, b.se27)
        assert abs(a.f28 - b.f28) <= 3 * math.hypot(a.se28, b.se28)

    def test_min_samples(self):
        with pytest.raises(DomainError):
            ll_functionals(D.normal(), 9_999)

    def test_verdict_evidence(self):
        v = ll_condition_verdict(D.normal(), n_mc=10_000, seed=3)
        assert v.verdict == HOLDS and v.evidence["functionals"]["n_mc"] == 10_000


class TestTopTwoTail:
    @pytest.mark.parametrize("dist", [D.normal(), D.student_t(3), D.uniform(-1, 2), D.pareto(1, 1.5)], ids=str)
    def test_a_zero(self, dist):
        assert top_two_product_tail(dist, 5, 0.0) == 1.0

    @pytest.mark.parametrize(
        "dist, sampler, n, a",
        [
            (D.normal(), lambda g, s: g.standard_normal(s), 2, 1.0),
            (D.normal(), lambda g, s: g.standard_normal(s), 10, 5.0),
            (D.student_t(3), lambda g, s: g.standard_t(3, s), 2, 4.0),
            (D.student_t(3), lambda g, s: g.standard_t(3, s), 5, 20.0),
            (D.pareto(1, 1.5), lambda g, s: g.pareto(1.5, s) + 1.0, 4, 30.0),
            (D.uniform(-1, 2), lambda g, s: g.uniform(-1, 2, s), 6, 1.5),
        ],
        ids=["normal-2", "normal-10", "t3-2", "t3-5", "pareto-4", "uniform-6"],
    )
    def test_monte_carlo(self, dist, sampler, n, a):
        reps = 10**6 if n == 2 else 200_000
        p_mc, se = _mc_top_two(sampler, n, a, reps, seed=n)
        assert abs(top_two_product_tail(dist, n, a) - p_mc) <= 3 * se

    def test_normal_far_tail(self):
        p = top_two_product_tail(D.normal(), 10, 50.0)
        p_mc, _ = _mc_top_two(lambda g, s: g.standard_normal(s), 10, 50.0, 10**6, seed=9)
        assert p_mc == 0.0
        assert 0.0 < p <= 3 * math.sqrt(p / 10**6)
        # asymptotically P ~ C(10,2) P(|X1 X2| >= 50): Bessel-K tail, 1e-22 scale
        assert 1e-23 < p < 1e-20

    def test_n2_exact_uniform(self):
        # |X| ~ U(0,1): P(Z1 Z2 >= a) = 1 - a + a ln a
        for a in (0.1, 0.5, 0.9):
            assert top_two_product_tail(D.uniform(-1, 1), 2, a) == pytest.approx(1 - a + a * math.log(a), rel=1e-6)

    def test_discrete(self):
        assert top_two_product_tail(D.rademacher(), 5, 1.0) == 1.0
        assert top_two_product_tail(D.rademacher(), 5, 1.1) == 0.0
        assert top_two_product_tail(D.point_mass(0), 5, 0.5) == 0.0
        assert top_two_product_tail(D.point_mass(2), 5, 4.0) == 1.0

    def test_monotone(self):
        d = D.student_t(4)
        a_grid = np.linspace(0.5, 30, 25)
        p = [top_two_product_tail(d, 8, a) for a in a_grid]
        assert all(b <= a_ + 1e-9 for a_, b in zip(p, p[1:]))
        q = [top_two_product_tail(d, n, 6.0) for n in range(2, 30)]
        assert all(b >= a_ - 1e-9 for a_, b in zip(q, q[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            top_two_product_tail(D.normal(), 1, 1.0)
        with pytest.raises(DomainError):
            top_two_product_tail(D.normal(), 3, -1.0)


class TestSeries:
    def test_point_mass(self):
        for mode, alpha in (("ll", None), ("slln", 0.8)):
            assert all(pt.partial_sum == 0.0 for pt in series_partial_sums(D.point_mass(0), mode, 500, alpha))

    def test_rademacher_slln(self):
        pts = series_partial_sums(D.rademacher(), "slln", 300, alpha=1.0)
        assert all(pt.term == 0.0 for pt in pts)

    def test_normal_ll_summability(self):
        pts = {pt.n: pt for pt in series_partial_sums(D.normal(), "ll", 10**4)}
        sums = [pts[n].partial_sum for n in sorted(pts)]
        assert all(b >= a for a, b in zip(sums, sums[1:]))
        assert pts[10**4].term * 10 <= pts[10**3].term
        assert pts[10**4].partial_sum - pts[10**3].partial_sum <= 0.1 * (pts[10**3].partial_sum - pts[100].partial_sum)

    def test_small_n_exact(self):
        pts = series_partial_sums(D.normal(), "ll", 20)
        ref = sum(top_two_product_tail(D.normal(), n, math.sqrt(n * math.log(n))) for n in range(2, 21))
        assert pts[-1].partial_sum == pytest.approx(ref, rel=1e-12)

    def test_mode_domain(self):
        with pytest.raises(DomainError):
            series_partial_sums(D.normal(), "slln", 100)
        with pytest.raises(DomainError):
            series_partial_sums(D.normal(), "nope", 100)
