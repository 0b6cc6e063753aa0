import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robinsym.rearrange import (
    NONDECREASING,
    NONINCREASING,
    LorentzParams,
    StepProfile,
    WeightedSamples,
    check_weight_condition,
    contraction_check,
    decreasing_rearrangement,
    distribution_function,
    hardy_littlewood_check,
    increasing_rearrangement,
    integrate_product,
    lorentz_norm,
    lp_norm,
    pseudo_rearrangement,
    reflect,
)


def ws(values, weights=None):
    values = np.asarray(values, dtype=float)
    return WeightedSamples(values, np.ones_like(values) if weights is None else np.asarray(weights, float))


def profile(bp, vals, flag=NONINCREASING):
    return StepProfile(np.asarray(bp, float), np.asarray(vals, float), flag)


samples_strategy = st.integers(1, 60).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(0, 10, allow_nan=False).map(lambda v: round(v, 1)), min_size=n, max_size=n),
        st.lists(st.floats(0.01, 3, allow_nan=False), min_size=n, max_size=n),
    )
)


class TestValidation:
    def test_empty(self):
        with pytest.raises(ValueError, match="empty domain"):
            WeightedSamples(np.array([]), np.array([]))

    def test_negative_value(self):
        with pytest.raises(ValueError):
            ws([1, -1])

    def test_nonpositive_weight(self):
        with pytest.raises(ValueError):
            ws([1, 1], [1, 0])

    def test_profile_monotonicity_enforced(self):
        with pytest.raises(ValueError):
            profile([0, 1, 2], [1, 2])
        with pytest.raises(ValueError):
            profile([0, 1, 2], [2, 1], NONDECREASING)

    def test_total_measure(self):
        w = np.full(10, 0.1)
        assert ws(np.ones(10), w).total_measure == 1.0


class TestDistribution:
    def test_three_levels(self):
        mu = distribution_function(ws([3, 1, 2]))
        assert mu.breakpoints.tolist() == [0, 1, 2, 3]
        assert mu.values.tolist() == [3, 2, 1]
        assert mu(3.0) == 0 and mu(10.0) == 0

    def test_constant(self):
        mu = distribution_function(ws([2.5] * 4, [0.5, 1, 1.5, 2]))
        assert mu.breakpoints.tolist() == [0, 2.5]
        assert mu.values.tolist() == [5.0]

    def test_two_levels(self):
        mu = distribution_function(ws([0.5, 2.0], [2, 1]))
        assert mu.breakpoints.tolist() == [0, 0.5, 2.0]
        assert mu.values.tolist() == [3, 1]

    def test_matches_direct_count(self, rng):
        f = ws(rng.integers(0, 6, 40).astype(float), rng.uniform(0.1, 1, 40))
        mu = distribution_function(f)
        for t in np.linspace(0, 6, 61):
            direct = f.weights[f.values > t].sum()
            assert mu(t) == pytest.approx(direct, rel=1e-13, abs=1e-13)


class TestRearrangements:
    def test_decreasing(self):
        d = decreasing_rearrangement(ws([3, 1, 2]))
        assert d.breakpoints.tolist() == [0, 1, 2, 3] and d.values.tolist() == [3, 2, 1]

    def test_ties_merge(self):
        d = decreasing_rearrangement(ws([1, 4, 4], [2, 1, 1]))
        assert d.breakpoints.tolist() == [0, 2, 4] and d.values.tolist() == [4, 1]

    def test_constant(self):
        d = decreasing_rearrangement(ws([7, 7], [1, 2]))
        assert d.values.tolist() == [7] and d.total_measure == 3
        i = increasing_rearrangement(ws([7, 7], [1, 2]))
        assert i.values.tolist() == [7] and i(100.0) == 7

    def test_increasing(self):
        i = increasing_rearrangement(ws([3, 1, 2]))
        assert i.values.tolist() == [1, 2, 3] and i.monotonicity == NONDECREASING

    def test_evaluation_past_end(self):
        d = decreasing_rearrangement(ws([3, 1, 2]))
        assert d(3.0) == 0 and d(2.999) == 1
        assert increasing_rearrangement(ws([3, 1, 2]))(3.0) == 3

    def test_reflection_identity(self, rng):
        f = ws(rng.uniform(0, 1, 50), rng.uniform(0.1, 1, 50))
        d, i = decreasing_rearrangement(f), increasing_rearrangement(f)
        total = f.total_measure
        mids = 0.5 * (i.breakpoints[:-1] + i.breakpoints[1:])
        np.testing.assert_array_equal(i(mids), d(total - mids))
        r = reflect(d)
        np.testing.assert_allclose(r.breakpoints, i.breakpoints, rtol=0, atol=1e-12)
        np.testing.assert_array_equal(r.values, i.values)

    def test_increasing_is_equimeasurable(self, rng):
        for _ in range(100):
            n = rng.integers(1, 30)
            f = ws(rng.integers(0, 5, n).astype(float), rng.integers(1, 4, n).astype(float))
            a = decreasing_rearrangement(increasing_rearrangement(f))
            b = decreasing_rearrangement(f)
            np.testing.assert_array_equal(a.values, b.values)
            np.testing.assert_array_equal(a.breakpoints, b.breakpoints)

    @settings(max_examples=200, deadline=None)
    @given(samples_strategy)
    def test_equimeasurability(self, data):
        f = ws(*data)
        d = decreasing_rearrangement(f)
        m1 = distribution_function(f)
        m2 = distribution_function(d.as_samples())
        np.testing.assert_array_equal(m1.breakpoints, m2.breakpoints)
        np.testing.assert_allclose(m1.values, m2.values, rtol=1e-14)


class TestNorms:
    def test_lp_examples(self):
        g = profile([0, 1, 2, 3], [3, 2, 1])
        assert lp_norm(g, 1) == 6
        c = profile([0, 5.0], [2.0])
        assert lp_norm(c, 2) == pytest.approx(2 * math.sqrt(5), rel=1e-15)

    def test_lp_rejects_small_p(self):
        with pytest.raises(ValueError):
            lp_norm(profile([0, 1], [1]), 0.5)

    @settings(max_examples=200, deadline=None)
    @given(samples_strategy, st.sampled_from([1.0, 2.0, 3.0]))
    def test_lp_preserved(self, data, p):
        f = ws(*data)
        a, b = lp_norm(decreasing_rearrangement(f), p), lp_norm(f, p)
        assert abs(a - b) <= 1e-12 * max(b, 1e-300)

    def test_lorentz_constant(self):
        assert lorentz_norm(profile([0, 4], [1]), LorentzParams(2, 1)) == pytest.approx(4, rel=1e-15)

    def test_lorentz_cone(self):
        # fine step approximation of 1 - sqrt(s/pi) converges to pi/3
        s = np.linspace(0, math.pi, 200001)
        mid = 0.5 * (s[:-1] + s[1:])
        g = profile(s, 1 - np.sqrt(mid / math.pi))
        assert lorentz_norm(g, LorentzParams(1, 1)) == pytest.approx(math.pi / 3, rel=1e-8)

    def test_lorentz_requires_decreasing(self):
        with pytest.raises(ValueError, match="requires decreasing rearrangement"):
            lorentz_norm(profile([0, 1, 2], [1, 2], NONDECREASING), LorentzParams(2, 1))

    def test_lorentz_params(self):
        for bad in ((0, 1), (1, -1), (math.inf, 1)):
            with pytest.raises(ValueError):
                LorentzParams(*bad)

    @settings(max_examples=100, deadline=None)
    @given(samples_strategy, st.floats(1, 5))
    def test_lorentz_p_equals_q(self, data, p):
        d = decreasing_rearrangement(ws(*data))
        if d.values.max() == 0:
            return
        a, b = lorentz_norm(d, LorentzParams(p, p)), lp_norm(d, p)
        assert a == pytest.approx(b, rel=1e-12)


class TestHardyLittlewood:
    def test_hand_count(self):
        r = hardy_littlewood_check(ws([1, 2]), ws([2, 1]))
        assert (r.lower, r.middle, r.upper, r.holds) == (4, 4, 5, True)

    def test_constant(self, rng):
        g = ws(rng.uniform(0, 1, 20))
        r = hardy_littlewood_check(ws(np.full(20, 3.0)), g)
        assert r.lower == pytest.approx(r.middle, rel=1e-14)
        assert r.upper == pytest.approx(r.middle, rel=1e-14)

    def test_mismatch(self):
        with pytest.raises(ValueError):
            hardy_littlewood_check(ws([1, 2]), ws([1, 2], [1, 2]))

    def test_random_pairs(self, rng):
        for _ in range(1000):
            n = rng.integers(1, 40)
            w = rng.uniform(0.1, 2, n)
            f, g = ws(rng.uniform(0, 5, n), w), ws(rng.uniform(0, 5, n), w)
            assert hardy_littlewood_check(f, g).holds


class TestContraction:
    def test_equality_case(self):
        c = contraction_check(ws([0, 2]), ws([1, 1]), 1)
        assert (c.lhs, c.rhs) == (2, 2) and c.holds

    def test_strict_case(self):
        c = contraction_check(ws([0, 2]), ws([1, 0]), 1)
        assert (c.lhs, c.rhs) == (1, 3) and c.holds

    def test_random_pairs(self, rng):
        for _ in range(1000):
            n = rng.integers(1, 40)
            w = rng.uniform(0.1, 2, n)
            f, g = ws(rng.uniform(0, 5, n), w), ws(rng.uniform(0, 5, n), w)
            for p in (1, 2):
                assert contraction_check(f, g, p).holds


class TestPseudoRearrangement:
    def test_unit_density(self, rng):
        u = ws(rng.uniform(0, 1, 30))
        F = pseudo_rearrangement(ws(np.ones(30)), u)
        assert F.values.tolist() == [1.0]

    def test_self_gives_decreasing(self, rng):
        u = ws(rng.integers(0, 5, 40).astype(float), rng.uniform(0.1, 1, 40))
        F = pseudo_rearrangement(u, u)
        d = decreasing_rearrangement(u)
        np.testing.assert_array_equal(F.values, d.values)
        np.testing.assert_array_equal(F.breakpoints, d.breakpoints)

    def test_tie_order_is_cell_index(self):
        F = pseudo_rearrangement(ws([5, 6, 7]), ws([1, 1, 1]))
        assert F.values.tolist() == [5, 6, 7] and F.monotonicity == "none"

    def test_mass_and_monotone_cumulative(self, rng):
        for _ in range(100):
            n = rng.integers(1, 50)
            w = rng.uniform(0.1, 1, n)
            f, u = ws(rng.uniform(0, 3, n), w), ws(rng.integers(0, 4, n).astype(float), w)
            F = pseudo_rearrangement(f, u)
            assert F.integral() == pytest.approx(f.integral(), rel=1e-12)
            cum = [F.cumulative(s) for s in np.linspace(0, F.total_measure, 40)]
            assert np.all(np.diff(cum) >= -1e-12)
            # the integral up to a superlevel boundary equals the integral over that superlevel set
            for t in np.unique(u.values):
                s = w[u.values > t].sum()
                assert F.cumulative(s) == pytest.approx(math.fsum(f.values[u.values > t] * w[u.values > t]), abs=1e-12)


class TestWeightCondition:
    def test_constant_all_n(self):
        for n in (2, 3, 7):
            assert check_weight_condition(profile([0, 3], [2.0]), n).holds

    def test_violated(self):
        r = check_weight_condition(profile([0, 1, 2], [1, 0.4]), 2)
        assert not r.holds and r.first_violation == 1.0

    def test_holds(self):
        assert check_weight_condition(profile([0, 1, 2], [1, 0.6]), 2).holds

    def test_against_dense_grid(self, rng):
        for _ in range(200):
            k = rng.integers(1, 6)
            vals = np.sort(rng.uniform(0.05, 1, k))[::-1]
            bp = np.concatenate([[0], np.cumsum(rng.uniform(0.1, 1, k))])
            p = profile(bp, vals)
            t = np.linspace(1e-9, bp[-1], 4001)[:-1]
            t = np.union1d(t, bp[:-1] + 1e-12)
            rhs = 0.5 * np.array([p.cumulative(x) for x in t]) / t
            dense = bool(np.all(p(t) >= rhs - 1e-9))
            assert check_weight_condition(p, 2).holds == dense

    def test_requires_decreasing(self):
        with pytest.raises(ValueError):
            check_weight_condition(profile([0, 1], [1], NONDECREASING), 2)


def test_integrate_product_closed_form():
    a = profile([0, 1, 3], [2, 1])
    b = profile([0, 2, 3], [1, 0.5])
    assert integrate_product(a, b) == pytest.approx(2 * 1 + 1 * 1 + 1 * 0.5)
