import functools
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsirelson_greedy.core_spaces import Lp, Tsirelson
from tsirelson_greedy.dkk import DKK, OrderedPartition
from tsirelson_greedy.finvec import FinVec
from tsirelson_greedy.greedy_analysis import (BasisHandle, GreedyReport, SizeError, almost_greedy_gap, cond_params,
                                              democracy_ratio, fundamental_function, greedy_gap, greedy_ordering,
                                              greedy_set, greedy_sum, quasi_greedy_ratio, regularity_fit)
from tsirelson_greedy.trig import RotatedTrigSum, WeightedTrig

from conftest import float_vectors, rational_vectors

T = BasisHandle(Tsirelson(), "T")


def reference_order(f):
    def cmp(i, j):
        a, b = abs(f[i]), abs(f[j])
        if a != b:
            return -1 if a > b else 1
        return -1 if i < j else (1 if i > j else 0)
    return sorted(f.support, key=functools.cmp_to_key(cmp))


def test_ordering_examples():
    assert greedy_ordering(FinVec.from_dense([1, -2, 2])) == [2, 3, 1]
    assert greedy_ordering(FinVec.unit(7)) == [7]
    assert greedy_ordering(FinVec.indicator([5, 2, 9])) == [2, 5, 9]


@given(rational_vectors(max_index=30))
def test_ordering_matches_reference(f):
    order = greedy_ordering(f)
    assert order == reference_order(f)
    assert sorted(order) == list(f.support)


def test_greedy_sum_examples():
    f = FinVec.from_dense([1, -2, 2])
    assert greedy_sum(f, 1) == FinVec({2: -2})
    assert greedy_sum(f, 0) == FinVec()
    assert greedy_sum(f, 3) == f and greedy_sum(f, 10) == f
    with pytest.raises(ValueError):
        greedy_sum(f, -1)


@given(rational_vectors(max_index=20), st.integers(0, 20))
def test_greedy_idempotent(f, m):
    g = greedy_sum(f, m)
    assert greedy_sum(g, m) == g
    assert set(greedy_set(f, m)) == set(g.support)


def test_fundamental_function_examples():
    ff = fundamental_function(T, 3, window=8)
    assert ff.values[0] == 1 and ff.values[2] == Fraction(3, 2) and all(ff.exact)
    lp = fundamental_function(BasisHandle(Lp(2)), 4)
    assert lp.values == pytest.approx([math.sqrt(m) for m in range(1, 5)])
    with pytest.raises(ValueError):
        fundamental_function(T, 5, window=8)


def test_fundamental_function_lower_bound_mode():
    ff = fundamental_function(T, 4, window=30, cutoff=2)
    assert ff.exact == [False] * 4  # window beyond the exhaustive limit
    assert all(b >= a for a, b in zip(ff.values, ff.values[1:]))


def test_fundamental_function_doubling():
    ff = fundamental_function(T, 6, window=12)
    for m in range(1, 4):
        assert ff.values[2 * m - 1] <= 2 * ff.values[m - 1]


def test_democracy():
    assert democracy_ratio(BasisHandle(Lp(1)), 4).delta == 1
    res = democracy_ratio(T, 6, window=12)
    assert res.exact and 1 <= res.delta < math.inf
    # |1_A| >= 1 always and phi(6) <= 6, so the ratio is bounded by 6
    assert res.delta <= 6


@given(st.lists(float_vectors(max_index=8), min_size=1, max_size=5))
def test_quasi_greedy_unconditional(samples):
    assert quasi_greedy_ratio(T, samples) <= 1 + 1e-12
    assert quasi_greedy_ratio(T, samples, ms=[100]) == pytest.approx(1.0)


def test_almost_greedy_examples():
    f = FinVec.from_dense([5.0, 4.0, 3.0, 2.0, 1.0])
    assert almost_greedy_gap(BasisHandle(Lp(2)), f, 2) == pytest.approx(1.0)
    with pytest.raises(SizeError):
        almost_greedy_gap(T, FinVec.from_dense(list(range(1, 41))), 20, budget=1000)


@given(float_vectors(max_index=8), st.integers(0, 4))
def test_almost_greedy_at_least_one(f, m):
    assert almost_greedy_gap(T, f, m) >= 1 - 1e-12
    # coordinate projections contract in a 1-unconditional basis
    assert float(T.norm(f - greedy_sum(f, m))) <= float(T.norm(f)) * (1 + 1e-12)


def test_greedy_gap_examples():
    f = FinVec.from_dense([1.0, 1.0, 1.0, 1.0])
    assert greedy_gap(BasisHandle(Lp(1)), f, 0) == 1.0
    assert greedy_gap(BasisHandle(Lp(1)), f, 2) == pytest.approx(1.0)
    dkk = BasisHandle(DKK(Tsirelson(), Lp(2), OrderedPartition((1, 2, 4))))
    g = FinVec.from_dense([1.0, 0.5, -0.25, 2.0])
    # the coefficient inf is no larger than the projection inf
    assert greedy_gap(dkk, g, 2) >= almost_greedy_gap(dkk, g, 2) * (1 - 1e-9)


def test_cond_params_unconditional_exact():
    for m in range(1, 7):
        res = cond_params(T, m)
        assert res.k == 1 and res.k_tilde == 1 and res.exact


def test_cond_params_hilbert():
    rot = BasisHandle(RotatedTrigSum(0.5, 10))
    prev = 0.0
    for m in (2, 4, 6):
        res = cond_params(rot, m)
        assert res.k_tilde <= res.k + 1e-12
        assert res.k_tilde >= 1 - 1e-12 and res.k_tilde >= prev - 1e-12
        prev = res.k_tilde
    # unweighted trig system is orthonormal, so every projection has norm one
    res = cond_params(BasisHandle(WeightedTrig(0.0, 8)), 6)
    assert res.k == pytest.approx(1.0)
    with pytest.raises(SizeError):
        cond_params(rot, 15)


def test_cond_params_witness_mode():
    dkk = BasisHandle(DKK(Tsirelson(), Lp(2), OrderedPartition.geometric()))
    res = cond_params(dkk, 7, mode="witness", rng=np.random.default_rng(0))
    assert res.k_tilde <= res.k and res.k_tilde >= 1 - 1e-12
    with pytest.raises(ValueError):
        cond_params(dkk, 3, mode="guess")


def test_regularity_examples():
    fit = regularity_fit([m**0.5 for m in range(1, 21)])
    assert fit.alpha == pytest.approx(0.5, abs=1e-6) and fit.beta == pytest.approx(0.5, abs=1e-6)
    assert fit.urp_ok and fit.lrp_ok
    lin = regularity_fit(list(range(1, 21)))
    assert lin.alpha == pytest.approx(1.0, abs=1e-9) and not lin.urp_ok
    with pytest.raises(ValueError):
        regularity_fit([1, 2, 3])
    with pytest.raises(ValueError):
        regularity_fit([1, 2, 3, 0, 5, 6, 7, 8])


def test_regularity_tsirelson_near_one():
    ff = fundamental_function(T, 10, window=20, cutoff=0, rng=np.random.default_rng(0))
    assert all(v >= Fraction(m, 2) for m, v in enumerate(ff.values, start=1))
    # phi(1) = phi(2) = 1 pulls the desk-scale slope below its asymptotic value 1
    assert 0.7 < regularity_fit(ff.values).slope <= 1


def test_report_round_trip():
    rep = GreedyReport("T", [1, 2], phi=[Fraction(1), Fraction(3, 2)], phi_exact=[True, True],
                       democracy=[1.0, 1.5], k_lower=[1, 1], k_tilde_lower=[1, 1])
    assert rep.check() == []
    lines = rep.to_csv().splitlines()
    assert lines[0].startswith("m,phi") and lines[2].startswith("2,3/2")
    assert json.loads(rep.to_json())["phi"] == ["1", "3/2"]
    bad = GreedyReport("T", [1, 2], phi=[2, 1], k_lower=[1], k_tilde_lower=[2])
    assert len(bad.check()) == 2
