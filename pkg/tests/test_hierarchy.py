from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsirelson_greedy.hierarchy import (FGH, Alpha, Beta, Const, ContinuumMember, ContinuumSpec, CumulativeSum,
                                        Explicit, HierarchyOverflow, Identity, Lambda, continuum_phi,
                                        dominance_check, fgh_eval, first_disagreement, iterate_fn, levels_A,
                                        nu, triadic_partial_sum, triadic_rank)


@pytest.mark.parametrize("n, j, value", [(0, 7, 8), (1, 5, 10), (2, 3, 24), (3, 1, 2), (3, 2, 2048)])
def test_fgh_examples(n, j, value):
    assert fgh_eval(n, j) == value


def test_fgh_closed_forms():
    for j in range(1, 21):
        assert fgh_eval(1, j) == 2 * j
        assert fgh_eval(2, j) == j * 2**j


def test_fgh_overflow_carries_location():
    with pytest.raises(HierarchyOverflow) as info:
        fgh_eval(3, 3)
    assert info.value.n == 3
    with pytest.raises(HierarchyOverflow):
        fgh_eval(2, 100, digits=10)


@given(st.integers(0, 30), st.integers(1, 30))
def test_iterate_examples(k, j):
    assert iterate_fn(FGH(0), k, j) == j + k
    assert iterate_fn(FGH(1), k, j) == j * 2**k
    assert iterate_fn(Lambda(lambda x: x * x + 1, "sq"), 0, j) == j


def test_iterate_rejects_negative():
    with pytest.raises(ValueError):
        iterate_fn(Identity(), -1, 3)


def test_one_increasing_and_value_at_one():
    for n in range(0, 5):
        vals = []
        for j in range(1, 13):
            try:
                vals.append(fgh_eval(n, j))
            except HierarchyOverflow:
                break
        assert all(a < b for a, b in zip(vals, vals[1:]))
        if n >= 1:
            assert vals[0] == 2


def _level_values(j, nmax=4):
    out = []
    for n in range(nmax + 1):
        try:
            out.append(fgh_eval(n, j))
        except HierarchyOverflow:
            out.append(None)
    return out


def test_monotone_in_level():
    for j in range(1, 13):
        vals = _level_values(j)
        known = [v for v in vals if v is not None]
        # overflow can only start at some level and persist above it
        assert vals[:len(known)] == known
        assert all(a <= b for a, b in zip(known, known[1:]))


@pytest.mark.parametrize("k", [2, 3, 5])
def test_zero_lemma_samples(k):
    # increasing f with f(1) >= k
    fns = [Lambda(lambda x, k=k: x + k - 1, "shift"), Lambda(lambda x, k=k: k * x, "scale"),
           Lambda(lambda x, k=k: x * x + k, "quad")]
    for f in fns:
        for j in range(1, 11):
            for n in range(0, 7):
                for m in range(0, n + 1):
                    try:
                        lhs = iterate_fn(f, n, j)
                    except OverflowError:
                        continue
                    assert lhs >= (k - 1) * (n - m) + iterate_fn(f, m, j)


def test_dominance_examples():
    # F_2(2) = 8 already exceeds F_1(2) = 4
    assert dominance_check(FGH(2), 1, 1, 10).first_violation == 2
    assert dominance_check(Identity(), 0, 1, 100)
    res = dominance_check(Lambda(lambda j: 3 ** (j + 1), "3^(j+1)"), 2, 6, 30)
    # the claimed certificate fails: 3^7 = 2187 > 6 * 2^6 = 384
    assert not res and res.first_violation == 6
    # 3^(j+1) / (j 2^j) = 3 (3/2)^j / j grows, so no later start helps either
    assert dominance_check(Lambda(lambda j: 3 ** (j + 1), "3^(j+1)"), 2, 10, 30).first_violation == 10
    assert dominance_check(Lambda(lambda j: 3 ** (j + 1), "3^(j+1)"), 3, 2, 2)


def test_growth_combinators():
    assert (FGH(1) @ FGH(0))(3) == 8
    assert (Identity() + Const(2))(5) == 7
    assert (Identity() * Identity())(6) == 36
    assert CumulativeSum(Identity())(4) == 10
    assert Explicit((1, 4, 9))(3) == 9
    with pytest.raises(IndexError):
        Explicit((1, 4))(3)
    assert FGH(1).is_increasing(20)


def test_alpha_beta():
    assert [Alpha()(k) for k in range(1, 5)] == [1, 4, 12, 30]
    assert Beta()(7) == 49
    for k in range(1, 41):
        assert Alpha()(k + 1) >= Alpha()(k) + k + 2


def test_continuum_examples():
    ones = ContinuumSpec((1,) * 5)
    assert continuum_phi(ones, 1) == 5
    assert continuum_phi(ones, 2) == 17
    assert continuum_phi(ContinuumSpec((2,)), 1) == 7
    assert triadic_partial_sum(ones, 2) == Fraction(4, 9)
    with pytest.raises(ValueError):
        continuum_phi(ones, 6)
    with pytest.raises(ValueError):
        ContinuumSpec((0, 1))


def test_triadic_helpers():
    assert triadic_rank(Fraction(5, 27)) == 3
    assert nu(Fraction(1, 3)) == 5
    with pytest.raises(ValueError):
        triadic_rank(Fraction(1, 2))


@given(st.lists(st.sampled_from([1, 2]), min_size=12, max_size=12))
def test_continuum_bound_and_increasing(eps):
    member = ContinuumMember(ContinuumSpec(eps))
    vals = member.values(12)
    assert all(v <= 3 ** (j + 1) for j, v in enumerate(vals, start=1))
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_continuum_near_disjointness():
    rng = np.random.default_rng(7)
    for _ in range(30):
        a, b = (tuple(int(x) for x in rng.integers(1, 3, 12)) for _ in range(2))
        d = first_disagreement(a, b)
        if d is None:
            continue
        va = ContinuumMember(ContinuumSpec(a)).values(12)
        vb = ContinuumMember(ContinuumSpec(b)).values(12)
        shared = set(va) & set(vb)
        assert all(va.index(v) + 1 < d for v in shared)


def test_levels_A():
    assert levels_A(Identity(), 1) == [1]
    assert levels_A(Identity(), 2) == [4, 12, 30]
    assert len(levels_A(FGH(1), 3)) == 5
    with pytest.raises(ValueError):
        levels_A(Const(3), 2)
