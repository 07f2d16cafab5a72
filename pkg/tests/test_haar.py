import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsirelson_greedy.finvec import BlockIndex, FinVec
from tsirelson_greedy.haar import (DyadicInterval, GridOverflow, PiecewiseConstant, SpreadSpec, dhk_constants,
                                   equi_integrability_check, haar_block_space_norm, haar_function, haar_sum,
                                   intervals_of_levels, khintchine_range, level_intervals, lp_norm_pc,
                                   rademacher_block, random_equi_case, random_spread_spec, spread_equivalence_ratio,
                                   spread_levels)

intervals = st.integers(1, 7).flatmap(lambda n: st.builds(DyadicInterval, st.just(n), st.integers(0, (1 << (n - 1)) - 1)))


def test_dyadic_basics():
    I = DyadicInterval(3, 2)
    assert I.length == Fraction(1, 4) and I.left == Fraction(1, 2)
    assert len(level_intervals(5)) == 16
    assert DyadicInterval(2, 1).contains(I) and not I.contains(DyadicInterval(2, 1))
    with pytest.raises(ValueError):
        DyadicInterval(2, 2)
    assert [I.level for I in intervals_of_levels([3, 1])] == [1, 3, 3, 3, 3]


def test_haar_examples():
    h = haar_function(DyadicInterval(1, 0), 2)
    assert list(h.values) == [1, -1] and lp_norm_pc(h, 2) == pytest.approx(1.0)
    h = haar_function(DyadicInterval(2, 0), 1)
    assert list(h.values) == [2, -2, 0, 0]
    assert lp_norm_pc(h, 1) == 1 and isinstance(lp_norm_pc(h, 1), Fraction)


@given(intervals, st.sampled_from([0.5, 1, 1.5, 2, 3, 4]))
def test_haar_normalised_and_mean_zero(I, p):
    h = haar_function(I, p, grid=8)
    assert float(lp_norm_pc(h, p)) == pytest.approx(1.0, rel=1e-12)
    assert float(h.integral()) == pytest.approx(0.0, abs=1e-12)


@given(intervals, intervals)
def test_haar_orthogonality_exact(I, J):
    if I == J:
        return
    # p = 2 heights are irrational, so only p = 1 is exact
    assert haar_function(I, 2, 7).inner(haar_function(J, 2, 7)) == pytest.approx(0.0, abs=1e-12)
    a, b = haar_function(I, 1, 7), haar_function(J, 1, 7)
    assert a.exact and b.exact and a.inner(b) == 0


def test_lp_norm_examples():
    one = PiecewiseConstant.constant(Fraction(1))
    assert lp_norm_pc(one, 1) == 1 and lp_norm_pc(one, 3) == pytest.approx(1.0)
    f = PiecewiseConstant(1, np.array([Fraction(2), Fraction(0)], dtype=object))
    assert lp_norm_pc(f, 1) == 1
    assert lp_norm_pc(f, math.inf) == 2


def test_haar_sum_matches_loop():
    rng = np.random.default_rng(3)
    coeffs = {I: float(rng.standard_normal()) for I in intervals_of_levels([1, 2, 4])}
    direct = PiecewiseConstant.zeros(4)
    for I, c in coeffs.items():
        direct = direct + haar_function(I, 1.5, 4) * c
    assert np.allclose(haar_sum(coeffs, 1.5).values.astype(float), direct.values.astype(float))


def test_grid_budget():
    with pytest.raises(GridOverflow):
        PiecewiseConstant.zeros(21)
    with pytest.raises(GridOverflow):
        rademacher_block([21], 2)


def test_csv_export():
    text = haar_function(DyadicInterval(1, 0), 1).to_csv()
    assert text.splitlines() == ["cell,value", "0,1", "1,-1"]


def test_equi_examples():
    f = PiecewiseConstant(1, np.array([2.0, 0.0])).refine(6)
    mask = np.zeros(64, dtype=bool)
    mask[:4] = True  # measure 1/16 <= eps / 2 with eps = 0.125
    res = equi_integrability_check(f, mask, 0.125, 1)
    assert res.holds and res.mass_on_A <= 0.125
    with pytest.raises(ValueError):
        equi_integrability_check(f, np.ones(64, dtype=bool), 0.125, 1)
    rough = PiecewiseConstant(2, np.array([1.0, 0.0, 0.0, 0.0])).refine(6)
    with pytest.raises(ValueError):
        equi_integrability_check(rough, mask, 0.125, 1)


@pytest.mark.parametrize("eps", [0.04, 0.25, 0.64])
def test_key_estimate_random(eps):
    rng = np.random.default_rng(11)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        f, g, mask, grid = random_equi_case(rng, n, eps)
        assert equi_integrability_check(f, mask, eps, n, g, grid).holds


def test_dhk_constant_enclosures():
    c1, c2 = dhk_constants(0, 1)
    assert 0 < c1.lo <= c1.hi < 0.3
    assert c1.hi < 1 < c2.lo <= c2.hi
    prev = (0.0, math.inf)
    for u in (0, 2, 4, 8, 16, 40):
        c1, c2 = dhk_constants(u, 2)
        assert c1.lo >= prev[0] and c2.hi <= prev[1]
        prev = (c1.lo, c2.hi)
    assert prev[0] > 1 - 1e-5 and prev[1] < 1 + 1e-5
    # the enclosure is already tight at the default truncation
    c1, _ = dhk_constants(2, 3)
    assert c1.hi - c1.lo < 1e-8


def test_spread_levels():
    assert spread_levels(0) == (1, 4, 11)
    assert spread_levels(2) == (1, 6, 17)
    assert spread_levels(4) == (1, 8)
    with pytest.raises(ValueError):
        SpreadSpec((1, 3), (), 0, 2)


def test_spread_examples():
    spec = SpreadSpec((1, 4), (DyadicInterval(1, 0), DyadicInterval(4, 3)), 0, 2)
    assert spread_equivalence_ratio(spec, {DyadicInterval(4, 3): -3.0}) == pytest.approx(1.0)
    r = spread_equivalence_ratio(spec, {DyadicInterval(1, 0): 1.0, DyadicInterval(4, 3): 1.0})
    c1, c2 = dhk_constants(0, 2)
    assert c1.hi <= r <= c2.lo


@pytest.mark.parametrize("u", [0, 2, 4])
@pytest.mark.parametrize("p", [1, 2, 3])
def test_spread_bracket_sampled(u, p):
    rng = np.random.default_rng(100 * u + p)
    c1, c2 = dhk_constants(u, p)
    for _ in range(20):
        spec = random_spread_spec(rng, u, p)
        coeffs = {I: float(rng.standard_normal()) for I in spec.S}
        r = spread_equivalence_ratio(spec, coeffs)
        flipped = spread_equivalence_ratio(spec, {I: -c for I, c in coeffs.items()})
        assert c1.hi <= r <= c2.lo and flipped == pytest.approx(r)


def test_rademacher_blocks():
    (r1,) = rademacher_block([1], 3)
    assert np.array_equal(r1.values.astype(float), haar_function(DyadicInterval(1, 0), 3).values.astype(float))
    a, b = rademacher_block([1, 2], 2)
    assert a.inner(b) == pytest.approx(0.0)
    assert lp_norm_pc(a, 2) == pytest.approx(1.0) and lp_norm_pc(b, 2) == pytest.approx(1.0)
    for r in rademacher_block([1, 3, 5], 1.5):
        assert set(np.abs(r.values.astype(float))) == {1.0}


@pytest.mark.parametrize("p", [1.5, 4])
def test_khintchine_range_recorded(p):
    lo, hi = khintchine_range([1, 2, 3, 4, 5], p, 500, np.random.default_rng(0))
    # Khintchine: both constants are universal; record a generous bracket
    assert 0.5 < lo <= hi < 2.0


def test_block_space_norm():
    f = FinVec({BlockIndex(1, 1): -3})
    assert haar_block_space_norm([[1, 2]], 2, f) == pytest.approx(3.0)
    assert haar_block_space_norm([[1, 2]], 2, FinVec()) == 0
    with pytest.raises(IndexError):
        haar_block_space_norm([[1]], 2, FinVec({BlockIndex(1, 2): 1}))
