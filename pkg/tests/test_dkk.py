from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsirelson_greedy.core_spaces import Lp, SpaceDomainError, Tsirelson
from tsirelson_greedy.dkk import (DKK, OrderedPartition, averaging_projection, biorthogonality_defect,
                                  build_ag_basis, check_ag_hypothesis, coefficient_vector, imp_estimate_check,
                                  lambda_fn, loglog_slope, partial_sum_ratios, v_functional, v_vector)
from tsirelson_greedy.finvec import FinVec
from tsirelson_greedy.trig import RotatedTrigSum

from conftest import rational_vectors

GEO = OrderedPartition((1, 2, 4, 8))


def test_partition_layout():
    assert [list(GEO.block(n)) for n in (1, 2, 3)] == [[1], [2, 3], [4, 5, 6, 7]]
    assert GEO.M(4) == 15
    assert [GEO.block_of(j) for j in (1, 2, 3, 4, 15)] == [1, 2, 2, 3, 4]
    with pytest.raises(SpaceDomainError):
        GEO.block_of(16)
    grow = OrderedPartition.geometric()
    assert grow.block_of(100) == 7 and grow.M(7) == 127
    with pytest.raises(ValueError):
        OrderedPartition((2, 0))


def test_lambda_examples():
    assert lambda_fn(Lp(1), 5) == 5
    assert lambda_fn(Lp(2), 4) == pytest.approx(2.0)
    assert lambda_fn(Lp(3), 1) == 1
    with pytest.raises(ValueError):
        lambda_fn(Tsirelson(), 3)


@given(rational_vectors(max_index=15))
def test_projection_algebra_exact(f):
    P, Q = averaging_projection(GEO, f)
    assert P + Q == f
    PP, QP = averaging_projection(GEO, P)
    assert PP == P and QP == FinVec()
    PQ, _ = averaging_projection(GEO, Q)
    assert PQ == FinVec()


def test_projection_examples():
    v1 = v_vector(GEO, Lp(1), 1)
    assert averaging_projection(GEO, v1) == (v1, FinVec())
    f = FinVec({2: 1, 3: -1, 4: 2, 5: -2})
    assert averaging_projection(GEO, f) == (FinVec(), f)


@pytest.mark.parametrize("S", [Lp(1), Lp(2), Lp(3)])
def test_biorthogonality(S):
    assert biorthogonality_defect(GEO, S, 4) < 1e-12
    if S.p == 1:
        assert biorthogonality_defect(GEO, S, 4) == 0


def test_dkk_norm_examples():
    space = DKK(Tsirelson(), Lp(1), GEO)
    assert space.norm(v_vector(GEO, Lp(1), 1)) == 1
    f = FinVec({4: 1, 5: -1, 6: 3, 7: -3})
    assert space.norm(f) == Lp(1).norm(f)
    rot = DKK(RotatedTrigSum(0.5, 4), Lp(2), GEO)
    assert rot.norm(v_vector(GEO, Lp(2), 2)) == pytest.approx(RotatedTrigSum(0.5, 4).norm(FinVec.unit(2)))


@given(rational_vectors(max_index=15), st.builds(Fraction, st.integers(-9, 9), st.integers(1, 5)))
def test_dkk_homogeneity_exact(f, c):
    space = DKK(Tsirelson(), Lp(1), GEO)
    assert space.norm(f * c) == abs(c) * space.norm(f)


@given(rational_vectors(max_index=15), rational_vectors(max_index=15))
def test_dkk_triangle(f, g):
    space = DKK(Tsirelson(), Lp(1), GEO)
    assert space.norm(f + g) <= space.norm(f) + space.norm(g)


def test_coefficient_vector_matches_functionals():
    f = FinVec.from_dense([1, 2, 3, 4, 5, 6, 7])
    coeffs = coefficient_vector(GEO, Lp(2), f)
    for n in (1, 2, 3):
        assert float(coeffs[n]) == pytest.approx(float(v_functional(GEO, Lp(2), f, n)))


def test_imp_estimate_examples():
    space = DKK(Tsirelson(), Lp(2), GEO)
    f = FinVec.from_dense([1.0, -2.0, 0.5, 3.0, 1.0, -1.0, 2.0])
    empty = imp_estimate_check(space, f, [])
    assert empty.holds and empty.lhs == 0
    P, _ = averaging_projection(GEO, f)
    full = imp_estimate_check(space, P, range(1, 16))
    assert full.holds and full.lhs == pytest.approx(0, abs=1e-12)
    with pytest.raises(ValueError):
        imp_estimate_check(space, f, [1], s=1.5)


def test_imp_estimate_random(rng):
    space = DKK(Tsirelson(), Lp(2), GEO)
    for _ in range(200):
        f = FinVec.from_dense(rng.standard_normal(15))
        A = [j for j in range(1, 16) if rng.random() < 0.5]
        assert imp_estimate_check(space, f, A, s=rng.choice([2.0, 3.0])).holds


def test_ag_hypothesis():
    check_ag_hypothesis(2, 0.5)
    check_ag_hypothesis(3, 0.7)
    with pytest.raises(ValueError):
        check_ag_hypothesis(3, 0.5)
    with pytest.raises(ValueError):
        build_ag_basis(2, 1.0, 2)


def test_build_ag_basis_small():
    ag = build_ag_basis(2, 0.5, 1)
    assert ag.dims == (1, 1) and ag.dimension == 2
    ag = build_ag_basis(2, 0.5, 3)
    assert ag.dims == (1, 1, 3, 2, 7, 3)
    assert ag.dkk_blocks() == [1, 3, 5]
    assert float(ag.basis.norm(FinVec.unit(1))) > 0
    with pytest.raises(ValueError):
        build_ag_basis(2, 0.5, 2, psi=lambda j: 2 * j)


def test_partial_sums_bounded(rng):
    ag = build_ag_basis(2, 0.5, 3)
    ratios = partial_sum_ratios(ag.basis, ag.dimension, 30, rng)
    ms = sorted(ratios)
    assert all(np.isfinite(list(ratios.values())))
    assert loglog_slope(ms, [ratios[m] for m in ms]) < 0.2
