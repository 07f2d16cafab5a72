import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from tsirelson_greedy.finvec import FinVec
from tsirelson_greedy.trig import (RotatedTrigSum, WeightedTrig, cosine_moments, dirichlet_growth, load_gram,
                                   rotated_components, rotated_norm, rotated_witness_ratios, rotation_matrix,
                                   trig_gram)


@pytest.mark.parametrize("lam", [-0.5, 0.0, 0.5, 0.9, -0.9])
def test_moments_against_algebraic_weight_quadrature(lam):
    mu = cosine_moments(lam, 12)
    for k in (0, 1, 5, 12):
        ref, _ = quad(lambda t: math.cos(k * t), 0, math.pi, weight="alg", wvar=(lam, 0))
        assert mu[k] == pytest.approx(ref, abs=1e-10)


def test_unweighted_gram_is_identity():
    assert np.abs(trig_gram(0.0, 101) - np.eye(101)).max() < 1e-9


def test_first_entry_closed_form():
    assert trig_gram(0.5, 3)[0, 0] == pytest.approx(2 / 3 * math.sqrt(math.pi), abs=1e-9)


@pytest.mark.parametrize("lam", [-0.5, 0.5])
def test_parity_zeros_and_symmetry(lam):
    G = trig_gram(lam, 21)
    kind = ["c"] + ["cos" if p % 2 == 0 else "sin" for p in range(2, 22)]
    for i in range(21):
        for j in range(21):
            if (kind[i] == "sin") != (kind[j] == "sin"):
                assert G[i, j] == 0
    assert np.array_equal(G, G.T)
    assert np.linalg.eigvalsh(G).min() > 0


def test_gram_is_read_only():
    G = trig_gram(0.3, 5)
    with pytest.raises(ValueError):
        G[0, 0] = 1.0


def test_disk_cache_round_trip(tmp_path):
    G = trig_gram(0.25, 9, cache_dir=tmp_path)
    assert sorted(p.suffix for p in tmp_path.iterdir()) == [".bin", ".json"]
    bin_file = next(tmp_path.glob("*.bin"))
    assert bin_file.stat().st_size == 9 * 9 * 8
    assert np.array_equal(load_gram(tmp_path, 0.25, 9, 1e-10), G)
    assert load_gram(tmp_path, 0.25, 9, 1e-8) is None
    assert np.array_equal(trig_gram(0.25, 9, cache_dir=tmp_path), G)


def test_rotation_examples():
    a = 0.5
    Ga, Gb = trig_gram(a, 1), trig_gram(-a, 1)
    assert rotated_norm(a, FinVec.unit(1)) == pytest.approx(math.sqrt((Ga[0, 0] + Gb[0, 0]) / 2))
    s = 1 / math.sqrt(2)
    u, v = rotated_components(FinVec({1: s, 2: s}), 2)
    assert u == pytest.approx([1.0]) and v == pytest.approx([0.0])
    assert rotated_norm(a, FinVec({1: s, 2: s})) == pytest.approx(math.sqrt(Ga[0, 0]))


def test_rotation_matrix_orthogonal():
    R = rotation_matrix(10)
    assert np.allclose(R.T @ R, np.eye(10))


@given(st.lists(st.floats(-3, 3), min_size=8, max_size=8))
def test_rotated_gram_matches_direct_norm(c):
    space = RotatedTrigSum(0.5, 8)
    f = FinVec.from_dense(c)
    x = np.array(c)
    assert space.norm(f) == pytest.approx(math.sqrt(max(x @ space.gram() @ x, 0.0)), rel=1e-9, abs=1e-12)


@given(st.lists(st.floats(-3, 3), min_size=9, max_size=9))
def test_flipping_sine_coefficients_preserves_norm(c):
    # t -> -t is an isometry of the even weight that negates the sine terms
    space = WeightedTrig(0.5, 9)
    flipped = [x if (i == 0 or (i + 1) % 2 == 0) else -x for i, x in enumerate(c)]
    assert space.norm(FinVec.from_dense(flipped)) == pytest.approx(space.norm(FinVec.from_dense(c)), rel=1e-9, abs=1e-12)


def test_parameter_validation():
    with pytest.raises(ValueError):
        WeightedTrig(1.0, 3)
    with pytest.raises(ValueError):
        RotatedTrigSum(0.0, 3)
    with pytest.raises(IndexError):
        WeightedTrig(0.0, 3).norm(FinVec.unit(4))


@pytest.mark.parametrize("lam", [-0.5, 0.0, 0.5])
def test_dirichlet_slopes(lam):
    slope, ms, norms = dirichlet_growth(lam, 200)
    assert abs(slope - (1 - lam) / 2) < 0.1
    if lam == 0.0:
        assert norms == pytest.approx(np.sqrt(2 * ms + 1), rel=1e-9)


def test_witness_ratios_grow():
    r = rotated_witness_ratios(0.5, [8, 16, 32])
    assert np.all(np.diff(r) > 0)
