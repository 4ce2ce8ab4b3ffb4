from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toda_whittaker.core import (
    ConeVector,
    PositionPoint,
    SignedPermutation,
    SpectralPoint,
    check_chamber,
    classify_spectral,
    cone_enumerate,
    cone_index,
    decompose_in_S,
    group_enumerate,
    group_matrices,
    is_dominant,
    level_of,
    orbit,
    regular_margin,
    rho,
    root_data,
    toda_perturbations,
)
from toda_whittaker.errors import ChamberViolation


def brute_force_cone(n, m):
    """Integer vectors with nonnegative partial sums and <nu, rho> = m, by box search."""
    r = rho(n)
    out = []
    for nu in itertools.product(range(-m, m + 1), repeat=n):
        partial = np.cumsum(nu)
        if np.all(partial >= 0) and int(np.dot(nu, r)) == m:
            out.append(tuple(nu))
    return sorted(out)


def test_rho():
    assert tuple(rho(3)) == (3, 2, 1)
    assert tuple(rho(1)) == (1,)


@pytest.mark.parametrize("n, m", [(1, 5), (2, 6), (3, 5), (4, 3)])
def test_cone_matches_box_search(n, m):
    got = sorted(tuple(v) for v in cone_enumerate(n, m)[m])
    assert got == brute_force_cone(n, m)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_level_counts_binomial(n):
    levels = cone_enumerate(n, 12)
    assert [len(levels[m]) for m in range(13)] == [math.comb(n + m - 1, m) for m in range(13)]


def test_cone_index_lookup_and_shift():
    idx = cone_index(2, 6)
    for i, nu in enumerate(idx.nus):
        assert idx.index(nu) == i
        assert idx.levels[i] == level_of(nu)
    shifted = idx.shifted((0, 1))
    for i, nu in enumerate(idx.nus):
        pred = (int(nu[0]), int(nu[1]) - 1)
        expected = idx.lookup.get(pred, idx.size)
        assert shifted[i] == expected
    assert idx.index((5, -9)) == idx.size


def test_cone_vector_validation():
    assert ConeVector((1, -1, 2)).level == 3 * 1 + 2 * (-1) + 1 * 2
    with pytest.raises(ValueError):
        ConeVector((0, -1))
    assert is_dominant((2, -1, -1))
    assert not is_dominant((1, -2, 1))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.integers(0, 4), min_size=n, max_size=n)))
def test_decomposition_reconstructs(partial):
    # random partial sums >= 0 give a random cone vector
    nu = tuple(np.diff([0] + partial).tolist())
    k = decompose_in_S(nu)
    assert k is not None and all(v >= 0 for v in k)
    S = np.array(toda_perturbations(len(nu)))
    assert tuple(np.asarray(k) @ S) == nu


@pytest.mark.parametrize("n, m", [(2, 4), (3, 3)])
def test_decomposition_agrees_with_integer_search(n, m):
    S = np.array(toda_perturbations(n))
    for nu in brute_force_cone(n, m):
        # search all nonnegative combinations with bounded entries
        found = [
            k for k in itertools.product(range(m + 1), repeat=len(S))
            if tuple(np.asarray(k) @ S) == nu
        ]
        assert found, nu
        k = decompose_in_S(nu)
        assert k in found
    assert decompose_in_S((0, -1)) is None


def test_group_size_and_identity():
    for n in range(1, 5):
        G = group_enumerate(n)
        assert len(G) == 2**n * math.factorial(n)
        assert len(set(G)) == len(G)
        assert G[0] == SignedPermutation.identity(n)


signed_perm = st.integers(1, 4).flatmap(
    lambda n: st.tuples(st.permutations(list(range(n))), st.lists(st.sampled_from((1, -1)), min_size=n, max_size=n))
)


@settings(max_examples=60, deadline=None)
@given(signed_perm, st.data())
def test_composition_and_inverse(wp, data):
    sigma, eps = wp
    n = len(sigma)
    w = SignedPermutation(tuple(sigma), tuple(eps))
    v = data.draw(st.sampled_from(group_enumerate(n)))
    xi = np.arange(1, n + 1) + 0.1j * np.arange(n)
    np.testing.assert_allclose((w @ v)(xi), w(v(xi)))
    np.testing.assert_allclose(w.inverse()(w(xi)), xi)
    np.testing.assert_allclose(w.matrix() @ xi, w(xi))


def test_orbit_and_matrices():
    xi = (0.3 + 0.1j, 0.7)
    O = orbit(xi)
    assert O.shape == (8, 2)
    np.testing.assert_allclose(O[0], xi)
    # every orbit point is a signed permutation of the entries
    for p in O:
        assert sorted(np.abs(p)) == sorted(np.abs(xi))
    assert group_matrices(2).shape == (8, 2, 2)


def test_spectral_and_position_points():
    xi = SpectralPoint.of((0.3, 0.2j))
    assert xi.n == 2 and (xi + (1, 0)).entries == (1.3, 0.2j)
    with pytest.raises(ChamberViolation):
        PositionPoint.of((1.0, 2.0), chamber=True)
    with pytest.raises(ChamberViolation):
        check_chamber((1.0, -0.5))
    check_chamber((2.0, 1.0))


def test_regularity_classification():
    assert regular_margin((0.25, 0.1)) == pytest.approx(0.15)
    reg = classify_spectral((0.5, 0.2))
    assert not reg.regular_plus and reg.regular_minus
    reg = classify_spectral((-0.5, 0.2))
    assert reg.regular_plus and not reg.regular_minus
    assert classify_spectral((0.3 + 0.1j, 0.55)).regular


def test_root_data():
    rd = root_data(3, g=0.7)
    assert rd.S == ((1, -1, 0), (0, 1, -1), (0, 0, 1), (0, 0, 2))
    assert rd.weight((0, 0, 1)) == 0.7
    assert rd.weight((0, 0, 2)) == 0.25
    assert rd.weight((1, -1, 0)) == 2
    assert len(rd.positive_roots) == 3**2 + 3
