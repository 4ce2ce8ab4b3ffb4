from __future__ import annotations

import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toda_whittaker.connection import c_function
from toda_whittaker.core import bc_positive_roots, rho, toda_perturbations, toda_weights
from toda_whittaker.cs_confluence import (
    CouplingTriple,
    E_ell,
    confluence_error,
    coupling_schedule,
    cs_c_function,
    cs_coeff_U,
    cs_coeff_V,
    cs_dde_residual,
    cs_laplacian_residual,
    cs_phi_eval,
    cs_table,
    gamma_factor,
    normalization_delta,
    root_weight,
    scaled_c_function,
)
from toda_whittaker.dual_ops import SignedSubset
from toda_whittaker.errors import ConfluencePrecision
from toda_whittaker.hc_series import TruncationPlan, phi_eval

K_GENERIC = CouplingTriple(1.3, 0.8, 1.1)


def test_schedule_at_zero_shift():
    k = coupling_schedule(0.0, 0.7)
    assert k.k0 == pytest.approx((1 + math.sqrt(5)) / 2)
    assert k.k1 == pytest.approx(1.4)
    assert k.k2 == pytest.approx((1 + math.sqrt(1.25)) / 2)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 30), st.floats(0, 3))
def test_schedule_solves_its_equations(c, g):
    k0, k1, k2 = coupling_schedule(c, g)
    assert k0 * (k0 - 1) == pytest.approx(math.exp(c), rel=1e-12)
    assert k2 * (k2 - 1) == pytest.approx(math.exp(2 * c) / 16, rel=1e-12)
    assert k1 == 2 * g
    assert k0.real > 1 and k2.real > 1


def test_schedule_asymptotics():
    c = 20.0
    k0, _, k2 = coupling_schedule(c, 1.0)
    assert k0 / math.exp(c / 2) == pytest.approx(1.0, abs=1e-4)
    assert k2 / (math.exp(c) / 4) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_rescaled_weights_tend_to_toda_weights(n):
    c, g = 12.0, 0.7
    k = coupling_schedule(c, g)
    r = rho(n)
    simple = dict(zip(toda_perturbations(n), toda_weights(n, g)))
    for alpha in bc_positive_roots(n):
        w = complex(root_weight(alpha, k)) * math.exp(-c * int(np.dot(alpha, r)))
        assert abs(w - simple.get(tuple(alpha), 0)) < 1e-2


def test_root_weight_rejects_non_roots():
    with pytest.raises(ValueError):
        root_weight((1, 1, 1), K_GENERIC)


def rank_one_q_series(xi, k, M):
    """Rank-one CS coefficients from the q-expansion of the potential.

    1/(4 sinh^2(x/2)) = sum_j j q^j and 1/(4 sinh^2 x) = sum_j j q^{2j}
    with q = e^{-x}."""
    A1 = complex(root_weight((1,), k))
    A2 = complex(root_weight((2,), k))
    v = [0j] + [A1 * j + (A2 * (j // 2) if j % 2 == 0 else 0) for j in range(1, M + 1)]
    a = [1 + 0j]
    for m in range(1, M + 1):
        rhs = sum(v[j] * a[m - j] for j in range(1, m + 1))
        a.append(rhs / ((xi - m) ** 2 - xi**2))
    return a


@pytest.mark.parametrize("xi, k", [(0.3 + 0.2j, K_GENERIC), (-0.45j, coupling_schedule(1.5, 0.9))])
def test_rank_one_against_q_series(xi, k):
    M = 15
    ref = rank_one_q_series(xi, k, M)
    t = cs_table((xi,), k, M)
    for m in range(M + 1):
        assert abs(t[(m,)] - ref[m]) <= 1e-12 * max(1.0, abs(ref[m]))


def test_zero_potential_is_plane_wave():
    # k = (1, 0, 1) kills every weight
    k = CouplingTriple(1.0, 0.0, 1.0)
    t = cs_table((0.3 + 0.1j, 0.55), k, 8)
    assert np.allclose(np.asarray(t.coeffs[0, 1:t.index.size], dtype=complex), 0)
    val = cs_phi_eval((0.3 + 0.1j, 0.55), (2.0, 1.0), k).value
    assert val == pytest.approx(np.exp((0.3 + 0.1j) * 2 + 0.55), rel=1e-14)


def test_recurrence_defects():
    t = cs_table((0.3 + 0.1j, 0.55 - 0.2j), K_GENERIC, 12)
    assert t.recurrence_defects().max() < 1e-13


@pytest.mark.parametrize("whittaker", [False, True])
def test_cs_eigenvalue_equation(whittaker):
    r = cs_laplacian_residual((0.3 + 0.1j, 0.55 - 0.2j), (3.0, 1.5), K_GENERIC, TruncationPlan(M=30), whittaker=whittaker)
    assert r < 1e-6


@pytest.mark.parametrize("shift", [0.0, 3.0])
def test_cs_difference_equation(shift):
    xi, x = (0.3 + 0.1j, 0.55 - 0.2j), (2.5, 1.2)
    k = coupling_schedule(shift, 0.7) if shift else K_GENERIC
    cache = {}
    for ell in (1, 2):
        r = cs_dde_residual(ell, xi, x, k, TruncationPlan(M=30), shift=shift, cache=cache)
        assert r.residual < 1e-9


def test_cs_c_function_rank_one():
    xi, k = 0.3 + 0.2j, K_GENERIC
    k0, k1, k2 = k
    ref = mpmath.gamma(2 * xi) * mpmath.gamma(k1 / 2 + xi) / (mpmath.gamma(k1 + 2 * xi) * mpmath.gamma(k1 / 2 + k2 + xi))
    assert abs(cs_c_function((xi,), k).value - complex(ref)) <= 1e-13 * abs(complex(ref))


def test_gamma_factor_rank_one_direct():
    k = K_GENERIC
    k0, k1, k2 = k
    ref = mpmath.gamma(k1) * mpmath.gamma(k1 / 2 + k2) / (mpmath.gamma(k1 / 2) * mpmath.gamma(0.5 + k1 / 2))
    assert gamma_factor(k, 1).value == pytest.approx(complex(ref), rel=1e-13)
    two = gamma_factor(k, 2).value
    assert two == pytest.approx(complex(mpmath.gamma(k0) ** 2 * ref**2), rel=1e-13)


def test_gamma_factor_continuous_through_zero_coupling():
    at_zero = gamma_factor(CouplingTriple(1.3, 0.0, 1.1), 2).value
    near = gamma_factor(CouplingTriple(1.3, 1e-8, 1.1), 2).value
    assert near == pytest.approx(at_zero, rel=1e-7)
    assert at_zero == pytest.approx(complex(mpmath.gamma(1.3) ** 2 * (mpmath.gamma(1.1) / (2 * mpmath.sqrt(mpmath.pi))) ** 2), rel=1e-13)


def test_scaled_c_function_tends_to_toda_c():
    xi, g = (0.3 + 0.1j, 0.55 - 0.2j), 0.7
    target = c_function(xi, g).value
    errs = [abs(scaled_c_function(xi, g, c) - target) for c in (4, 6, 8, 10)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.01 * abs(target)


def test_E_ell_trivial_cases():
    x = (1.2, 0.4)
    s = [math.sinh(v / 2) ** 2 for v in x]
    assert E_ell(1, x) == pytest.approx(4 * sum(s))
    assert E_ell(2, x) == pytest.approx(16 * s[0] * s[1])
    assert E_ell(3, x) == 0


def test_E_ell_scaling_limit():
    n, c, x = 3, 14.0, (0.6, 0.3, 0.1)
    r = rho(n)
    for ell in range(1, n + 1):
        y = tuple(a + c * b for a, b in zip(x, r))
        scaled = E_ell(ell, y) * math.exp(-c / 2 * ell * (2 * n + 1 - ell))
        assert scaled == pytest.approx(math.exp(sum(x[:ell])), rel=1e-3)


def test_cs_coefficient_empty_products():
    xi = (0.3 + 0.1j, 0.55)
    assert cs_coeff_V(SignedSubset(()), xi, K_GENERIC) == 1
    assert cs_coeff_U((0, 1), 0, xi, K_GENERIC) == 1


def test_rank_one_coefficient_scaling():
    # exp(-c/2 |J| (2n + 1 - |J|)) V^cs tends to V at n = 1, and U likewise
    from toda_whittaker.dual_ops import coeff_U, coeff_V

    xi, g = (0.3 + 0.2j,), 0.8
    errs_V, errs_U = [], []
    for c in (6.0, 10.0):
        k = coupling_schedule(c, g)
        s = SignedSubset((0,), (1,))
        errs_V.append(abs(cs_coeff_V(s, xi, k) * math.exp(-c) - coeff_V(s, xi, g)))
        errs_U.append(abs(cs_coeff_U((0,), 1, xi, k) * math.exp(-c) - coeff_U((0,), 1, xi, g)))
    assert errs_V[0] / errs_V[1] >= 10
    assert errs_U[0] / errs_U[1] >= 10


@pytest.mark.parametrize("xi, x, g", [((0.3j,), (1.0,), 1.0), ((0.3 + 0.1j, 0.55 - 0.2j), (2.5, 1.2), 0.7)])
def test_confluence_decreases(xi, x, g):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConfluencePrecision)
        pts = confluence_error(xi, x, g, (4, 6, 8))
    for a, b in zip(pts, pts[1:]):
        assert b.err_phi < a.err_phi
        assert b.err_Phi < a.err_Phi


def test_translated_series_is_exp_weighted():
    xi, x, c = (0.3 + 0.1j, 0.55 - 0.2j), (2.5, 1.2), 2.0
    k = K_GENERIC
    plain = cs_phi_eval(xi, (x[0] + 2 * c, x[1] + c), k, TruncationPlan(M=30)).value
    shifted = cs_phi_eval(xi, x, k, TruncationPlan(M=30), shift=c).value
    assert shifted == pytest.approx(plain * np.exp(-c * (2 * xi[0] + xi[1])), rel=1e-12)


def test_confluence_precision_warning():
    with pytest.warns(ConfluencePrecision):
        confluence_error((0.3j,), (0.3,), 1.0, (10,), TruncationPlan(M=3))


def test_normalization_delta_cases():
    # only the hyperplane 2 z_1 = 1 (mu = e_1) meets the ball
    assert normalization_delta((0.5, 0.3), 0.1, (0.52, 0.3)) == pytest.approx(1 - 2 * 0.52)
    # a ball meeting no hyperplane
    assert normalization_delta((0.25 + 0.3j, 0.1 - 0.4j), 0.01, (0.25, 0.1)) == 1


def test_normalization_removes_pole():
    # Delta(xi) phi_xi stays bounded as xi crosses 2 xi_1 = 1
    center, x, g = (0.5, 0.3 + 0.2j), (3.0, 1.5), 0.7
    vals = []
    for d in (1e-4, 1e-6, 1e-8):
        xi = (0.5 + d, 0.3 + 0.2j)
        vals.append(normalization_delta(center, 0.05, xi) * phi_eval(xi, x, g, TruncationPlan(M=30)).value)
    assert abs(vals[1] - vals[2]) <= 1e-4 * abs(vals[2])
    assert abs(vals[0] - vals[2]) <= 1e-2 * abs(vals[2])
