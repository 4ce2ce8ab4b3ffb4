from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import pytest

from toda_whittaker.connection import c_function, plane_wave_limit, whittaker_eval, whittaker_laplacian_residual
from toda_whittaker.core import group_enumerate
from toda_whittaker.errors import CFunctionPole
from toda_whittaker.hc_series import TruncationPlan

# Lanczos coefficients (g = 7, nine terms), used as an oracle independent of
# scipy and mpmath.
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def lanczos_gamma(z: complex) -> complex:
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * lanczos_gamma(1 - z))
    z -= 1
    acc = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        acc += c / (z + i)
    t = z + 7.5
    return math.sqrt(2 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * acc


def c_by_lanczos(xi, g):
    out = 1
    for j, a in enumerate(xi):
        out *= lanczos_gamma(2 * a) / lanczos_gamma(0.5 + g + a)
        for b in xi[j + 1:]:
            out *= lanczos_gamma(a + b) * lanczos_gamma(a - b)
    return out


@pytest.mark.parametrize(
    "xi, g",
    [((0.3j,), 0.7), ((0.3 + 0.1j, 0.55 - 0.2j), 0.7), ((0.2j, 0.5j, 0.9j), 1.3), ((-0.4 + 0.2j, 0.15), 0.0)],
)
def test_c_function_against_lanczos(xi, g):
    ref = c_by_lanczos(xi, g)
    assert abs(c_function(xi, g).value - ref) <= 1e-12 * abs(ref)


def test_c_function_extended_precision():
    xi, g = (0.3 + 0.1j, 0.55 - 0.2j), 0.7
    with mpmath.workdps(40):
        # promote before any arithmetic so the oracle is not rounded to double
        xi, g = tuple(mpmath.mpc(z) for z in xi), mpmath.mpf(g)
        ref = mpmath.gamma(2 * xi[0]) * mpmath.gamma(2 * xi[1]) * mpmath.gamma(xi[0] + xi[1]) * mpmath.gamma(xi[0] - xi[1])
        ref /= mpmath.gamma(0.5 + g + xi[0]) * mpmath.gamma(0.5 + g + xi[1])
        val = c_function(xi, g, prec=130).value
        assert abs(val - ref) < mpmath.mpf(10) ** -35 * abs(ref)


def test_c_function_pole_and_zero():
    with pytest.raises(CFunctionPole):
        c_function((0.0, 0.3), 0.7)
    with pytest.raises(CFunctionPole):
        c_function((0.3, 0.3), 0.7)
    # 1/Gamma(1/2 + g + xi) vanishes at 1/2 + g + xi = 0
    cv = c_function((-0.7,), 0.2)
    assert cv.is_zero and cv.value == 0
    assert not c_function((0.3j,), 0.2).is_zero


def test_pole_on_orbit_reports_group_element():
    with pytest.raises(CFunctionPole) as err:
        whittaker_eval((0.3, 0.3 + 1e-15), (2.0, 1.0), 0.7)
    assert err.value.w is not None


@pytest.mark.parametrize("xi, x, g", [(0.3j, 1.0, 0.7), (0.25 + 0.1j, 0.4, 1.5), (0.8j, 2.5, 0.0), (0.15, 1.7, 2.0)])
def test_rank_one_matches_mpmath_whittaker_w(xi, x, g):
    ref = complex(mpmath.exp(x / 2) * mpmath.whitw(-g, xi, mpmath.exp(-x)))
    val = whittaker_eval((xi,), (x,), g, TruncationPlan(M=40)).value
    assert abs(val - ref) <= 1e-11 * abs(ref)


@pytest.mark.parametrize("xi, x", [(0.3j, 1.0), (0.7j, 2.0), (0.2 + 0.1j, 0.5)])
def test_zero_boundary_coupling_is_bessel_k(xi, x):
    ref = complex(mpmath.besselk(xi, mpmath.exp(-x) / 2) / mpmath.sqrt(mpmath.pi))
    val = whittaker_eval((xi,), (x,), 0.0, TruncationPlan(M=40)).value
    assert abs(val - ref) <= 1e-12 * abs(ref)


def test_invariance_under_signed_permutations():
    xi, x, g = np.array([0.3 + 0.1j, 0.55 - 0.2j]), (2.5, 1.2), 0.7
    base = whittaker_eval(tuple(xi), x, g, TruncationPlan(M=30)).value
    for w in group_enumerate(2):
        other = whittaker_eval(tuple(w(xi)), x, g, TruncationPlan(M=30)).value
        assert abs(other - base) <= 1e-12 * abs(base)


def test_real_on_imaginary_axis():
    val = whittaker_eval((0.3j, 0.7j), (2.0, 1.0), 0.9).value
    assert abs(val.imag) <= 1e-12 * abs(val)


def test_plane_wave_limit_far_out():
    xi, g = (0.3j, 0.7j), 0.9
    x = (30.0, 15.0)
    val = whittaker_eval(xi, x, g).value
    assert abs(val - plane_wave_limit(xi, x, g)) < 1e-6


@pytest.mark.parametrize("n", [1, 2, 3])
def test_eigenvalue_equation(n):
    rng = np.random.default_rng(10 + n)
    xi = tuple(rng.uniform(0.1, 0.9, n) + 1j * rng.uniform(-0.3, 0.3, n))
    x = tuple(1.0 + 1.5 * np.arange(n)[::-1])
    assert whittaker_laplacian_residual(xi, x, 0.8, TruncationPlan(M=30)) < 1e-9


def test_condition_reported():
    ev = whittaker_eval((0.3 + 0.1j, 0.55 - 0.2j), (2.5, 1.2), 0.7)
    assert ev.condition >= 1.0
    assert ev.tail_bound >= 0
