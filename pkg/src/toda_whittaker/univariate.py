"""Independent rank-one reference functions.

Kummer's series, the Whittaker-type pair

    phi_xi(x; g) = exp(xi x) exp(-e^{-x}/2) 1F1(1/2 + g - xi, 1 - 2 xi; e^{-x}),
    Phi_xi(x; g) = G(xi) phi_xi + G(-xi) phi_{-xi},  G(xi) = Gamma(2 xi)/Gamma(1/2 + g + xi),

and Macdonald's function K_nu by double-exponential quadrature.  Nothing
here touches the multivariate series code, so every comparison against it
is a comparison between two separate code paths.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .errors import ParameterPole, QuadratureNotConverged

ETA = 1e-9


def _dist_nonpositive_int(z: complex) -> float:
    z = complex(z)
    k = min(round(z.real), 0)
    return abs(z - k)


@dataclass(frozen=True)
class KummerParams:
    a: complex
    b: complex
    z: complex

    def __post_init__(self):
        for name in ("a", "b", "z"):
            object.__setattr__(self, name, complex(getattr(self, name)))


def kummer_1f1(p: KummerParams, *, eta: float = ETA, max_terms: int = 100000) -> complex:
    """sum_k (a)_k / (b)_k z^k / k! with Neumaier-compensated partial sums.

    Stops once three consecutive terms are below one ulp of the running
    sum (after the terms have started to decrease)."""
    a, b, z = p.a, p.b, p.z
    if _dist_nonpositive_int(b) <= eta:
        raise ParameterPole(f"1F1 lower parameter b = {b} is at a nonpositive integer")
    total, comp = 1 + 0j, 0j
    term = 1 + 0j
    quiet = 0
    for k in range(max_terms):
        term *= (a + k) / (b + k) * z / (k + 1)
        t = total + term
        # Neumaier: compensate whichever operand lost bits
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        small = abs(term) <= 2.2e-16 * abs(total + comp)
        quiet = quiet + 1 if small and abs(a + k + 1) * abs(z) < abs(b + k + 1) * (k + 2) else 0
        if quiet >= 3 or term == 0:
            return complex(total + comp)
    raise RuntimeError("1F1 series did not converge")


def whittaker_M_phi(xi, x, g, *, eta: float = ETA) -> complex:
    xi, x, g = complex(xi), complex(x), complex(g)
    if abs(2 * xi - round((2 * xi).real)) <= eta and round((2 * xi).real) > 0:
        raise ParameterPole(f"2 xi = {2 * xi} is a positive integer")
    z = cmath.exp(-x)
    f = kummer_1f1(KummerParams(0.5 + g - xi, 1 - 2 * xi, z), eta=eta)
    return complex(cmath.exp(xi * x - z / 2) * f)


def _log_ratio(xi, g):
    """log Gamma(2 xi) - log Gamma(1/2 + g + xi), zero factor flagged by None."""
    den = 0.5 + g + xi
    if _dist_nonpositive_int(den) == 0.0 and den.imag == 0:
        return None
    return complex(loggamma(2 * xi) - loggamma(den))


def whittaker_W_Phi(xi, x, g, *, eta: float = ETA) -> complex:
    """Two-term connection sum; symmetric under xi -> -xi."""
    xi, x, g = complex(xi), complex(x), complex(g)
    r = round((2 * xi).real)
    if abs(2 * xi - r) <= eta:
        raise ParameterPole(f"2 xi = {2 * xi} is an integer")
    total = 0j
    for s in (xi, -xi):
        lr = _log_ratio(s, g)
        if lr is not None:
            total += cmath.exp(lr) * whittaker_M_phi(s, x, g, eta=eta)
    return total


# ---------------------------------------------------------------------------
# K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt
# ---------------------------------------------------------------------------


def _log_envelope(t, nu, z):
    # upper bound for log |exp(-z cosh t) cosh(nu t)|
    return -z.real * np.cosh(t) + abs(nu.real) * t + np.log1p(np.exp(-2 * abs(nu.real) * t))


def _cutoff(nu: complex, z: complex, drop: float = 1e-20) -> float:
    """Smallest grid t past the peak where the integrand envelope is below
    drop * peak."""
    t = np.linspace(0.0, 1.0, 201)
    while True:
        env = _log_envelope(t, nu, z)
        peak = env.max()
        past = np.nonzero((env < peak + math.log(drop)) & (t > t[np.argmax(env)]))[0]
        if past.size:
            return float(t[past[0]])
        if t[-1] > 1e4:
            raise QuadratureNotConverged(f"integrand for K_{nu}({z}) does not decay")
        t = np.linspace(0.0, 2 * t[-1], 401)


def _tanh_sinh(f, T, tol, max_level=12):
    """int_0^T f by the map t = T / (1 + exp(-pi sinh s)), halving the step."""

    def nodes(h, offset):
        k = np.arange(offset, int(math.ceil(4.5 / h)) + 1, 1 if offset == 0 else 2)
        s = np.concatenate([-k[::-1] * h, k[k > 0] * h]) if offset == 0 else np.concatenate([-k[::-1] * h, k * h])
        e = np.exp(-math.pi * np.sinh(s))
        t = T / (1 + e)
        w = T * math.pi * np.cosh(s) * e / (1 + e) ** 2
        keep = np.isfinite(w) & (w > 0)
        return t[keep], w[keep]

    h = 0.5
    t, w = nodes(h, 0)
    total = np.sum(w * f(t))
    estimate = h * total
    for _ in range(max_level):
        h /= 2
        t, w = nodes(h, 1)
        total = total + np.sum(w * f(t))
        new = h * total
        if abs(new - estimate) <= tol * abs(new):
            return complex(new), abs(new - estimate)
        estimate = new
    raise QuadratureNotConverged(f"tanh-sinh stalled at step {h:g}: last change {abs(new - estimate):.3g}")


def bessel_K_quad(nu, z, *, tol: float = 1e-13) -> complex:
    nu, z = complex(nu), complex(z)
    if z.real <= 0:
        raise ValueError("bessel_K_quad needs Re z > 0")
    T = _cutoff(nu, z)
    value, _ = _tanh_sinh(lambda t: np.exp(-z * np.cosh(t)) * np.cosh(nu * t), T, tol)
    return value


def univariate_dde_residual(xi, x, g, *, eta: float = ETA) -> float:
    """Relative defect of the three-term difference equation in xi."""
    xi, x, g = complex(xi), complex(x), complex(g)
    for name, v in (("2 xi", 2 * xi), ("2 xi + 1", 2 * xi + 1), ("2 xi - 1", 2 * xi - 1)):
        if abs(v) <= eta:
            raise ParameterPole(f"{name} vanishes")
    P0 = whittaker_W_Phi(xi, x, g, eta=eta)
    Pp = whittaker_W_Phi(xi + 1, x, g, eta=eta)
    Pm = whittaker_W_Phi(xi - 1, x, g, eta=eta)
    lhs = (0.5 + g + xi) / (2 * xi * (2 * xi + 1)) * (Pp - P0) + (0.5 + g - xi) / (2 * xi * (2 * xi - 1)) * (Pm - P0)
    rhs = cmath.exp(x) * P0
    return abs(lhs - rhs) / abs(rhs)


def bessel_recurrence_residual(xi, x) -> float:
    """|(Phi_{xi+1} - Phi_{xi-1}) / (4 xi) - e^x Phi_xi| / |e^x Phi_xi| at g = 0."""
    xi, x = complex(xi), complex(x)
    P0 = whittaker_W_Phi(xi, x, 0)
    rhs = cmath.exp(x) * P0
    lhs = (whittaker_W_Phi(xi + 1, x, 0) - whittaker_W_Phi(xi - 1, x, 0)) / (4 * xi)
    return abs(lhs - rhs) / abs(rhs)
