"""Harish-Chandra series of the Toda Laplacian with Morse boundary term.

The fundamental Whittaker function is

    phi_xi(x; g) = sum_{nu >= 0} a_nu(xi; g) exp(<xi - nu, x>),

with a_0 = 1 and, for nu > 0,

    <nu - 2 xi, nu> a_nu = sum_{alpha in S} w_alpha a_{nu - alpha},

where S = {e_1 - e_2, ..., e_{n-1} - e_n, e_n, 2 e_n} carries the weights
(2, ..., 2, g, 1/4).  Coefficients are built level by level on the cone
(every alpha in S has positive level, so each level only reads lower ones).

Couplings follow the (g, b = 1/8) normalization: the Hamiltonian
H = -L/2 has boundary couplings a = g/2 and b = 1/8.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._arith import get_arith
from .core import (
    DEFAULT_ETA,
    ConeIndex,
    PositionPoint,
    SpectralPoint,
    cone_index,
    level_of,
    rho,
    toda_perturbations,
    toda_weights,
)
from .errors import NearSingularSpectral, TailNotConverged

# b in the Hamiltonian a e^{-x_n} + b e^{-2 x_n}
MORSE_B = 1 / 8


def hamiltonian_couplings(g) -> tuple:
    """(a, b) of the Hamiltonian for the library coupling g."""
    return g / 2, MORSE_B


def g_from_hamiltonian(a, b=MORSE_B):
    """Library coupling for Hamiltonian couplings (a, b), b != 0.

    A centre-of-mass translation x -> x + t rescales (a, b) to
    (a e^{-t}, b e^{-2t}); choosing e^{-2t} = 1 / (8 b) sets b to 1/8.
    The square root branch is the principal one.
    """
    scale = (1 / (8 * b)) ** 0.5
    return 2 * a * scale


class Evaluation(NamedTuple):
    value: complex
    tail_bound: float
    condition: float


@dataclass(frozen=True)
class TruncationPlan:
    """Truncation and precision policy for series evaluations.

    ``tol`` is the absolute tail bound that must be met; ``None`` only
    reports the bound.  ``prec`` is the working precision in bits (53 is
    double).  ``fallback_prec`` is used to recompute group sums whose
    cancellation exceeds ``tol``.
    """

    M: int = 30
    tol: float | None = None
    eta: float = DEFAULT_ETA
    prec: int = 53
    fallback_prec: int | None = None

    def __post_init__(self):
        if self.M < 0:
            raise ValueError("M must be nonnegative")
        if self.tol is not None and self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.eta <= 0:
            raise ValueError("eta must be positive")

    def arith(self):
        return get_arith(self.prec)

    def replace(self, **changes) -> "TruncationPlan":
        return dataclasses.replace(self, **changes)


# ---------------------------------------------------------------------------
# tail bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailConstants:
    """Constants of the coefficient growth estimate |a_nu| <= A^m / m!.

    a: lower bound of |<nu - 2 xi, nu>| / <nu, rho>^2 over nu > 0,
    b: base with |exp(-<nu, x>)| <= b^<nu, rho>,
    c: bound on the perturbation weights.
    """

    n: int
    a: float
    b: float
    c: float

    @property
    def A(self) -> float:
        return 1 + self.c * self.n / self.a

    @property
    def C(self) -> float:
        return self.b * self.A

    def induction_holds(self) -> bool:
        A = self.A
        return A * A > (self.c / self.a) * (1 + self.n * A)

    def coefficient_bound(self, m: int) -> float:
        return math.exp(m * math.log(self.A) - math.lgamma(m + 1))

    def tail(self, M: int, tol: float | None = None) -> float:
        """sum_{m > M} binom(n+m-1, m) C^m / m!.

        Summation stops once the terms decrease and fall below 1e-3 tol
        (or below 1e-17 of the running sum without tol); the remainder is
        then bounded by a geometric series.
        """
        n, C = self.n, self.C
        if C == 0:
            return 0.0
        logC = math.log(C)

        def log_term(m):
            return math.lgamma(n + m) - math.lgamma(n) - 2 * math.lgamma(m + 1) + m * logC

        log_total = -math.inf
        m = M + 1
        for _ in range(100000):
            lt = log_term(m)
            log_total = np.logaddexp(log_total, lt)
            ratio = C * (n + m) / ((m + 1) ** 2)
            if ratio < 0.5:
                log_threshold = math.log(1e-3 * tol) if tol is not None else log_total + math.log(1e-17)
                if lt < log_threshold:
                    log_total = np.logaddexp(log_total, lt + math.log(ratio / (1 - ratio)))
                    return math.inf if log_total > 709 else math.exp(log_total)
            m += 1
        return math.inf


def _lower_bound_a(xi: np.ndarray, M: int, eta: float) -> float:
    n = len(xi)
    rho_norm = math.sqrt(float(np.sum(rho(n) ** 2)))
    xi_norm = float(np.sqrt(np.sum(np.abs(xi) ** 2)))
    Mp = max(M + 20, math.ceil(4 * xi_norm * rho_norm))
    Mp = min(Mp, 160 if n <= 2 else 90)
    index = cone_index(n, Mp)
    nus = index.nus[1:]
    lev = index.levels[1:].astype(float)
    d = index.norms()[1:] - 2 * (nus @ xi)
    a_emp = float(np.min(np.abs(d) / lev**2))
    a_far = (1 - 2 * xi_norm * rho_norm / Mp) / rho_norm**2
    a = a_emp if a_far <= 0 else min(a_emp, a_far)
    return max(a, eta)


def tail_constants(xi, x, g, M: int, eta: float = DEFAULT_ETA) -> TailConstants:
    xi = np.asarray(tuple(complex(z) for z in xi))
    x = np.asarray(tuple(complex(z) for z in x))
    n = len(xi)
    S = toda_perturbations(n)
    r = rho(n)
    b = max(abs(np.exp(-np.dot(alpha, x))) ** (1 / np.dot(alpha, r)) for alpha in S)
    c = max(abs(complex(w)) for w in toda_weights(n, g))
    return TailConstants(n, _lower_bound_a(xi, M, eta), float(b), c)


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------


def _denominators(xis, index: ConeIndex):
    """<nu, nu> - 2 <xi, nu> for a batch of spectral points, shape (B, N)."""
    return index.norms()[None, :] - 2 * (xis @ index.nus.T)


def _check_denominators(d, index: ConeIndex, eta: float, xis=None):
    mags = np.abs(np.asarray(d[:, 1:], dtype=complex))
    bad = np.argwhere(mags <= eta)
    if len(bad):
        row, col = bad[0]
        nu = tuple(int(v) for v in index.nus[col + 1])
        raise NearSingularSpectral(
            f"|<nu - 2 xi, nu>| = {mags[row, col]:.3g} <= eta = {eta:g} at nu = {nu}",
            nu=nu,
            value=complex(d[row, col + 1]),
            w=int(row),
        )


def solve_recurrence(d, terms, index: ConeIndex, arith, initial=1):
    """Solve d_nu a_nu = sum_t weight_t a_{nu - shift_t} level by level.

    ``terms`` holds (weight, shift_level, predecessor_index) triples; the
    result has a trailing zero sentinel column, shape (B, N + 1).
    """
    B, N = d.shape
    a = arith.zeros((B, N + 1))
    a[:, 0] = arith.scalar(initial)
    for m in range(1, index.M + 1):
        sl = index.level_slice(m)
        acc = None
        for weight, shift_level, pred in terms:
            if shift_level > m:
                continue
            contrib = weight * a[:, pred[sl]]
            acc = contrib if acc is None else acc + contrib
        if acc is None:
            continue
        a[:, sl] = acc / d[:, sl]
    return a


def toda_terms(n: int, g, index: ConeIndex, arith):
    r = rho(n)
    out = []
    for alpha, weight in zip(toda_perturbations(n), toda_weights(n, g)):
        out.append((arith.scalar(weight), int(np.dot(alpha, r)), index.shifted(alpha)))
    return out


def toda_coefficients(xis, g, index: ConeIndex, arith, eta: float = DEFAULT_ETA):
    """Coefficient matrix (B, N + 1) for a batch of spectral points ``xis``.

    ``xis`` must already be an array of the arithmetic's scalar type.
    """
    d = _denominators(xis, index)
    _check_denominators(d, index, eta)
    return solve_recurrence(d, toda_terms(index.n, g, index, arith), index, arith), d


@dataclass(frozen=True, eq=False)
class HCCoefficientTable:
    """Memoized coefficients a_nu(xi; g) for all cone vectors up to level M."""

    n: int
    g: complex
    xi: SpectralPoint
    M: int
    coeffs: np.ndarray
    index: ConeIndex
    prec: int = 53

    def __getitem__(self, nu) -> complex:
        nu = tuple(int(v) for v in nu)
        if len(nu) != self.n:
            raise ValueError(f"expected a vector of length {self.n}")
        i = self.index.index(nu)
        if i == self.index.size:
            if level_of(nu) > self.M and all(
                sum(nu[: k + 1]) >= 0 for k in range(self.n)
            ):
                raise KeyError(f"level {level_of(nu)} exceeds the table level {self.M}")
            return self.coeffs[0, -1]
        return self.coeffs[0, i]

    def items(self):
        for i, nu in enumerate(self.index.nus):
            yield tuple(int(v) for v in nu), self.coeffs[0, i]

    def recurrence_defects(self) -> np.ndarray:
        """|<nu-2xi,nu> a_nu - sum_alpha w_alpha a_{nu-alpha}| for nu > 0,
        scaled by 1 + |a_nu| |<nu-2xi,nu>|."""
        ar = get_arith(self.prec)
        with ar.workprec():
            xis = ar.array([self.xi.entries])
            d = _denominators(xis, self.index)
            a = self.coeffs
            rhs = sum(w * a[:, pred[: self.index.size]] for w, _, pred in toda_terms(self.n, self.g, self.index, ar))
            lhs = d * a[:, : self.index.size]
            defect = np.abs(np.asarray(lhs - rhs, dtype=complex))[0, 1:]
            scale = 1 + np.abs(np.asarray(lhs, dtype=complex))[0, 1:]
        return defect / scale


def hc_table(xi, g, M: int, *, eta: float = DEFAULT_ETA, prec: int = 53) -> HCCoefficientTable:
    xi = SpectralPoint.of(xi)
    index = cone_index(xi.n, M)
    ar = get_arith(prec)
    with ar.workprec():
        coeffs, _ = toda_coefficients(ar.array([xi.entries]), g, index, ar, eta)
    return HCCoefficientTable(xi.n, complex(g), xi, M, coeffs, index, prec)


def hc_coefficient(table: HCCoefficientTable, nu) -> complex:
    """a_nu(xi; g); zero outside the cone."""
    return table[nu]


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _check_dims(xi: SpectralPoint, x: PositionPoint):
    if xi.n != x.n:
        raise ValueError(f"xi has {xi.n} entries but x has {x.n}")


def decay_factors(index: ConeIndex, x, arith):
    """exp(-<nu, x>) for every cone vector, shape (N,)."""
    xs = arith.array(tuple(x))
    return arith.exp(-(index.nus @ xs))


def series_sums(coeffs, factors, arith):
    """Row sums of coeffs * factors and of their magnitudes."""
    terms = coeffs[:, : len(factors)] * factors[None, :]
    sums = arith.row_sums(terms)
    mags = np.abs(np.asarray(terms, dtype=complex)).sum(axis=1)
    return sums, mags


def phi_eval(xi, x, g, plan: TruncationPlan = TruncationPlan()) -> Evaluation:
    """Truncated Harish-Chandra series with its certified tail bound.

    The value is in the plan's scalar type (complex, or mpmath.mpc in
    extended precision).  ``condition`` is sum |terms| / |sum|.
    """
    xi = SpectralPoint.of(xi)
    x = PositionPoint.of(x)
    _check_dims(xi, x)
    ar = plan.arith()
    index = cone_index(xi.n, plan.M)
    with ar.workprec():
        coeffs, _ = toda_coefficients(ar.array([xi.entries]), g, index, ar, plan.eta)
        factors = decay_factors(index, x, ar)
        (total,), (mag,) = series_sums(coeffs, factors, ar)
        lead = ar.exp(sum(a * b for a, b in zip(ar.array(xi.entries), ar.array(x.entries))))
        value = lead * total
    if not ar.extended:
        value = complex(value)
    tail = abs(complex(lead)) * tail_constants(xi, x, g, plan.M, plan.eta).tail(plan.M, plan.tol)
    if plan.tol is not None and tail > plan.tol:
        raise TailNotConverged(f"tail bound {tail:.3g} exceeds tol {plan.tol:g} at M = {plan.M}", bound=tail, tol=plan.tol)
    cond = mag / max(abs(complex(total)), 1e-300)
    return Evaluation(value, tail, float(cond))


def toda_potential(x, g, arith=None):
    """sum_{alpha in S} w_alpha exp(-<alpha, x>)."""
    ar = arith or get_arith()
    xs = ar.array(tuple(x))
    n = len(xs)
    total = ar.scalar(0)
    for alpha, w in zip(toda_perturbations(n), toda_weights(n, g)):
        total += ar.scalar(w) * ar.exp(-sum(int(a) * v for a, v in zip(alpha, xs)))
    return total if ar.extended else complex(total)


def _laplacian_parts(xis, x, g, index, ar, eta):
    """Per row: (series sum, sum of a_nu <nu-2xi,nu> e^{-<nu,x>})."""
    coeffs, d = toda_coefficients(xis, g, index, ar, eta)
    factors = decay_factors(index, x, ar)
    sums, _ = series_sums(coeffs, factors, ar)
    dsums = ar.row_sums(coeffs[:, : index.size] * d * factors[None, :])
    return sums, dsums


def toda_laplacian_residual(xi, x, g, plan: TruncationPlan = TruncationPlan()) -> float:
    """|L phi - <xi, xi> phi| / max(|phi|, 1e-30) for the truncated series.

    Derivatives act termwise on the exponentials; the potential is exact.
    """
    xi = SpectralPoint.of(xi)
    x = PositionPoint.of(x)
    _check_dims(xi, x)
    ar = plan.arith()
    index = cone_index(xi.n, plan.M)
    with ar.workprec():
        (s,), (ds,) = _laplacian_parts(ar.array([xi.entries]), x, g, index, ar, plan.eta)
        lead = ar.exp(sum(a * b for a, b in zip(ar.array(xi.entries), ar.array(x.entries))))
        V = toda_potential(x.entries, g, ar)
        phi = lead * s
        defect = lead * (ds - V * s)
    return abs(complex(defect)) / max(abs(complex(phi)), 1e-30)
