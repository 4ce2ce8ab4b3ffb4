"""Calogero-Sutherland side of the confluence.

The BC_n Calogero-Sutherland Laplacian

    L^cs = Delta - sum_{alpha in R+} a^cs_alpha / (4 sinh^2(<alpha, x>/2)),

with a^cs_alpha = k1 (k1 + 2 k2 - 1), 2 k0 (k0 - 1), 4 k2 (k2 - 1) for
<alpha, alpha> = 1, 2, 4, has a Harish-Chandra series whose coefficients
solve

    <nu - 2 xi, nu> a^cs_nu = sum_{alpha in R+, l >= 1} l a^cs_alpha a^cs_{nu - l alpha}.

Under the schedule k0 (k0 - 1) = e^c, k1 = 2 g, k2 (k2 - 1) = e^{2c}/16 and
the translation x -> x + c rho, everything here tends to the Toda chain
with Morse boundary term as c grows.

Translated evaluations never form phi^cs(x + c rho) directly: the weights
are rescaled to l a^cs_alpha exp(-c l <alpha, rho>), which produces
a^cs_nu exp(-c <nu, rho>) and hence exp(-c <xi, rho>) phi^cs(x + c rho)
without overflow.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._arith import dist_to_integers, get_arith
from .connection import CFunctionValue, _gamma_log_sum, whittaker_eval
from .core import (
    DEFAULT_ETA,
    ConeIndex,
    SpectralPoint,
    bc_positive_roots,
    check_chamber,
    cone_enumerate,
    cone_index,
    group_enumerate,
    orbit,
    rho,
)
from .dual_ops import SignedSubset, signed_subsets
from .errors import CFunctionPole, CoefficientPole, ConfluencePrecision, NearSingularSpectral
from .hc_series import (
    Evaluation,
    TruncationPlan,
    _check_denominators,
    _denominators,
    decay_factors,
    phi_eval,
    solve_recurrence,
)


# ---------------------------------------------------------------------------
# couplings and root weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CouplingTriple:
    k0: complex
    k1: complex
    k2: complex

    def __iter__(self):
        return iter((self.k0, self.k1, self.k2))


def coupling_schedule(c: float, g) -> CouplingTriple:
    """Positive roots of k0 (k0 - 1) = e^c and k2 (k2 - 1) = e^{2c}/16, k1 = 2 g."""
    k0 = (1 + math.sqrt(1 + 4 * math.exp(c))) / 2
    k2 = (1 + math.sqrt(1 + math.exp(2 * c) / 4)) / 2
    return CouplingTriple(k0, 2 * complex(g), k2)


def root_weight(alpha, k: CouplingTriple):
    k0, k1, k2 = k
    length = sum(a * a for a in alpha)
    if length == 1:
        return k1 * (k1 + 2 * k2 - 1)
    if length == 2:
        return 2 * k0 * (k0 - 1)
    if length == 4:
        return 4 * k2 * (k2 - 1)
    raise ValueError(f"{alpha} is not a positive BC root")


def cs_terms(n: int, k: CouplingTriple, index: ConeIndex, arith, shift: float = 0.0):
    """(l a_alpha exp(-shift l <alpha, rho>), l <alpha, rho>, pred) for all l alpha up to level M."""
    r = rho(n)
    out = []
    for alpha in bc_positive_roots(n):
        height = int(np.dot(alpha, r))
        w = arith.scalar(root_weight(alpha, k))
        if complex(w) == 0:
            continue
        for l in range(1, index.M // height + 1):
            scale = arith.exp(arith.scalar(-shift * l * height)) if shift else 1
            out.append((l * w * scale, l * height, index.shifted(tuple(l * a for a in alpha))))
    return out


def cs_coefficients(xis, k: CouplingTriple, index: ConeIndex, arith, eta: float = DEFAULT_ETA, shift: float = 0.0):
    d = _denominators(xis, index)
    _check_denominators(d, index, eta)
    return solve_recurrence(d, cs_terms(index.n, k, index, arith, shift), index, arith), d


@dataclass(frozen=True, eq=False)
class CSCoefficientTable:
    """Coefficients a^cs_nu(xi; k) exp(-shift <nu, rho>) up to level M."""

    n: int
    k: CouplingTriple
    xi: SpectralPoint
    M: int
    coeffs: np.ndarray
    index: ConeIndex
    shift: float = 0.0
    prec: int = 53

    def __getitem__(self, nu) -> complex:
        i = self.index.index(nu)
        if i == self.index.size and sum(int(v) * (self.n - j) for j, v in enumerate(nu)) > self.M:
            raise KeyError(f"{tuple(nu)} is above the table level {self.M}")
        return self.coeffs[0, i]

    def recurrence_defects(self) -> np.ndarray:
        """Scaled defects of the finite-sum recurrence, one per nu > 0."""
        ar = get_arith(self.prec)
        with ar.workprec():
            d = _denominators(ar.array([self.xi.entries]), self.index)
            a = self.coeffs
            N = self.index.size
            rhs = sum(w * a[:, pred[:N]] for w, _, pred in cs_terms(self.n, self.k, self.index, ar, self.shift))
            lhs = d * a[:, :N]
            defect = np.abs(np.asarray(lhs - rhs, dtype=complex))[0, 1:]
            scale = np.abs(np.asarray(lhs, dtype=complex))[0, 1:] + 1e-300
        return defect / np.maximum(scale, np.abs(np.asarray(rhs, dtype=complex))[0, 1:])


def cs_table(xi, k: CouplingTriple, M: int, *, shift: float = 0.0, eta: float = DEFAULT_ETA, prec: int = 53) -> CSCoefficientTable:
    xi = SpectralPoint.of(xi)
    index = cone_index(xi.n, M)
    ar = get_arith(prec)
    with ar.workprec():
        coeffs, _ = cs_coefficients(ar.array([xi.entries]), k, index, ar, eta, shift)
    return CSCoefficientTable(xi.n, k, xi, M, coeffs, index, shift, prec)


# ---------------------------------------------------------------------------
# series evaluation
# ---------------------------------------------------------------------------


def _translated(x, shift: float):
    x = tuple(complex(v) for v in x)
    r = rho(len(x))
    point = tuple(v + shift * int(rv) for v, rv in zip(x, r))
    check_chamber(point)
    return x


def _level_magnitudes(terms, index: ConeIndex) -> np.ndarray:
    mags = np.abs(np.asarray(terms, dtype=complex))
    return np.array([mags[index.level_slice(m)].sum() for m in range(index.M + 1)])


def tail_estimate(levels: np.ndarray) -> float:
    """Geometric extrapolation from the last two nonzero level magnitudes.

    This is an estimate, not a bound."""
    nz = np.nonzero(levels)[0]
    if nz.size == 0 or nz[-1] < len(levels) - 2:
        return 0.0
    if nz.size < 2:
        return math.inf
    last, prev = levels[nz[-1]], levels[nz[-2]]
    r = (last / prev) ** (1.0 / (nz[-1] - nz[-2]))
    return float(last * r / (1 - r)) if r < 1 else math.inf


def _series_rows(points, x, k, plan: TruncationPlan, shift: float):
    """Row sums of the shifted CS series and their level magnitudes."""
    ar = plan.arith()
    index = cone_index(len(x), plan.M)
    coeffs, d = cs_coefficients(ar.array(points), k, index, ar, plan.eta, shift)
    factors = decay_factors(index, x, ar)
    terms = coeffs[:, : index.size] * factors[None, :]
    return coeffs, d, factors, terms, index


def cs_phi_eval(xi, x, k: CouplingTriple, plan: TruncationPlan = TruncationPlan(), *, shift: float = 0.0) -> Evaluation:
    """exp(-shift <xi, rho>) phi^cs_xi(x + shift rho; k).

    With ``shift = 0`` this is the plain series.  ``tail_bound`` carries an
    empirical estimate from the last two levels.
    """
    xi = SpectralPoint.of(xi)
    x = _translated(x, shift)
    if xi.n != len(x):
        raise ValueError(f"xi has {xi.n} entries but x has {len(x)}")
    ar = plan.arith()
    with ar.workprec():
        _, _, _, terms, index = _series_rows([xi.entries], x, k, plan, shift)
        total = ar.fsum(terms[0])
        lead = ar.exp(sum(ar.scalar(a) * ar.scalar(b) for a, b in zip(xi.entries, x)))
        value = lead * total
    levels = _level_magnitudes(terms[0], index)
    cond = levels.sum() / max(abs(complex(total)), 1e-300)
    est = abs(complex(lead)) * tail_estimate(levels)
    return Evaluation(value if ar.extended else complex(value), est, float(cond))


# ---------------------------------------------------------------------------
# c-function and gamma factor
# ---------------------------------------------------------------------------


def _c_log(xi, k: CouplingTriple, ar, eta):
    k0, k1, k2 = (ar.scalar(v) for v in k)
    xs = [ar.scalar(z) for z in xi]
    num, den = [], []
    for z in xs:
        num += [2 * z, k1 / 2 + z]
        den += [k1 + 2 * z, k1 / 2 + k2 + z]
    for a, b in itertools.combinations(xs, 2):
        num += [a + b, a - b]
        den += [k0 + a + b, k0 + a - b]
    return _gamma_log_sum(num, den, ar, eta, label="C^cs")


def cs_c_function(xi, k: CouplingTriple, *, eta: float = DEFAULT_ETA, prec: int = 53) -> CFunctionValue:
    ar = get_arith(prec)
    with ar.workprec():
        logc = _c_log(xi, k, ar, eta)
        if isinstance(logc, complex) and math.isinf(logc.real):
            return CFunctionValue(ar.scalar(0), logc)
        value = _safe_exp(logc, ar)
    if not ar.extended:
        value, logc = complex(value), complex(logc)
    return CFunctionValue(value, logc)


def _safe_exp(z, ar):
    # large couplings push these logs past the double range; the log stays exact
    if not ar.extended and complex(z).real > 709:
        return complex(math.inf, 0)
    return ar.exp(z)


def gamma_factor(k: CouplingTriple, n: int, *, eta: float = DEFAULT_ETA, prec: int = 53) -> CFunctionValue:
    """Gamma(k0)^{n(n-1)} (Gamma(k1) Gamma(k1/2 + k2) / (Gamma(k1/2) Gamma(1/2 + k1/2)))^n.

    When k1 or k1/2 sits on a Gamma pole the bracket is evaluated in its
    duplication form 2^{k1 - 1} Gamma(k1/2 + k2) / sqrt(pi), which is the
    analytic continuation of the quotient."""
    ar = get_arith(prec)
    with ar.workprec():
        k0, k1, k2 = (ar.scalar(v) for v in k)
        if n > 1 and dist_to_integers(k0, nonpositive=True) <= eta:
            raise CFunctionPole(f"Gamma pole at k0 = {complex(k0)}", argument=complex(k0))
        log_k0 = ar.loggamma(k0) if n > 1 else 0
        if min(dist_to_integers(k1, nonpositive=True), dist_to_integers(k1 / 2, nonpositive=True)) > eta:
            bracket = _gamma_log_sum([k1, k1 / 2 + k2], [k1 / 2, 0.5 + k1 / 2], ar, eta, label="gamma")
        else:
            bracket = _gamma_log_sum([k1 / 2 + k2], [], ar, eta, label="gamma")
            bracket += (k1 - 1) * math.log(2) - 0.5 * math.log(math.pi)
        logv = n * (n - 1) * log_k0 + n * bracket
        if isinstance(logv, complex) and math.isinf(logv.real):
            return CFunctionValue(ar.scalar(0), logv)
        value = _safe_exp(logv, ar)
    if not ar.extended:
        value, logv = complex(value), complex(logv)
    return CFunctionValue(value, logv)


def scaled_c_function(xi, g, c: float, *, eta: float = DEFAULT_ETA, prec: int = 53) -> complex:
    """gamma(k^(c)) exp(c <xi, rho>) C^cs(xi; k^(c)); tends to C(xi; g)."""
    xi = tuple(xi)
    k = coupling_schedule(c, g)
    ar = get_arith(prec)
    with ar.workprec():
        lg = gamma_factor(k, len(xi), eta=eta, prec=prec).log_value
        lc = cs_c_function(xi, k, eta=eta, prec=prec).log_value
        if math.isinf(complex(lc).real) or math.isinf(complex(lg).real):
            return ar.scalar(0)
        shift = c * sum(ar.scalar(z) * int(r) for z, r in zip(xi, rho(len(xi))))
        value = ar.exp(lg + lc + shift)
    return value if ar.extended else complex(value)


def cs_whittaker_eval(
    xi,
    x,
    k: CouplingTriple,
    plan: TruncationPlan = TruncationPlan(),
    *,
    shift: float = 0.0,
    gamma_normalized: bool = False,
) -> Evaluation:
    """Phi^cs_xi(x + shift rho; k), times gamma(k) when ``gamma_normalized``.

    Each group term is assembled in log space as
    log C^cs(w xi) + <w xi, x + shift rho> times the rescaled series."""
    xi = SpectralPoint.of(xi)
    x = _translated(x, shift)
    n = xi.n
    if n != len(x):
        raise ValueError(f"xi has {n} entries but x has {len(x)}")
    ws = group_enumerate(n)
    points = orbit(xi.entries)
    ar = plan.arith()
    r = rho(n)
    logs = []
    for w, p in zip(ws, points):
        try:
            logs.append(cs_c_function(p, k, eta=plan.eta, prec=plan.prec).log_value)
        except CFunctionPole as err:
            err.w = w
            raise
    log_gamma = gamma_factor(k, n, eta=plan.eta, prec=plan.prec).log_value if gamma_normalized else 0
    with ar.workprec():
        try:
            _, _, _, terms, index = _series_rows(points, x, k, plan, shift)
        except NearSingularSpectral as err:
            err.w = ws[err.w]
            raise
        sums = ar.row_sums(terms)
        parts, est = [], 0.0
        for lc, p, s, row in zip(logs, points, sums, terms):
            if math.isinf(complex(lc).real):
                continue
            exponent = lc + log_gamma + sum(ar.scalar(a) * (ar.scalar(b) + shift * int(rv)) for a, b, rv in zip(p, x, r))
            pref = ar.exp(exponent)
            parts.append(pref * s)
            est += abs(complex(pref)) * tail_estimate(_level_magnitudes(row, index))
        value = ar.fsum(parts)
    cond = sum(abs(complex(t)) for t in parts) / max(abs(complex(value)), 1e-300)
    return Evaluation(value if ar.extended else complex(value), est, float(cond))


# ---------------------------------------------------------------------------
# Laplacian check
# ---------------------------------------------------------------------------


def cs_potential(x, k: CouplingTriple, arith=None):
    """sum_{alpha in R+} a^cs_alpha / (4 sinh^2(<alpha, x>/2))."""
    ar = arith or get_arith()
    total = ar.scalar(0)
    xs = [ar.scalar(v) for v in x]
    for alpha in bc_positive_roots(len(xs)):
        t = sum(a * v for a, v in zip(alpha, xs)) / 2
        s = (ar.exp(t) - ar.exp(-t)) / 2
        total += ar.scalar(root_weight(alpha, k)) / (4 * s * s)
    return total


def cs_laplacian_residual(xi, x, k: CouplingTriple, plan: TruncationPlan = TruncationPlan(), *, whittaker: bool = True) -> float:
    """|L^cs F - <xi, xi> F| / |F| for F = Phi^cs (or phi^cs), termwise."""
    xi = SpectralPoint.of(xi)
    x = _translated(x, 0.0)
    points = orbit(xi.entries) if whittaker else np.array([xi.entries])
    ar = plan.arith()
    with ar.workprec():
        coeffs, d, factors, terms, index = _series_rows(points, x, k, plan, 0.0)
        sums = ar.row_sums(terms)
        dsums = ar.row_sums(terms * d)
        V = cs_potential(x, k, ar)
        F, defect = [], []
        for p, s, ds in zip(points, sums, dsums):
            if whittaker:
                lc = cs_c_function(p, k, eta=plan.eta, prec=plan.prec).log_value
                if math.isinf(complex(lc).real):
                    continue
            else:
                lc = 0
            pref = ar.exp(lc + sum(ar.scalar(a) * ar.scalar(b) for a, b in zip(p, x)))
            F.append(pref * s)
            defect.append(pref * (ds - V * s))
        F, defect = ar.fsum(F), ar.fsum(defect)
    return abs(complex(defect)) / max(abs(complex(F)), 1e-300)


# ---------------------------------------------------------------------------
# hypergeometric difference operators
# ---------------------------------------------------------------------------


def _check(value, eta, name):
    if abs(complex(value)) <= eta:
        raise CoefficientPole(f"vanishing factor {name} = {complex(value):.3g}", factor=name)
    return value


def _cs_product(J, eps, others, xi, k, eta, pair_sign):
    k0, k1, k2 = k
    out = 1
    for j, e in zip(J, eps):
        z = e * xi[j]
        out *= (z + k1 / 2 + k2) * (1 + 2 * z + k1) / (
            _check(z, eta, f"xi_{j + 1}") * _check(1 + 2 * z, eta, f"1 {2 * e:+d} xi_{j + 1}")
        )
        for q in others:
            out *= (z + xi[q] + k0) / _check(z + xi[q], eta, f"{e:+d} xi_{j + 1} + xi_{q + 1}")
            out *= (z - xi[q] + k0) / _check(z - xi[q], eta, f"{e:+d} xi_{j + 1} - xi_{q + 1}")
    for (a, ea), (b, eb) in itertools.combinations(zip(J, eps), 2):
        s = ea * xi[a] + eb * xi[b]
        out *= (s + k0) / _check(s, eta, f"{ea:+d} xi_{a + 1} {eb:+d} xi_{b + 1}")
        out *= (1 + s + pair_sign * k0) / _check(1 + s, eta, f"1 {ea:+d} xi_{a + 1} {eb:+d} xi_{b + 1}")
    return out


def _cs_scalars(xi, k, prec):
    ar = get_arith(prec)
    with ar.workprec():
        return ar, [ar.scalar(z) for z in xi], tuple(ar.scalar(v) for v in k)


def cs_coeff_V(eJ: SignedSubset, xi, k: CouplingTriple, *, eta: float = DEFAULT_ETA, prec: int = 53):
    ar, xs, kk = _cs_scalars(xi, k, prec)
    with ar.workprec():
        value = ar.scalar(_cs_product(eJ.J, eJ.eps, eJ.complement(len(xs)), xs, kk, eta, +1))
    return value if ar.extended else complex(value)


def cs_coeff_U(K, p: int, xi, k: CouplingTriple, *, eta: float = DEFAULT_ETA, prec: int = 53):
    K = tuple(sorted(int(q) for q in K))
    if not 0 <= p <= len(K):
        raise ValueError(f"need 0 <= p <= |K| = {len(K)}, got {p}")
    ar, xs, kk = _cs_scalars(xi, k, prec)
    with ar.workprec():
        parts = []
        for I in signed_subsets(K, p):
            rest = [q for q in K if q not in I.J]
            parts.append(ar.scalar(_cs_product(I.J, I.eps, rest, xs, kk, eta, -1)))
        value = (-1) ** p * ar.fsum(parts)
    return value if ar.extended else complex(value)


def E_ell(ell: int, x, *, prec: int = 53):
    """4^l e_l(sinh^2(x_1/2), ..., sinh^2(x_n/2))."""
    ar = get_arith(prec)
    with ar.workprec():
        s2 = []
        for v in x:
            v = ar.scalar(v)
            s = (ar.exp(v / 2) - ar.exp(-v / 2)) / 2
            s2.append(s * s)
        parts = []
        for J in itertools.combinations(range(len(s2)), ell):
            term = ar.scalar(4**ell)
            for j in J:
                term *= s2[j]
            parts.append(term)
        value = ar.fsum(parts) if parts else ar.scalar(0)
    return value if ar.extended else complex(value)


def cs_dde_residual(ell: int, xi, x, k: CouplingTriple, plan: TruncationPlan = TruncationPlan(), *, shift: float = 0.0, cache=None):
    """Relative defect of the hypergeometric difference equation at x + shift rho.

    Both sides are multiplied by gamma(k) exp(-(shift/2) l (2n + 1 - l)),
    so the residual stays finite as the shift grows."""
    from .dual_ops import DDEResidual

    xi = SpectralPoint.of(xi)
    n = xi.n
    x = tuple(x)
    cache = {} if cache is None else cache
    ar = plan.arith()

    def Phi(step):
        if step not in cache:
            point = tuple(a + b for a, b in zip(xi.entries, step))
            cache[step] = cs_whittaker_eval(point, x, k, plan, shift=shift, gamma_normalized=True).value
        return cache[step]

    with ar.workprec():
        scale = ar.exp(ar.scalar(-shift / 2 * ell * (2 * n + 1 - ell)))
        parts = []
        for size in range(ell + 1):
            for eJ in signed_subsets(range(n), size):
                u = cs_coeff_U(eJ.complement(n), ell - size, xi.entries, k, eta=plan.eta, prec=plan.prec)
                v = cs_coeff_V(eJ, xi.entries, k, eta=plan.eta, prec=plan.prec)
                parts.append(scale * u * v * Phi(eJ.shift(n)))
        lhs = ar.fsum(parts)
        r = rho(n)
        rhs = scale * E_ell(ell, tuple(ar.scalar(a) + shift * int(b) for a, b in zip(x, r)), prec=plan.prec) * Phi((0,) * n)
        defect = abs(complex(lhs - rhs)) / abs(complex(rhs))
    cond = sum(abs(complex(p)) for p in parts) / abs(complex(rhs))
    return DDEResidual(float(defect), float(cond))


# ---------------------------------------------------------------------------
# confluence
# ---------------------------------------------------------------------------


class ConfluencePoint(NamedTuple):
    c: float
    err_phi: float
    err_Phi: float
    estimate_phi: float
    estimate_Phi: float


def confluence_error(xi, x, g, c_grid, plan: TruncationPlan = TruncationPlan(M=25)) -> list[ConfluencePoint]:
    """Distances of the translated, rescaled CS functions from their Toda limits.

    err_phi = |exp(-c <xi, rho>) phi^cs_xi(x + c rho; k^(c)) - phi_xi(x; g)|
    err_Phi = |gamma(k^(c)) Phi^cs_xi(x + c rho; k^(c)) - Phi_xi(x; g)|

    Both sides use the same truncation level.  A ConfluencePrecision
    warning is issued when the CS tail estimate is not small against the
    measured gap.
    """
    ref_phi = phi_eval(xi, x, g, plan).value
    ref_Phi = whittaker_eval(xi, x, g, plan).value
    out = []
    for c in c_grid:
        k = coupling_schedule(c, g)
        a = cs_phi_eval(xi, x, k, plan, shift=c)
        b = cs_whittaker_eval(xi, x, k, plan, shift=c, gamma_normalized=True)
        e1 = abs(complex(a.value) - complex(ref_phi))
        e2 = abs(complex(b.value) - complex(ref_Phi))
        if a.tail_bound > 0.1 * e1 or b.tail_bound > 0.1 * e2:
            warnings.warn(
                f"at c = {c:g} the truncation estimate ({a.tail_bound:.2g}, {b.tail_bound:.2g}) "
                f"is not small against the confluence gap ({e1:.2g}, {e2:.2g})",
                ConfluencePrecision,
            )
        out.append(ConfluencePoint(float(c), e1, e2, a.tail_bound, b.tail_bound))
    return out


def normalization_delta(center, radius: float, xi, M: int | None = None) -> complex:
    """prod <mu - 2 xi, mu> over mu > 0 whose hyperplane <mu - 2 z, mu> = 0
    meets the closed ball |z - center| <= radius."""
    center = np.asarray(tuple(complex(z) for z in center))
    xi = tuple(complex(z) for z in xi)
    n = len(center)
    r = rho(n)
    cap = int(math.ceil(np.linalg.norm(r) * (2 * np.linalg.norm(center) + 2 * radius)))
    if M is not None:
        cap = min(cap, M)
    total = 1 + 0j
    for m, vectors in cone_enumerate(n, cap).items():
        if m == 0:
            continue
        for mu in vectors:
            mu = np.asarray(tuple(mu), dtype=float)
            norm = np.linalg.norm(mu)
            dist = abs(mu @ mu - 2 * (center @ mu)) / (2 * norm)
            if dist <= radius:
                total *= complex(mu @ mu - 2 * (np.asarray(xi) @ mu))
    return total
