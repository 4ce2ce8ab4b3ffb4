"""c-function and the hyperoctahedral Whittaker function.

    Phi_xi(x; g) = sum_{w in W} C(w xi; g) phi_{w xi}(x; g),

    C(xi; g) = prod_j Gamma(2 xi_j) / Gamma(1/2 + g + xi_j)
               prod_{j<k} Gamma(xi_j + xi_k) Gamma(xi_j - xi_k).

The c-function is accumulated as a sum of log-Gamma values and
exponentiated once per group element, together with exp(<w xi, x>).
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass


from ._arith import dist_to_integers, get_arith
from .core import DEFAULT_ETA, PositionPoint, SpectralPoint, cone_index, group_enumerate, orbit
from .errors import CancellationWarning, CFunctionPole, NearSingularSpectral, TailNotConverged
from .hc_series import (
    Evaluation,
    TruncationPlan,
    _laplacian_parts,
    decay_factors,
    series_sums,
    tail_constants,
    toda_coefficients,
    toda_potential,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CFunctionValue:
    """C(xi; g) together with its log; the log is the source of truth.

    A vanishing value (a reciprocal Gamma at a pole) has log_value with
    real part -inf.
    """

    value: complex
    log_value: complex

    @property
    def is_zero(self) -> bool:
        return math.isinf(complex(self.log_value).real)


def _gamma_log_sum(numerators, denominators, arith, eta, label="C"):
    """sum log Gamma(numerators) - sum log Gamma(denominators).

    Poles among the numerators raise; poles among the denominators give a
    zero value (log = -inf)."""
    total = arith.scalar(0)
    for z in numerators:
        if dist_to_integers(z, nonpositive=True) <= eta:
            raise CFunctionPole(f"Gamma pole in {label} at argument {complex(z):.6g}", argument=complex(z))
        total += arith.loggamma(z)
    zero = False
    for z in denominators:
        if dist_to_integers(z, nonpositive=True) == 0.0 and complex(z).imag == 0:
            zero = True
            continue
        total -= arith.loggamma(z)
    if zero:
        return complex(-math.inf, 0)
    return total


def c_function(xi, g, *, eta: float = DEFAULT_ETA, prec: int = 53) -> CFunctionValue:
    ar = get_arith(prec)
    with ar.workprec():
        xs = [ar.scalar(z) for z in xi]
        gg = ar.scalar(g)
        num = [2 * z for z in xs]
        den = [0.5 + gg + z for z in xs]
        for j, k in itertools.combinations(range(len(xs)), 2):
            num.append(xs[j] + xs[k])
            num.append(xs[j] - xs[k])
        logc = _gamma_log_sum(num, den, ar, eta)
        if isinstance(logc, complex) and math.isinf(logc.real):
            return CFunctionValue(ar.scalar(0), logc)
        value = ar.exp(logc)
    if not ar.extended:
        value, logc = complex(value), complex(logc)
    return CFunctionValue(value, logc)


def _orbit_log_c(points, g, eta, prec, ws):
    logs = []
    for w, p in zip(ws, points):
        try:
            logs.append(c_function(p, g, eta=eta, prec=prec).log_value)
        except CFunctionPole as err:
            err.w = w
            raise
    return logs


def _orbit_coefficients(points, g, index, ar, eta, ws):
    try:
        return toda_coefficients(ar.array(points), g, index, ar, eta)
    except NearSingularSpectral as err:
        err.w = ws[err.w]
        raise


def _prefactor(log_c, point, x, ar):
    if isinstance(log_c, complex) and math.isinf(log_c.real):
        return ar.scalar(0)
    exponent = log_c + sum(ar.scalar(a) * ar.scalar(b) for a, b in zip(point, x))
    return ar.exp(exponent)


def whittaker_eval(xi, x, g, plan: TruncationPlan = TruncationPlan()) -> Evaluation:
    """Hyperoctahedral Whittaker function by the ordered group sum.

    ``tail_bound`` is sum_w |C(w xi)| tail(w xi); ``condition`` is
    sum_w |term_w| / |Phi|.  If ``plan.tol`` is set and the cancellation
    loses more than that, a warning is issued and, when
    ``plan.fallback_prec`` is given, the sum is redone at that precision.
    """
    xi = SpectralPoint.of(xi)
    x = PositionPoint.of(x)
    if xi.n != x.n:
        raise ValueError(f"xi has {xi.n} entries but x has {x.n}")
    n = xi.n
    ws = group_enumerate(n)
    points = orbit(xi.entries)
    ar = plan.arith()
    index = cone_index(n, plan.M)
    logs = _orbit_log_c(points, g, plan.eta, plan.prec, ws)
    with ar.workprec():
        coeffs, _ = _orbit_coefficients(points, g, index, ar, plan.eta, ws)
        factors = decay_factors(index, x.entries, ar)
        sums, _ = series_sums(coeffs, factors, ar)
        prefs = [_prefactor(lc, p, x.entries, ar) for lc, p in zip(logs, points)]
        terms = [pf * s for pf, s in zip(prefs, sums)]
        value = ar.fsum(terms)
    mags = [abs(complex(t)) for t in terms]
    cond = sum(mags) / max(abs(complex(value)), 1e-300)
    tail = 0.0
    for pf, p in zip(prefs, points):
        pf = abs(complex(pf))
        if pf:
            tail += pf * tail_constants(p, x.entries, g, plan.M, plan.eta).tail(plan.M, plan.tol)
    if plan.tol is not None:
        if tail > plan.tol:
            raise TailNotConverged(f"tail bound {tail:.3g} exceeds tol {plan.tol:g}", bound=tail, tol=plan.tol)
        lost = cond * ar.eps * abs(complex(value))
        if lost > plan.tol:
            if plan.fallback_prec and plan.fallback_prec > plan.prec:
                log.info("recomputing group sum at %d bits (condition %.3g)", plan.fallback_prec, cond)
                return whittaker_eval(xi, x, g, plan.replace(prec=plan.fallback_prec, fallback_prec=None))
            warnings.warn(f"group sum condition {cond:.3g} exceeds the tolerance budget", CancellationWarning)
    if not ar.extended:
        value = complex(value)
    return Evaluation(value, tail, float(cond))


def plane_wave_limit(xi, x, g) -> complex:
    """sum_w C(w xi; g) exp(<w xi, x>), the large-x form of Phi for Re xi = 0."""
    xi = SpectralPoint.of(xi)
    ar = get_arith()
    total = []
    for p in orbit(xi.entries):
        total.append(_prefactor(c_function(p, g).log_value, p, tuple(x), ar))
    return ar.fsum(total)


def whittaker_laplacian_residual(xi, x, g, plan: TruncationPlan = TruncationPlan()) -> float:
    """|L Phi - <xi, xi> Phi| / |Phi|, termwise as for the fundamental series."""
    xi = SpectralPoint.of(xi)
    x = PositionPoint.of(x)
    n = xi.n
    ws = group_enumerate(n)
    points = orbit(xi.entries)
    ar = plan.arith()
    index = cone_index(n, plan.M)
    logs = _orbit_log_c(points, g, plan.eta, plan.prec, ws)
    with ar.workprec():
        sums, dsums = _laplacian_parts(ar.array(points), x.entries, g, index, ar, plan.eta)
        prefs = [_prefactor(lc, p, x.entries, ar) for lc, p in zip(logs, points)]
        V = toda_potential(x.entries, g, ar)
        phi = ar.fsum([pf * s for pf, s in zip(prefs, sums)])
        defect = ar.fsum([pf * (ds - V * s) for pf, s, ds in zip(prefs, sums, dsums)])
    return abs(complex(defect)) / max(abs(complex(phi)), 1e-30)
