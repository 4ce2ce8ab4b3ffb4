"""Verification suites shared by the command line and the test-suite.

Every suite returns a list of :class:`CheckRecord`; a record carries the
measured value, the threshold it is compared against and whether it
passed.  Random draws come from ``numpy.random.default_rng(seed)`` so a
report is reproducible from its configuration.
"""

from __future__ import annotations

import cmath
import itertools
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .connection import c_function, whittaker_eval
from .core import cone_enumerate, group_enumerate, regular_margin
from .cs_confluence import (
    E_ell,
    confluence_error,
    coupling_schedule,
    cs_coeff_U,
    cs_coeff_V,
    scaled_c_function,
)
from .dual_ops import coeff_U, coeff_V, dde_residual, identity_sum_rule, residue_probe, signed_subsets
from .errors import ConfluencePrecision
from .hc_series import TruncationPlan, hc_table, phi_eval, toda_laplacian_residual
from .univariate import bessel_K_quad, univariate_dde_residual, whittaker_M_phi

SUITES = ("pde", "dde", "univariate", "residues", "confluence", "counts")


@dataclass
class CheckRecord:
    suite: str
    check: str
    anchor: str
    value: complex
    threshold: float | None
    passed: bool
    bound: float | None = None
    millis: float = 0.0
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        v = complex(self.value)
        return {
            "suite": self.suite,
            "check": self.check,
            "anchor": self.anchor,
            "value_re": v.real,
            "value_im": v.imag,
            "bound": self.bound,
            "threshold": self.threshold,
            "pass": bool(self.passed),
            "millis": round(self.millis, 3),
        }


def _timed(fn: Callable):
    t0 = time.perf_counter()
    out = fn()
    return out, 1e3 * (time.perf_counter() - t0)


def _record(suite, check, anchor, value, threshold, *, bound=None, millis=0.0, below=True, **params):
    v = complex(value)
    ok = math.isfinite(abs(v)) and (abs(v) <= threshold if below else v.real >= threshold)
    return CheckRecord(suite, check, anchor, v, threshold, ok, bound, millis, params)


def summarize(records) -> tuple[int, int]:
    passed = sum(r.passed for r in records)
    return passed, len(records)


# ---------------------------------------------------------------------------
# random draws
# ---------------------------------------------------------------------------


def draw_spectral(rng, n, *, re=(0.1, 0.9), im=(-0.3, 0.3), margin=0.1, max_tries=1000):
    """Spectral point with every 2 xi_j, xi_j +- xi_k at least ``margin`` from Z."""
    for _ in range(max_tries):
        xi = rng.uniform(*re, n) + 1j * rng.uniform(*im, n)
        if regular_margin(xi) >= margin:
            return tuple(complex(z) for z in xi)
    raise RuntimeError("could not draw a regular spectral point")


def draw_position(rng, n, *, last=(0.5, 1.5), gap=(1.0, 2.0)):
    """x_1 > ... > x_n > 0 with x_n in ``last`` and consecutive gaps in ``gap``."""
    x = [rng.uniform(*last)]
    for _ in range(n - 1):
        x.append(x[-1] + rng.uniform(*gap))
    return tuple(reversed(x))


def univariate_grid(points: int = 20):
    """(xi, x, g) on the rank-one comparison grid."""
    xis = [0.1j * k for k in range(1, 10)] + [0.2 + 0.05 * k for k in range(6)]
    xs = np.linspace(0.5, 3.0, points)
    gs = (0.0, 0.7, 1.5)
    return [(complex(xis[i % len(xis)]), float(xs[i]), gs[i % len(gs)]) for i in range(points)]


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def suite_univariate(*, M: int = 30, points: int = 20, tol_series: float = 1e-10, tol_bessel: float = 1e-8, tol_dde: float = 1e-10):
    out = []
    plan = TruncationPlan(M=M)
    for xi, x, g in univariate_grid(points):
        ref = whittaker_M_phi(xi, x, g)
        val, ms = _timed(lambda: phi_eval((xi,), (x,), g, plan))
        out.append(_record("univariate", "fundamental series equals the Kummer form", "phi = e^{xi x} e^{-e^{-x}/2} 1F1(1/2+g-xi, 1-2xi; e^{-x})",
                           abs(val.value - ref) / abs(ref), tol_series, bound=val.tail_bound / abs(ref), millis=ms, xi=xi, x=x, g=g))
    for xi, x, _ in univariate_grid(points):
        ref = bessel_K_quad(xi, 0.5 * math.exp(-x)) / math.sqrt(math.pi)
        val, ms = _timed(lambda: whittaker_eval((xi,), (x,), 0.0, plan))
        out.append(_record("univariate", "g = 0 Whittaker function equals Macdonald's function", "Phi = K_xi(e^{-x}/2)/sqrt(pi)",
                           abs(val.value - ref) / abs(ref), tol_bessel, millis=ms, xi=xi, x=x))
    rng = np.random.default_rng(11)
    for _ in range(5):
        xi = complex(rng.uniform(0.1, 0.4), rng.uniform(-0.5, 0.5))
        x, g = float(rng.uniform(0.5, 3)), float(rng.uniform(0, 2))
        val, ms = _timed(lambda: univariate_dde_residual(xi, x, g))
        out.append(_record("univariate", "three-term difference equation in xi", "rank-one dual equation", val, tol_dde, millis=ms, xi=xi, x=x, g=g))
    return out


def suite_pde(*, ns=(2, 3), draws: int = 10, M: int = 30, tol: float = 1e-8, seed: int = 0, growth_M: int = 35,
              plane_wave_gap: float = 15.0, tol_invariance: float = 1e-12, tol_plane: float = 1e-6):
    out = []
    rng = np.random.default_rng(seed)
    plan = TruncationPlan(M=M)
    for n in ns:
        for _ in range(draws):
            xi = draw_spectral(rng, n, re=(-0.9, 0.9), im=(-1.0, 1.0))
            x = draw_position(rng, n)
            g = float(rng.uniform(0, 2))
            val, ms = _timed(lambda: toda_laplacian_residual(xi, x, g, plan))
            out.append(_record("pde", f"eigenvalue equation of the series (n={n})", "L phi = <xi, xi> phi", val, tol, millis=ms, n=n, xi=xi, x=x, g=g))
    out += growth_checks(rng, M=growth_M)
    out += invariance_checks(rng, tol=tol_invariance, M=M)
    out += plane_wave_checks(rng, gap=plane_wave_gap, tol=tol_plane, M=M)
    return out


def growth_checks(rng, *, ns=(1, 2, 3), M: int = 35, draws: int = 2):
    """max over nu of |a_nu| m! / A^m with A = 1 + c n / a; must be <= 1."""
    out = []
    for n in ns:
        for _ in range(draws):
            xi = draw_spectral(rng, n, re=(-0.9, 0.9), im=(-1.0, 1.0))
            g = float(rng.uniform(0, 2))

            def worst():
                table = hc_table(xi, g, M)
                idx = table.index
                nus, levels = idx.nus[1:], idx.levels[1:]
                d = idx.norms()[1:] - 2 * (nus @ np.asarray(xi))
                a = float(np.min(np.abs(d) / levels.astype(float) ** 2))
                c = max(2.0, abs(g), 0.25)
                A = 1 + c * n / a
                mags = np.abs(np.asarray(table.coeffs[0, 1 : idx.size], dtype=complex))
                logs = np.array([math.log(A) * m - math.lgamma(m + 1) for m in range(M + 1)])
                with np.errstate(divide="ignore"):
                    ratio = np.log(mags) - logs[levels]
                return float(np.exp(ratio.max())), A

            (val, A), ms = _timed(worst)
            out.append(_record("pde", f"coefficient growth |a_nu| <= A^m/m! (n={n}, M={M})", "A = 1 + c n / a",
                               val, 1.0, bound=A, millis=ms, n=n, xi=xi, g=g))
    return out


def invariance_checks(rng, *, n: int = 2, draws: int = 3, tol: float = 1e-12, M: int = 30):
    out = []
    plan = TruncationPlan(M=M)
    for _ in range(draws):
        xi = draw_spectral(rng, n)
        x = draw_position(rng, n)
        g = float(rng.uniform(0, 2))

        def worst():
            base = whittaker_eval(xi, x, g, plan).value
            return max(abs(whittaker_eval(w(xi), x, g, plan).value - base) / abs(base) for w in group_enumerate(n))

        val, ms = _timed(worst)
        out.append(_record("pde", "invariance under signed permutations", "Phi_{w xi} = Phi_xi", val, tol, millis=ms, xi=xi, x=x, g=g))
    return out


def plane_wave_checks(rng, *, ns=(2, 3), gap: float = 15.0, tol: float = 1e-6, M: int = 30):
    out = []
    plan = TruncationPlan(M=M)
    for n in ns:
        xi = tuple(1j * rng.uniform(0.1, 1.0, n))
        x = tuple(gap * (n - j) for j in range(n))
        g = float(rng.uniform(0, 2))
        val, ms = _timed(lambda: abs(phi_eval(xi, x, g, plan).value - cmath.exp(sum(a * b for a, b in zip(xi, x)))))
        out.append(_record("pde", f"plane-wave asymptotics at gap {gap:g} (n={n})", "phi ~ e^{<xi, x>}", val, tol, millis=ms, xi=xi, x=x, g=g))
    return out


def suite_dde(*, cases=((2, (1, 2)), (3, (1, 2, 3))), draws: int = 5, M: int = 30, tol: float = 1e-8, seed: int = 7,
              sum_rule_draws: int = 50, tol_sum_rule: float = 1e-12):
    out = []
    rng = np.random.default_rng(seed)
    plan = TruncationPlan(M=M)
    for n, ells in cases:
        for _ in range(draws):
            xi = draw_spectral(rng, n)
            x = draw_position(rng, n)
            g = float(rng.uniform(0, 2))
            cache = {}
            for ell in ells:
                val, ms = _timed(lambda: dde_residual(ell, xi, x, g, plan, cache=cache))
                out.append(_record("dde", f"difference equation D_{ell} (n={n})", "D_l Phi = e^{x_1+...+x_l} Phi",
                                   val.residual, tol, bound=val.condition, millis=ms, n=n, ell=ell, xi=xi, x=x, g=g))
    for i in range(sum_rule_draws):
        n = 2 + i % 3
        xi = draw_spectral(rng, n, re=(-1.5, 1.5), im=(-1.0, 1.0))
        g = float(rng.uniform(0, 2))

        def rel():
            terms = [coeff_U(range(n), 1, xi, g)] + [coeff_V(e, xi, g) for e in signed_subsets(range(n), 1)]
            return abs(identity_sum_rule(xi, g)) / max(1.0, sum(abs(t) for t in terms))

        val, ms = _timed(rel)
        out.append(_record("dde", f"first-order sum rule (n={n})", "U_{[n],1} = -sum V_{eps j}", val, tol_sum_rule, millis=ms, n=n, xi=xi, g=g))
    return out


RESIDUE_POINTS = {
    "single": lambda m: (m / 2, 0.3 + 0.2j),
    "pair": lambda m: (m / 2 + 0.17 + 0.1j, m / 2 - 0.17 - 0.1j),
}


def suite_residues(*, ms=(1, 2, 3), x=(3.0, 1.5), g: float = 0.7, M: int = 30, prec: int = 128,
                   deltas=(1e-3, 5e-4, 2.5e-4), tol: float = 1e-6, slope_tol: float = 0.2):
    out = []
    plan = TruncationPlan(M=M, prec=prec)
    for kind, m in itertools.product(("single", "pair"), ms):
        xi_hat = RESIDUE_POINTS[kind](m)
        probe, ms_ = _timed(lambda: residue_probe(kind, m, xi_hat, x, g, deltas, plan))
        rel = abs(complex(probe.extrapolated_residue)) / abs(complex(probe.reference))
        out.append(_record("residues", f"extrapolated residue, {kind} hyperplane m={m}", "residues of Phi vanish",
                           rel, tol, bound=probe.condition, millis=ms_, kind=kind, m=m))
        out.append(_record("residues", f"fitted slope, {kind} hyperplane m={m}", "factor * Phi = O(delta)",
                           probe.slope - 1, slope_tol, millis=0.0, kind=kind, m=m))
    return out


def suite_counts(*, ns=(1, 2, 3, 4), M: int = 20):
    out = []
    for n in ns:
        levels, ms = _timed(lambda: cone_enumerate(n, M))
        for m in range(M + 1):
            diff = len(levels[m]) - math.comb(n + m - 1, m)
            out.append(_record("counts", f"level count n={n} m={m}", "#levels = binom(n+m-1, m)", diff, 0.0,
                               bound=math.comb(n + m - 1, m), millis=ms if m == 0 else 0.0, n=n, m=m))
    return out


CONFLUENCE_POINTS = {
    1: ((0.3j,), (1.0,), 1.0),
    2: ((0.3 + 0.1j, 0.55 - 0.2j), (2.5, 1.2), 0.7),
}


def _decreasing(values) -> float:
    """max of err(c_{i+1}) / err(c_i); strictly decreasing iff < 1."""
    return max(b / a for a, b in zip(values, values[1:]))


def suite_confluence(*, ns=(1, 2), c_grid=(4.0, 6.0, 8.0), M: int = 25, seed: int = 3, scaling_c=(6.0, 10.0), ratio: float = 10.0):
    out = []
    plan = TruncationPlan(M=M)
    for n in ns:
        xi, x, g = CONFLUENCE_POINTS[n]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConfluencePrecision)
            pts, ms = _timed(lambda: confluence_error(xi, x, g, c_grid, plan))
        out.append(_record("confluence", f"series confluence error decreases (n={n})", "e^{-c<xi,rho>} phi^cs(x+c rho) -> phi",
                           _decreasing([p.err_phi for p in pts]), 1.0, bound=pts[-1].err_phi, millis=ms, n=n))
        out[-1].passed = out[-1].value.real < 1
        out.append(_record("confluence", f"connection-sum confluence error decreases (n={n})", "gamma Phi^cs(x+c rho) -> Phi",
                           _decreasing([p.err_Phi for p in pts]), 1.0, bound=pts[-1].err_Phi, n=n))
        out[-1].passed = out[-1].value.real < 1
        ref = c_function(xi, g).value
        errs, ms = _timed(lambda: [abs(scaled_c_function(xi, g, c) - ref) / abs(ref) for c in (4.0, 6.0, 8.0, 10.0)])
        out.append(_record("confluence", f"c-function limit error decreases (n={n})", "gamma e^{c<xi,rho>} C^cs -> C",
                           _decreasing(errs), 1.0, bound=errs[-1], millis=ms, n=n))
        out[-1].passed = out[-1].value.real < 1
    rng = np.random.default_rng(seed)
    for n in ns:
        out += scaling_limit_checks(rng, n, scaling_c, ratio)
    return out


def scaling_limit_checks(rng, n: int, cs=(6.0, 10.0), ratio: float = 10.0):
    """Improvement factor err(c_0)/err(c_1) of the three coefficient limits."""
    xi = draw_spectral(rng, n)
    x = draw_position(rng, n)
    g = float(rng.uniform(0, 2))
    c0, c1 = cs

    def rel_err(c, cs_value, limit, exponent):
        return abs(math.exp(-c / 2 * exponent) * cs_value - limit) / abs(limit)

    out = []
    for size in range(1, n + 1):
        for eJ in signed_subsets(range(n), size):
            lim = coeff_V(eJ, xi, g)
            e = [rel_err(c, cs_coeff_V(eJ, xi, coupling_schedule(c, g)), lim, size * (2 * n + 1 - size)) for c in cs]
            out.append(_record("confluence", f"V limit J={tuple(j + 1 for j in eJ.J)} eps={eJ.eps} (n={n})", "e^{-c|J|(2n+1-|J|)/2} V^cs -> V",
                               e[0] / e[1], ratio, bound=e[1], below=False, n=n, xi=xi, g=g))
    for size in range(1, n + 1):
        for K in itertools.combinations(range(n), size):
            for p in range(1, size + 1):
                lim = coeff_U(K, p, xi, g)
                e = [rel_err(c, cs_coeff_U(K, p, xi, coupling_schedule(c, g)), lim, p * (2 * size + 1 - p)) for c in cs]
                out.append(_record("confluence", f"U limit K={tuple(k + 1 for k in K)} p={p} (n={n})", "e^{-cp(2|K|+1-p)/2} U^cs -> U",
                                   e[0] / e[1], ratio, bound=e[1], below=False, n=n, xi=xi, g=g))
    rho = tuple(n - j for j in range(n))
    for ell in range(1, n + 1):
        lim = math.exp(sum(x[:ell]))
        e = [rel_err(c, E_ell(ell, tuple(a + c * r for a, r in zip(x, rho))), lim, ell * (2 * n + 1 - ell)) for c in cs]
        out.append(_record("confluence", f"E limit l={ell} (n={n})", "e^{-cl(2n+1-l)/2} E_l(x+c rho) -> e^{x_1+...+x_l}",
                           e[0] / e[1], ratio, bound=e[1], below=False, n=n, x=x))
    return out


def run_suite(name: str, **overrides):
    fn = {
        "pde": suite_pde,
        "dde": suite_dde,
        "univariate": suite_univariate,
        "residues": suite_residues,
        "confluence": suite_confluence,
        "counts": suite_counts,
    }[name]
    return fn(**overrides)
