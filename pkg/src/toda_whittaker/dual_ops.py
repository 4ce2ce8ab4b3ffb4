"""Difference operators in the spectral variable and residue probes.

For a signed subset eps J (indices are 0-based here) the coefficients are

    V_{eps J} = prod_{j in J} (1/2 + g + eps_j xi_j) / (2 xi_j (2 xi_j + eps_j))
              * prod_{j in J, k not in J} (xi_j^2 - xi_k^2)^{-1}
              * prod_{j < j' in J} (eps_j xi_j + eps_j' xi_j')^{-1}
                                   (1 + eps_j xi_j + eps_j' xi_j')^{-1}

and U_{K,p} = (-1)^{p(p+1)/2} sum_{I subset K, |I| = p, signs} of the same
product with the cross factor running over k in K \\ I.  The operator

    D_l = sum_{|J| <= l, signs} U_{J^c, l-|J|} V_{eps J} T_{eps J}

has Phi_xi(x; g) as eigenfunction with eigenvalue exp(x_1 + ... + x_l).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ._arith import get_arith
from .connection import whittaker_eval
from .core import DEFAULT_ETA, SpectralPoint
from .errors import CoefficientPole, PrecisionExhausted
from .hc_series import TruncationPlan, phi_eval


@dataclass(frozen=True)
class SignedSubset:
    """J subset of {0, ..., n-1} with a sign per element."""

    J: tuple
    eps: tuple = field(default=None)

    def __post_init__(self):
        J = tuple(int(j) for j in self.J)
        eps = (1,) * len(J) if self.eps is None else tuple(int(e) for e in self.eps)
        if len(set(J)) != len(J) or len(eps) != len(J):
            raise ValueError("J must have distinct entries and one sign each")
        if any(e not in (1, -1) for e in eps):
            raise ValueError("signs must be +1 or -1")
        order = sorted(range(len(J)), key=J.__getitem__)
        object.__setattr__(self, "J", tuple(J[i] for i in order))
        object.__setattr__(self, "eps", tuple(eps[i] for i in order))

    def __len__(self):
        return len(self.J)

    def shift(self, n: int) -> tuple:
        """The vector e_{eps J} = sum_j eps_j e_j."""
        out = [0] * n
        for j, e in zip(self.J, self.eps):
            out[j] = e
        return tuple(out)

    def complement(self, n: int) -> tuple:
        return tuple(k for k in range(n) if k not in self.J)


def signed_subsets(indices: Sequence[int], size: int):
    for J in itertools.combinations(indices, size):
        for eps in itertools.product((1, -1), repeat=size):
            yield SignedSubset(J, eps)


def _check(value, eta, name):
    if abs(complex(value)) <= eta:
        raise CoefficientPole(f"vanishing factor {name} = {complex(value):.3g}", factor=name)
    return value


def _signed_product(J, eps, others, xi, g, eta):
    """The common product of V and U for signed indices (J, eps)."""
    out = 1
    for j, e in zip(J, eps):
        x = xi[j]
        out *= (0.5 + g + e * x) / (
            _check(2 * x, eta, f"2 xi_{j + 1}") * _check(2 * x + e, eta, f"2 xi_{j + 1} {e:+d}")
        )
        for k in others:
            out /= _check(x * x - xi[k] * xi[k], eta, f"xi_{j + 1}^2 - xi_{k + 1}^2")
    for (a, ea), (b, eb) in itertools.combinations(zip(J, eps), 2):
        s = ea * xi[a] + eb * xi[b]
        out /= _check(s, eta, f"{ea:+d} xi_{a + 1} {eb:+d} xi_{b + 1}")
        out /= _check(1 + s, eta, f"1 {ea:+d} xi_{a + 1} {eb:+d} xi_{b + 1}")
    return out


def _scalars(xi, g, prec):
    ar = get_arith(prec)
    return ar, [ar.scalar(z) for z in xi], ar.scalar(g)


def coeff_V(eJ: SignedSubset, xi, g, *, eta: float = DEFAULT_ETA, prec: int = 53):
    ar, xs, gg = _scalars(xi, g, prec)
    with ar.workprec():
        value = _signed_product(eJ.J, eJ.eps, eJ.complement(len(xs)), xs, gg, eta)
        return ar.scalar(value) if ar.extended else complex(value)


def coeff_U(K, p: int, xi, g, *, eta: float = DEFAULT_ETA, prec: int = 53):
    K = tuple(sorted(int(k) for k in K))
    if not 0 <= p <= len(K):
        raise ValueError(f"need 0 <= p <= |K| = {len(K)}, got {p}")
    ar, xs, gg = _scalars(xi, g, prec)
    with ar.workprec():
        parts = []
        for I in signed_subsets(K, p):
            rest = [k for k in K if k not in I.J]
            parts.append(ar.scalar(_signed_product(I.J, I.eps, rest, xs, gg, eta)))
        sign = -1 if (p * (p + 1) // 2) % 2 else 1
        value = sign * ar.fsum(parts)
        return value if ar.extended else complex(value)


class OperatorTerm(NamedTuple):
    subset: SignedSubset
    coefficient: complex


def operator_terms(ell: int, xi, g, *, eta: float = DEFAULT_ETA, prec: int = 53) -> list[OperatorTerm]:
    """(eps J, U_{J^c, l-|J|} V_{eps J}) for every shift of D_l."""
    n = len(tuple(xi))
    if not 1 <= ell <= n:
        raise ValueError(f"need 1 <= l <= n = {n}, got {ell}")
    ar = get_arith(prec)
    out = []
    with ar.workprec():
        for size in range(ell + 1):
            for eJ in signed_subsets(range(n), size):
                u = coeff_U(eJ.complement(n), ell - size, xi, g, eta=eta, prec=prec)
                v = coeff_V(eJ, xi, g, eta=eta, prec=prec)
                out.append(OperatorTerm(eJ, u * v))
    return out


def apply_D(ell: int, f: Callable, xi, g, *, eta: float = DEFAULT_ETA, prec: int = 53):
    """(D_l f)(xi); ``f`` is called with SpectralPoints xi + e_{eps J}."""
    xi = tuple(xi)
    n = len(xi)
    ar = get_arith(prec)
    terms = operator_terms(ell, xi, g, eta=eta, prec=prec)
    with ar.workprec():
        parts = []
        for t in terms:
            point = SpectralPoint(tuple(a + b for a, b in zip(xi, t.subset.shift(n))))
            parts.append(t.coefficient * f(point))
        value = ar.fsum(parts)
    return value if ar.extended else complex(value)


def identity_sum_rule(xi, g, *, eta: float = DEFAULT_ETA) -> complex:
    """U_{{1..n},1} + sum_{j, eps} V_{eps j}; vanishes identically."""
    n = len(tuple(xi))
    total = coeff_U(range(n), 1, xi, g, eta=eta)
    parts = [total] + [coeff_V(eJ, xi, g, eta=eta) for eJ in signed_subsets(range(n), 1)]
    return get_arith().fsum(parts)


class DDEResidual(NamedTuple):
    residual: float
    condition: float


def dde_residual(ell: int, xi, x, g, plan: TruncationPlan = TruncationPlan(), *, cache: dict | None = None) -> DDEResidual:
    """Relative defect of D_l Phi = exp(x_1 + ... + x_l) Phi.

    ``cache`` (shift -> Phi value) may be shared between calls at the same
    (xi, x, g, plan).  ``condition`` is sum |terms| / |right-hand side|.
    """
    xi = SpectralPoint.of(xi)
    x = tuple(x)
    n = xi.n
    cache = {} if cache is None else cache
    ar = plan.arith()

    def Phi(shift):
        if shift not in cache:
            point = tuple(a + b for a, b in zip(xi.entries, shift))
            cache[shift] = whittaker_eval(point, x, g, plan).value
        return cache[shift]

    terms = operator_terms(ell, xi.entries, g, eta=plan.eta, prec=plan.prec)
    with ar.workprec():
        parts = [t.coefficient * Phi(t.subset.shift(n)) for t in terms]
        lhs = ar.fsum(parts)
        rhs = ar.exp(sum(ar.scalar(v) for v in x[:ell])) * Phi((0,) * n)
        defect = abs(complex(lhs - rhs)) / abs(complex(rhs))
    cond = sum(abs(complex(p)) for p in parts) / abs(complex(rhs))
    return DDEResidual(float(defect), float(cond))


# ---------------------------------------------------------------------------
# residue probes
# ---------------------------------------------------------------------------


def richardson(deltas, values, arith=None):
    """Polynomial extrapolation of values(delta) to delta = 0 (Neville).

    For nodes delta, delta/2, delta/4 this is the Richardson tableau with
    ratio 2."""
    ar = arith or get_arith()
    hs = [ar.scalar(d) for d in deltas]
    p = list(values)
    k = len(p)
    for level in range(1, k):
        for i in range(k - level):
            h0, h1 = hs[i], hs[i + level]
            p[i] = (h0 * p[i + 1] - h1 * p[i]) / (h0 - h1)
    return p[0]


@dataclass(frozen=True)
class ResidueProbe:
    slope: float
    extrapolated_residue: complex
    deltas: tuple
    samples: tuple
    reference: complex
    condition: float

    def __iter__(self):
        return iter((self.slope, self.extrapolated_residue))


def hyperplane_factor(kind: str, m: int, xi):
    if kind == "single":
        return 2 * xi[0] - m
    if kind == "pair":
        return xi[0] + xi[1] - m
    raise ValueError(f"kind must be 'single' or 'pair', got {kind!r}")


def residue_probe(
    kind: str,
    m: int,
    xi_hat,
    x,
    g,
    deltas=(1e-3, 5e-4, 2.5e-4),
    plan: TruncationPlan = TruncationPlan(prec=128),
    *,
    target: str = "Phi",
    budget: float = 1e-10,
) -> ResidueProbe:
    """Probe r(delta) = factor(xi) F(xi) at xi = xi_hat + delta e_1.

    The factor is 2 xi_1 - m (kind "single") or xi_1 + xi_2 - m ("pair"),
    F is Phi (default) or the fundamental series ("phi").  Returns the
    fitted slope of log |r| against log delta and the extrapolated value
    at delta = 0.
    """
    if m <= 0:
        raise ValueError("m must be a positive integer")
    xi_hat = tuple(complex(z) for z in xi_hat)
    if abs(hyperplane_factor(kind, m, xi_hat)) > 1e-12:
        raise ValueError(f"xi_hat is not on the {kind} hyperplane for m = {m}")
    evaluate = {"Phi": whittaker_eval, "phi": phi_eval}[target]
    ar = plan.arith()
    deltas = tuple(float(d) for d in sorted(deltas, reverse=True))
    samples, conds = [], []
    with ar.workprec():
        for d in deltas:
            point = (ar.scalar(xi_hat[0]) + ar.scalar(d),) + tuple(ar.scalar(z) for z in xi_hat[1:])
            ev = evaluate(point, x, g, plan)
            samples.append(hyperplane_factor(kind, m, point) * ev.value)
            conds.append(ev.condition)
            if d == deltas[0]:
                reference = ev.value
        extrapolated = richardson(deltas, samples, ar)
    if conds[-1] * ar.eps > budget:
        raise PrecisionExhausted(
            f"condition {conds[-1]:.3g} at delta = {deltas[-1]:g} exceeds the {ar.prec}-bit budget",
            condition=conds[-1],
            prec=ar.prec,
        )
    logs = np.log([abs(complex(s)) for s in samples])
    slope = float(np.polyfit(np.log(deltas), logs, 1)[0])
    return ResidueProbe(slope, extrapolated, deltas, tuple(samples), reference, float(conds[-1]))
