"""Shared domain types: spectral and position points, the dominance cone,
the hyperoctahedral group of signed permutations and the two root data.

Cone vectors nu in Z^n with nu_1 + ... + nu_k >= 0 for all k are graded by
the level <nu, rho>, rho = (n, n-1, ..., 1).  Writing s_k for the partial
sums, the level equals s_1 + ... + s_n, so the vectors of level m are in
bijection with weak compositions of m into n parts and there are
binom(n + m - 1, m) of them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from ._arith import dist_to_integers
from .errors import ChamberViolation

DEFAULT_ETA = 1e-9


def rho(n: int) -> np.ndarray:
    return np.arange(n, 0, -1)


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralPoint:
    """A spectral (wave) vector xi in C^n."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        if len(entries) < 1:
            raise ValueError("a spectral point needs n >= 1 entries")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, xi) -> "SpectralPoint":
        if isinstance(xi, cls):
            return xi
        if np.isscalar(xi):
            xi = [xi]
        return cls(tuple(complex(z) for z in xi))

    @property
    def n(self) -> int:
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, j):
        return self.entries[j]

    def __add__(self, shift):
        return SpectralPoint(tuple(a + b for a, b in zip(self.entries, shift)))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=complex)

    def regularity(self, eta: float = DEFAULT_ETA) -> "Regularity":
        return classify_spectral(self.entries, eta)


@dataclass(frozen=True)
class PositionPoint:
    """Particle positions x in C^n.

    With ``chamber=True`` the entries must be real with x_1 > ... > x_n > 0.
    """

    entries: tuple
    chamber: bool = False

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if self.chamber:
            check_chamber(entries)

    @classmethod
    def of(cls, x, chamber: bool = False) -> "PositionPoint":
        if isinstance(x, cls):
            if chamber and not x.chamber:
                check_chamber(x.entries)
            return x
        if np.isscalar(x):
            x = [x]
        return cls(tuple(complex(z) for z in x), chamber)

    @property
    def n(self) -> int:
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=complex)


def check_chamber(x) -> None:
    xs = [complex(v) for v in x]
    if any(abs(v.imag) > 0 for v in xs):
        raise ChamberViolation(f"chamber points must be real, got {x}")
    re = [v.real for v in xs] + [0.0]
    if any(re[k] <= re[k + 1] for k in range(len(xs))):
        raise ChamberViolation(f"need x_1 > x_2 > ... > x_n > 0, got {[v.real for v in xs]}")


@dataclass(frozen=True)
class Regularity:
    """Distances of xi to the excluded integer lattices.

    ``margin_plus`` refers to the conditions 2 xi_j, xi_j +- xi_k not in
    Z_{>0}; ``margin_minus`` to the same quantities not in Z_{<=0}.
    """

    margin_plus: float
    margin_minus: float
    eta: float

    @property
    def margin(self) -> float:
        return min(self.margin_plus, self.margin_minus)

    @property
    def regular(self) -> bool:
        return self.margin > self.eta

    @property
    def regular_plus(self) -> bool:
        return self.margin_plus > self.eta

    @property
    def regular_minus(self) -> bool:
        return self.margin_minus > self.eta

    @property
    def near_singular(self) -> bool:
        return not self.regular


def _regularity_arguments(xi) -> list:
    xi = [complex(z) for z in xi]
    args = [2 * z for z in xi]
    for j, k in itertools.combinations(range(len(xi)), 2):
        args.append(xi[j] + xi[k])
        args.append(xi[j] - xi[k])
    return args


def classify_spectral(xi, eta: float = DEFAULT_ETA) -> Regularity:
    args = _regularity_arguments(xi)
    plus = min(dist_to_integers(a, positive=True) for a in args)
    minus = min(dist_to_integers(a, nonpositive=True) for a in args)
    return Regularity(plus, minus, eta)


def regular_margin(xi) -> float:
    """Distance of xi to the excluded hyperplanes of the regular domain."""
    return min(dist_to_integers(a) for a in _regularity_arguments(xi))


# ---------------------------------------------------------------------------
# the dominance cone
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConeVector:
    entries: tuple

    def __post_init__(self):
        entries = tuple(int(v) for v in self.entries)
        object.__setattr__(self, "entries", entries)
        if not is_dominant(entries):
            raise ValueError(f"{entries} is not in the dominance cone")

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def level(self) -> int:
        return level_of(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, j):
        return self.entries[j]

    def __sub__(self, other):
        return tuple(a - b for a, b in zip(self.entries, other))


def is_dominant(nu: Sequence[int]) -> bool:
    s = 0
    for v in nu:
        s += v
        if s < 0:
            return False
    return True


def level_of(nu: Sequence[int]) -> int:
    n = len(nu)
    return sum((n - j) * int(v) for j, v in enumerate(nu))


def _compositions(m: int, parts: int):
    if parts == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in _compositions(m - first, parts - 1):
            yield (first,) + rest


def _level_vectors(n: int, m: int) -> list[tuple]:
    out = []
    for s in _compositions(m, n):
        out.append(tuple(s[k] - (s[k - 1] if k else 0) for k in range(n)))
    out.sort()
    return out


def cone_enumerate(n: int, M: int) -> dict[int, list[ConeVector]]:
    """Dominant vectors of every level 0..M, each level in lexicographic order."""
    if n < 1 or M < 0:
        raise ValueError("need n >= 1 and M >= 0")
    return {m: [ConeVector(v) for v in _level_vectors(n, m)] for m in range(M + 1)}


@dataclass(frozen=True, eq=False)
class ConeIndex:
    """Flat canonical numbering of all cone vectors up to level M.

    Row ``i`` of ``nus`` is the i-th vector; level m occupies the slice
    ``offsets[m]:offsets[m+1]``.  Index ``size`` (one past the end) is a
    sentinel used for vectors outside the cone.
    """

    n: int
    M: int
    nus: np.ndarray
    levels: np.ndarray
    offsets: np.ndarray
    lookup: dict = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.nus)

    def level_slice(self, m: int) -> slice:
        return slice(int(self.offsets[m]), int(self.offsets[m + 1]))

    def index(self, nu) -> int:
        return self.lookup.get(tuple(int(v) for v in nu), self.size)

    def shifted(self, shift) -> np.ndarray:
        """Index of nu - shift for every nu, or the sentinel if outside."""
        return _shifted_index(self, tuple(int(v) for v in shift))

    def norms(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.nus, self.nus)


@lru_cache(maxsize=64)
def cone_index(n: int, M: int) -> ConeIndex:
    vecs, levels, offsets = [], [], [0]
    for m in range(M + 1):
        level = _level_vectors(n, m)
        vecs.extend(level)
        levels.extend([m] * len(level))
        offsets.append(len(vecs))
    nus = np.array(vecs, dtype=np.int64).reshape(-1, n)
    lookup = {v: i for i, v in enumerate(vecs)}
    return ConeIndex(n, M, nus, np.array(levels), np.array(offsets), lookup)


_SHIFT_CACHE: dict = {}


def _shifted_index(index: ConeIndex, shift: tuple) -> np.ndarray:
    key = (id(index), shift)
    hit = _SHIFT_CACHE.get(key)
    if hit is not None:
        return hit
    size = index.size
    out = np.full(size, size, dtype=np.int64)
    for i, nu in enumerate(index.nus):
        out[i] = index.lookup.get(tuple(int(a - b) for a, b in zip(nu, shift)), size)
    _SHIFT_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# signed permutations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignedPermutation:
    """w = (sigma, eps) acting by (w xi)_j = eps_j xi_{sigma(j)}.

    ``sigma`` is stored 0-based in one-line notation.
    """

    sigma: tuple
    eps: tuple

    def __post_init__(self):
        sigma = tuple(int(s) for s in self.sigma)
        eps = tuple(int(e) for e in self.eps)
        if sorted(sigma) != list(range(len(sigma))) or len(eps) != len(sigma):
            raise ValueError("sigma must be a permutation of 0..n-1 matching eps")
        if any(e not in (1, -1) for e in eps):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "eps", eps)

    @classmethod
    def identity(cls, n: int) -> "SignedPermutation":
        return cls(tuple(range(n)), (1,) * n)

    @property
    def n(self) -> int:
        return len(self.sigma)

    def act(self, xi):
        xi = tuple(xi)
        return tuple(e * xi[s] for e, s in zip(self.eps, self.sigma))

    def __call__(self, xi):
        return self.act(xi)

    def __matmul__(self, other: "SignedPermutation") -> "SignedPermutation":
        """Composition with (w @ v)(xi) == w(v(xi))."""
        sigma = tuple(other.sigma[s] for s in self.sigma)
        eps = tuple(e * other.eps[s] for e, s in zip(self.eps, self.sigma))
        return SignedPermutation(sigma, eps)

    def inverse(self) -> "SignedPermutation":
        n = self.n
        sigma = [0] * n
        eps = [1] * n
        for j, s in enumerate(self.sigma):
            sigma[s] = j
            eps[s] = self.eps[j]
        return SignedPermutation(tuple(sigma), tuple(eps))

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.int64)
        for j, (s, e) in enumerate(zip(self.sigma, self.eps)):
            out[j, s] = e
        return out

    def __str__(self):
        return "(" + ",".join(("-" if e < 0 else "") + str(s + 1) for s, e in zip(self.sigma, self.eps)) + ")"


@lru_cache(maxsize=None)
def group_enumerate(n: int) -> tuple[SignedPermutation, ...]:
    """All 2^n n! signed permutations: permutations in lexicographic one-line
    order, for each of them the sign vectors counted in binary (+ before -)."""
    if n < 1:
        raise ValueError("need n >= 1")
    out = []
    for sigma in itertools.permutations(range(n)):
        for eps in itertools.product((1, -1), repeat=n):
            out.append(SignedPermutation(sigma, eps))
    return tuple(out)


@lru_cache(maxsize=None)
def group_matrices(n: int) -> np.ndarray:
    return np.stack([w.matrix() for w in group_enumerate(n)])


def orbit(xi) -> np.ndarray:
    """Images w xi for all w in canonical order, shape (2^n n!, n)."""
    xi = np.asarray(tuple(xi))
    return np.einsum("wjk,k->wj", group_matrices(len(xi)), xi)


# ---------------------------------------------------------------------------
# root data
# ---------------------------------------------------------------------------


def _unit(n: int, j: int, scale: int = 1) -> tuple:
    return tuple(scale if i == j else 0 for i in range(n))


@dataclass(frozen=True)
class RootData:
    """Perturbation vectors S with Toda weights, and the positive BC_n roots."""

    n: int
    g: complex
    S: tuple
    weights: tuple
    positive_roots: tuple

    def weight(self, alpha) -> complex:
        return self.weights[self.S.index(tuple(alpha))]


def toda_perturbations(n: int) -> tuple:
    S = [tuple(1 if i == j else -1 if i == j + 1 else 0 for i in range(n)) for j in range(n - 1)]
    S.append(_unit(n, n - 1))
    S.append(_unit(n, n - 1, 2))
    return tuple(S)


def toda_weights(n: int, g) -> tuple:
    return (2,) * (n - 1) + (g, 0.25)


def bc_positive_roots(n: int) -> tuple:
    roots = []
    for j in range(n):
        roots.append(_unit(n, j))
        roots.append(_unit(n, j, 2))
    for j, k in itertools.combinations(range(n), 2):
        for sign in (-1, 1):
            roots.append(tuple(1 if i == j else sign if i == k else 0 for i in range(n)))
    return tuple(roots)


def root_data(n: int, g=0.0) -> RootData:
    return RootData(n, complex(g), toda_perturbations(n), toda_weights(n, g), bc_positive_roots(n))


def decompose_in_S(nu: Iterable[int]) -> tuple | None:
    """Nonnegative integer coefficients k with nu = sum_alpha k_alpha alpha.

    S is a basis of the cone up to the single relation 2 e_n = e_n + e_n,
    so the decomposition with no 2 e_n component is read off the partial
    sums directly.  Returns None when nu is not in the cone.
    """
    nu = tuple(int(v) for v in nu)
    if not is_dominant(nu):
        return None
    partial = list(itertools.accumulate(nu))
    return tuple(partial[:-1]) + (partial[-1], 0)
