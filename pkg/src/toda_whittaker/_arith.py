"""Double and extended precision scalar backends.

Double precision uses complex128 arrays and ``math.fsum`` on the real and
imaginary parts.  Extended precision stores mpmath numbers in object arrays;
every operation must then run inside :meth:`Arith.workprec`.
"""

from __future__ import annotations

import contextlib
import math
from functools import lru_cache

import mpmath
import numpy as np
from scipy import special

DOUBLE = 53

_mp_exp = np.frompyfunc(mpmath.exp, 1, 1)


class Arith:
    def __init__(self, prec: int = DOUBLE):
        prec = int(prec)
        if prec < DOUBLE:
            raise ValueError(f"precision must be >= {DOUBLE} bits, got {prec}")
        self.prec = prec
        self.extended = prec > DOUBLE
        self.eps = 2.0 ** (1 - prec)

    def __repr__(self):
        return f"Arith(prec={self.prec})"

    def workprec(self):
        if self.extended:
            return mpmath.workprec(self.prec)
        return contextlib.nullcontext()

    def scalar(self, z):
        if self.extended:
            return mpmath.mpc(z)
        return complex(z)

    def array(self, values):
        if not self.extended:
            return np.asarray(values, dtype=complex)
        values = np.asarray(values, dtype=object)
        out = np.empty(values.shape, dtype=object)
        for idx, v in np.ndenumerate(values):
            out[idx] = mpmath.mpc(v)
        return out

    def zeros(self, shape):
        if not self.extended:
            return np.zeros(shape, dtype=complex)
        out = np.empty(shape, dtype=object)
        out.fill(mpmath.mpc(0))
        return out

    def exp(self, z):
        if self.extended:
            if isinstance(z, np.ndarray):
                return _mp_exp(z)
            return mpmath.exp(z)
        return np.exp(z)

    def loggamma(self, z):
        if self.extended:
            return mpmath.loggamma(z)
        return complex(special.loggamma(complex(z)))

    def fsum(self, values):
        """Compensated sum of a 1-d sequence of complex numbers."""
        if self.extended:
            return mpmath.fsum(values)
        values = np.asarray(values, dtype=complex)
        return complex(math.fsum(values.real), math.fsum(values.imag))

    def row_sums(self, matrix):
        """Compensated sum along the last axis of a 2-d array."""
        return [self.fsum(row) for row in matrix]

    def to_complex(self, z) -> complex:
        return complex(z)


@lru_cache(maxsize=None)
def get_arith(prec: int = DOUBLE) -> Arith:
    return Arith(prec)


def dist_to_integers(z, *, nonpositive=False, positive=False) -> float:
    """Distance from ``z`` to Z (or to Z_{<=0} / Z_{>0})."""
    z = complex(z)
    k = round(z.real)
    if nonpositive:
        k = min(k, 0)
    if positive:
        k = max(k, 1)
    return abs(z - k)
