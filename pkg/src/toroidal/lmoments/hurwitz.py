"""Hurwitz zeta function by Euler-Maclaurin summation.

zeta(s, x) = sum_{n<m} (n+x)^{-s} + (m+x)^{1-s}/(s-1) + (m+x)^{-s}/2
             + sum_{j=1}^{15} B_{2j}/(2j)! (s)_{2j-1} (m+x)^{-s-2j+1}

with shift m = 30 and the rising factorial (s)_r.  For 0 < x <= 1 and
moderate real s the tail after B_30 is far below 1e-12.
"""

import math

import numpy as np
from scipy.special import bernoulli

from ..errors import DomainError

SHIFT = 30
TERMS = 15
_B = bernoulli(2 * TERMS)


def hurwitz_zeta(s, x):
    if not s > 0 or s == 1:
        raise DomainError(f"need s > 0, s != 1, got {s}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(x > 1):
        raise DomainError("need 0 < x <= 1")
    n = np.arange(SHIFT, dtype=float)
    head = np.sum((x[..., None] + n) ** (-s), axis=-1)
    X = x + SHIFT
    tail = X ** (1 - s) / (s - 1) + 0.5 * X ** (-s)
    rising = s
    for j in range(1, TERMS + 1):
        tail = tail + _B[2 * j] / math.factorial(2 * j) * rising * X ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    out = head + tail
    return out if out.ndim else float(out)
