"""Mollified moments and counting nonvanishing central values by angle.

    M_L(chi) = sum_{l <= L} mu(l) chi(l) l^{-1/2} P(log(L/l) / log L)

with P(0) = 0 and P(1) = 1 (default P(X) = X^2).  For an interval I of
Gauss-sum angles, Cauchy-Schwarz with a minorant 0 <= phi <= 1_I gives

    |D|^2 / Q_4 <= E / (q-1),
    D = (q-1)^{-1} sum L(chi^a) L(chi^b) M_L(chi^a) M_L(chi^b) phi(theta(chi)),

where E counts non-trivial chi with theta(chi) in I and both central values
nonzero.  Values below tau_0 = 1e-8 sqrt(log q) count as zeros, and the
same characters are dropped from D, so the inequality is exact.
"""

import math

import numpy as np
from numpy.polynomial import Polynomial

from ..errors import BadMinorant, BadPolynomial, DomainError
from ..ffield import angle_table, gauss_sum_table
from .lvalues import central_values

DEFAULT_P = Polynomial([0.0, 0.0, 1.0])


def mobius(N):
    """mu(n) for n = 0..N by a linear sieve."""
    mu = np.ones(N + 1, dtype=np.int64)
    mu[0] = 0
    is_comp = np.zeros(N + 1, dtype=bool)
    primes = []
    for i in range(2, N + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > N:
                break
            is_comp[i * p] = True
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu


def _check_poly(P):
    P = DEFAULT_P if P is None else P
    if not isinstance(P, Polynomial):
        P = Polynomial(P)
    if abs(P(0.0)) > 1e-12 or abs(P(1.0) - 1.0) > 1e-12:
        raise BadPolynomial("need P(0) = 0 and P(1) = 1")
    return P


def _coefficients(L, P, exponent=0.5):
    """Indices l <= L and the weights mu(l) l^{-exponent} P(log(L/l)/log L)."""
    if L < 1:
        raise DomainError("need L >= 1")
    if L < 2:
        # only l = 1 survives and P(1) = 1
        return np.array([1]), np.array([1.0])
    top = int(math.floor(L))
    l = np.arange(1, top + 1)
    mu = mobius(top)[1:]
    return l, mu * l ** (-exponent) * P(np.log(L / l) / math.log(L))


def mollifier_values(ctx, L, P=None):
    """M_L(chi_j) for all j, as one transform over the log index."""
    P = _check_poly(P)
    l, c = _coefficients(L, P)
    keep = l % ctx.q != 0
    n = ctx.q - 1
    w = np.bincount(ctx.dlog[l[keep] % ctx.q], c[keep], n).astype(complex)
    from ..transform import dft
    return dft(w, +1)


def mobius_log_sum(L, P=None, exponent=1.0):
    """sum_{l <= L} mu(l) l^{-exponent} P(log(L/l)/log L)."""
    P = _check_poly(P)
    _, c = _coefficients(L, P, exponent)
    return float(c.sum())


def _products(ctx, a, b, L, P):
    n = ctx.q - 1
    j = np.arange(n)
    Lv = central_values(ctx)
    M = mollifier_values(ctx, L, P)
    la, lb = Lv[(a * j) % n], Lv[(b * j) % n]
    return la, lb, la * lb * M[(a * j) % n] * M[(b * j) % n]


def mollified_moment(ctx, a, b, k, L, P=None):
    n = ctx.q - 1
    _, _, prod = _products(ctx, a, b, L, P)
    return complex(np.sum(prod[1:] * gauss_sum_table(ctx)[1:] ** k) / n)


def q4_moment(ctx, a, b, L, P=None):
    """(q-1)^{-1} sum over all chi of |L L M M|^2."""
    _, _, prod = _products(ctx, a, b, L, P)
    return float(np.sum(np.abs(prod) ** 2) / (ctx.q - 1))


def _in_interval(theta, lo, hi):
    if lo < hi:
        return (theta > lo) & (theta <= hi)
    return (theta > lo) | (theta <= hi)


def default_tau0(q):
    return 1e-8 * math.sqrt(math.log(q))


def _nonzero_mask(ctx, a, b, interval, tau0):
    n = ctx.q - 1
    j = np.arange(n)
    Lv = central_values(ctx)
    tau0 = default_tau0(ctx.q) if tau0 is None else tau0
    nz = (np.abs(Lv[(a * j) % n]) > tau0) & (np.abs(Lv[(b * j) % n]) > tau0)
    th = angle_table(ctx)
    mask = np.zeros(n, dtype=bool)
    mask[1:] = nz[1:] & _in_interval(th[1:], *interval)
    return mask


def nonvanishing_count(ctx, a, b, interval, tau0=None):
    lo, hi = interval
    if not (-math.pi <= lo <= math.pi and -math.pi <= hi <= math.pi):
        raise DomainError("interval endpoints must lie in [-pi, pi]")
    return int(_nonzero_mask(ctx, a, b, interval, tau0).sum())


def minorant(interval, margin=0.0, check=True):
    """Raised-cosine bump supported inside the interval (lo, hi].

    Wrapping intervals (lo >= hi) go through pi.  The result is validated
    on a grid of 10^4 angles against 0 <= phi <= 1_I.
    """
    lo, hi = interval
    width = (hi - lo) % (2 * math.pi) or 2 * math.pi
    half = width / 2 - margin
    if half <= 0:
        raise BadMinorant("margin leaves an empty support")
    centre = lo + width / 2

    def phi(theta):
        d = (np.asarray(theta, dtype=float) - centre + math.pi) % (2 * math.pi) - math.pi
        return np.where(np.abs(d) < half, 0.5 * (1 + np.cos(math.pi * d / half)), 0.0)

    if check:
        check_minorant(phi, interval)
    return phi


def check_minorant(phi, interval):
    grid = np.linspace(-math.pi, math.pi, 10_000)
    vals = np.asarray(phi(grid), dtype=float) * np.ones_like(grid)
    inside = _in_interval(grid, *interval)
    if np.any(vals < -1e-15) or np.any(vals > 1 + 1e-15) or np.any(vals[~inside] > 0):
        raise BadMinorant("minorant exceeds the indicator")


def certificate(ctx, a, b, L, interval, P=None, margin=0.0, tau0=None, phi=None):
    """Cauchy-Schwarz nonvanishing certificate; returns a dict of its parts.

    phi defaults to the raised-cosine minorant of the interval; a supplied
    phi is validated on the same grid.
    """
    n = ctx.q - 1
    if phi is None:
        phi = minorant(interval, margin)
    else:
        check_minorant(phi, interval)
    mask = _nonzero_mask(ctx, a, b, interval, tau0)
    _, _, prod = _products(ctx, a, b, L, P)
    th = angle_table(ctx)
    weights = np.zeros(n)
    weights[mask] = np.asarray(phi(th[mask]), dtype=float) * np.ones(int(mask.sum()))
    D = complex(np.sum(prod * weights) / n)
    Q4 = float(np.sum(np.abs(prod) ** 2) / n)
    E = int(mask.sum())
    cert = abs(D) ** 2 / Q4 if Q4 > 0 else 0.0
    return {"D": D, "Q4": Q4, "certificate": cert, "E": E, "bound": E / n,
            "holds": cert <= E / n * (1 + 1e-12)}


def trivial_solution_count(l1, l2, b, q):
    """#{(m, n) : m n^b l2^b = l1, m n <= q} over positive integers."""
    if b == 0:
        raise DomainError("b must be nonzero")
    count = 0
    nv = 1
    while True:
        if b > 0:
            den = (nv * l2) ** b
            if den > l1:
                break
            if l1 % den == 0 and (l1 // den) * nv <= q:
                count += 1
        else:
            m = l1 * (nv * l2) ** (-b)
            if m * nv > q:
                break
            count += 1
        nv += 1
    return count
