"""Twisted moments of central values and their approximate functional equation.

    M_{a,b,k}(xi; q) = (q-1)^{-1} sum_{chi != 1} chi(xi) L(1/2, chi^a) L(1/2, chi^b) eps(chi)^k

``afe_crosscheck`` rebuilds the same average from trace functions: the
first half of the functional equation produces Kl_k(xi^-1 m^-a n^-b), the
dual half produces K_k^{a,b}(xi^-1 m^a n^b), each split by the parity of chi.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
import os

import numpy as np

from ..errors import DomainError, ExcludedTuple
from ..ffield import build_context, gauss_sum_table
from ..tracefn import k_ab_table, kl_table
from .lvalues import central_values
from .weights import v_weight

V_CUTOFF = 12.0   # |V(y)| < 1e-17 beyond this point for all parities


def moment(ctx, a, b, k, xi=1, include_trivial=False, diagnostic=False):
    """(q-1)^{-1} sum over non-trivial chi of chi(xi) L(chi^a) L(chi^b) eps^k.

    ``diagnostic`` keeps only chi(xi), which orthogonality pins to
    (-1 + (q-1)[xi = 1]) / (q-1).
    """
    q = ctx.q
    n = q - 1
    if xi % q == 0:
        raise DomainError("xi must be a unit")
    j = np.arange(n)
    tw = ctx.roots[(j * ctx.dlog[xi % q]) % n]
    if diagnostic:
        return complex((tw.sum() if include_trivial else tw[1:].sum()) / n)
    L = central_values(ctx)
    G = gauss_sum_table(ctx)
    terms = tw * L[(a * j) % n] * L[(b * j) % n] * G ** k
    total = terms.sum() if include_trivial else terms[1:].sum()
    return complex(total / n)


def thread_count():
    try:
        return max(1, int(os.environ.get("TOROIDAL_THREADS", "1")))
    except ValueError:
        return 1


def moment_ladder(primes, a, b, k, xi=1):
    def one(q):
        return moment(build_context(q), a, b, k, xi)
    with ThreadPoolExecutor(thread_count()) as ex:
        return list(ex.map(one, primes))


def _pairs(ncut, q):
    m = np.repeat(np.arange(1, ncut + 1), ncut // np.arange(1, ncut + 1))
    counts = ncut // np.arange(1, ncut + 1)
    starts = np.cumsum(counts) - counts
    n = np.arange(m.size) - np.repeat(starts, counts) + 1
    keep = (m % q != 0) & (n % q != 0)
    return m[keep], n[keep]


@dataclass(frozen=True)
class AFECheck:
    direct: complex           # exact moment
    reconstructed: complex    # Kl / K-sum decomposition
    residual: float           # |direct - reconstructed|
    exceptional: complex      # contribution of chi = 1 and chi with chi^a or chi^b = 1
    exact_residual: float     # residual after treating those characters exactly


def afe_crosscheck(ctx, a, b, k, xi=1, X=None):
    """Rebuild M_{a,b,k}(xi; q) from trace-function sums.

    X and Y = q^2/X are the two lengths of the functional equation.  The
    decomposition averages the functional equation over every character,
    including the trivial one and the few with chi^a or chi^b trivial where
    it does not hold; their share is O(q^{-1/2}).  ``exact_residual`` swaps
    that share for the true values and isolates the quadrature error.
    """
    if k == 0:
        raise ExcludedTuple("k = 0 is handled by the direct moment only")
    if k < 0:
        raise DomainError("needs k >= 1")
    if (a, k) == (1, -1) or (a, k) == (-1, 1) or (b, k) == (-1, 1):
        raise ExcludedTuple("degenerate tuple")
    q = ctx.q
    nn = q - 1
    X = float(q if X is None else X)
    Y = q * q / X
    direct = moment(ctx, a, b, k, xi)

    ncut = int(V_CUTOFF * max(X, Y)) + 1
    m, n = _pairs(ncut, q)
    dm, dn = ctx.dlog[m % q], ctx.dlog[n % q]
    dxi = ctx.dlog[xi % q]
    half = nn // 2
    w = 1.0 / np.sqrt(m * n.astype(float))
    N = np.arange(1, ncut + 1)
    tau = (a % 2) + (b % 2)
    odd_par = (a % 2, b % 2)
    V = {}
    for par in {(0, 0), odd_par}:
        V[par] = (v_weight(N / X, *par)[m * n - 1], v_weight(N / Y, *par)[m * n - 1])

    Kl = kl_table(ctx, k).dlog_order()
    Kab = k_ab_table(ctx, a, b, k).dlog_order()
    i1 = (-dxi - a * dm - b * dn) % nn
    i2 = (-dxi + a * dm + b * dn) % nn
    kl_p, kl_m = Kl[i1], Kl[(i1 + half) % nn]
    k_p, k_m = Kab[i2], Kab[(i2 + half) % nn]

    total = 0j
    for sign, par in ((1, (0, 0)), (-1, odd_par)):
        vx, vy = V[par]
        first = np.sum(w * vx * (kl_p + sign * kl_m))
        dual = np.sum(w * vy * (k_p + sign * k_m))
        root = 1.0 if sign > 0 else (-1j) ** tau
        total += (first + root * dual) / (2 * math.sqrt(q))

    # the same functional-equation expression, character by character
    G = gauss_sum_table(ctx)
    Lv = central_values(ctx)
    phase = a * dm + b * dn
    special = [j for j in range(nn) if j == 0 or (a * j) % nn == 0 or (b * j) % nn == 0]
    fe_part = 0j
    true_part = 0j
    for j in special:
        odd = j % 2
        vx, vy = V[odd_par if odd else (0, 0)]
        chi_mn = ctx.roots[(j * phase) % nn]
        root = ((-1j) ** tau if odd else 1.0) * G[(a * j) % nn] * G[(b * j) % nn]
        F = np.sum(w * vx * chi_mn) + root * np.sum(w * vy * np.conj(chi_mn))
        wgt = ctx.roots[(j * dxi) % nn] * G[j] ** k
        fe_part += wgt * F / nn
        if j:
            true_part += wgt * Lv[(a * j) % nn] * Lv[(b * j) % nn] / nn
    exact = total - fe_part + true_part
    return AFECheck(direct, complex(total), abs(direct - total), complex(fe_part),
                    abs(direct - exact))
