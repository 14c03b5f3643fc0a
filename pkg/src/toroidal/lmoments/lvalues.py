"""Central values L(1/2, chi_j) for every character mod q.

L(1/2, chi) = q^{-1/2} sum_{a=1}^{q-1} chi(a) zeta(1/2, a/q), evaluated for
all j at once as a transform over the discrete-log index.  Index 0 holds
the imprimitive value (1 - q^{-1/2}) zeta(1/2) given by the same sum.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from ..ffield import FieldContext, angle_table, build_context, gauss_sum_table
from ..transform import dft
from .hurwitz import hurwitz_zeta

# L(1/2, chi) = PHASE_SIGN * eps(chi) * i^(PHASE_POWER * kappa) * L(1/2, conj chi),
# pinned at q = 5 by pin_fe_phase
PHASE_SIGN = 1
PHASE_POWER = -1


@lru_cache(maxsize=32)
def _central(q):
    ctx = build_context(q)
    z = hurwitz_zeta(0.5, np.arange(1, q) / q)
    seq = z[ctx.power - 1]
    out = dft(seq, +1) / math.sqrt(q)
    out.setflags(write=False)
    return out


def central_values(ctx):
    return _central(ctx.q)


def central_values_naive(ctx, j):
    a = np.arange(1, ctx.q)
    chi = ctx.roots[(j * ctx.dlog[a]) % (ctx.q - 1)]
    return complex(np.sum(chi * hurwitz_zeta(0.5, a / ctx.q)) / math.sqrt(ctx.q))


def _fe_residuals(ctx, sign, power):
    L = central_values(ctx)
    G = gauss_sum_table(ctx)
    n = ctx.q - 1
    j = np.arange(1, n)
    kappa = j % 2
    rhs = sign * G[j] * (1j ** (power * kappa)) * L[(-j) % n]
    return np.abs(L[j] - rhs)


def pin_fe_phase(q=5, tol=1e-10):
    """Find the unique (sign, power) in {+-1}^2 fitting all characters mod q."""
    ctx = build_context(q)
    fits = [(s, p) for s in (1, -1) for p in (1, -1)
            if np.max(_fe_residuals(ctx, s, p)) < tol]
    if len(fits) != 1:
        raise RuntimeError(f"phase not pinned uniquely at q={q}: {fits}")
    return fits[0]


def fe_phase_residual(ctx, sign=PHASE_SIGN, power=PHASE_POWER):
    """max over non-trivial chi of the functional equation mismatch."""
    return float(np.max(_fe_residuals(ctx, sign, power)))


@dataclass(frozen=True)
class LValueTable:
    """Central values, Gauss sums, angles and parities indexed by j."""
    ctx: FieldContext
    L_half: np.ndarray
    eps: np.ndarray
    theta: np.ndarray
    parity: np.ndarray

    def rows(self):
        for j in range(1, self.ctx.q - 1):
            yield j, self.L_half[j], self.theta[j], int(self.parity[j])


def l_values_half(ctx):
    n = ctx.q - 1
    parity = np.arange(n) % 2
    parity.setflags(write=False)
    return LValueTable(ctx, central_values(ctx), gauss_sum_table(ctx),
                       angle_table(ctx), parity)
