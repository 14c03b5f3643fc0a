"""Smooth weights of the approximate functional equation.

    V(y) = (1/2 pi i) int_{(sigma)} y^{-u} G(u) du/u,
    G(u) = prod_{j in (t_a, t_b)} gamma_j(1/2 + u) / gamma_j(1/2),
    gamma_j(s) = pi^{-(s+j)/2} Gamma((s+j)/2),

where t_a, t_b in {0, 1} are the parities of chi^a and chi^b.  The
integrand is conjugate-symmetric in Im u, so V is real and only t >= 0 is
integrated, with fixed Gauss-Legendre panels vectorized over y.  For
y < 1 the contour is moved to Re u = -1/4, picking up the residue 1 at u=0.
"""

from functools import lru_cache
import math

import numpy as np
from scipy.special import loggamma

from ..errors import DomainError

T_MAX = 60.0
PANELS = 60
NODES = 16
CHUNK = 4096


@lru_cache(maxsize=8)
def _nodes():
    x, w = np.polynomial.legendre.leggauss(NODES)
    edges = np.linspace(0.0, T_MAX, PANELS + 1)
    h = np.diff(edges) / 2
    t = (edges[:-1, None] + h[:, None] * (x[None, :] + 1)).ravel()
    wt = (h[:, None] * w[None, :]).ravel()
    return t, wt


def _log_G(u, parities):
    out = np.zeros_like(u)
    for j in parities:
        out = out + (-(u) / 2) * math.log(math.pi) \
            + loggamma((0.5 + u + j) / 2) - loggamma((0.5 + j) / 2)
    return out


@lru_cache(maxsize=32)
def _kernel(sigma, par):
    """Nodes, weights and G(u)/u on the line Re u = sigma."""
    t, wt = _nodes()
    u = sigma + 1j * t
    return u, wt, np.exp(_log_G(u, par)) / u


def v_weight(y, ta=0, tb=0, sigma=None):
    """V(y) for parities (ta, tb); y may be an array of positive reals."""
    y = np.asarray(y, dtype=float)
    flat = y.ravel()
    if np.any(flat <= 0):
        raise DomainError("need y > 0")
    out = np.empty_like(flat)
    par = (int(ta), int(tb))
    if sigma is None:
        groups = [(flat < 1, -0.25), (flat >= 1, 1.0)]
    else:
        groups = [(np.ones(flat.shape, dtype=bool), float(sigma))]
    for sel, sig in groups:
        idx = np.nonzero(sel)[0]
        if idx.size == 0:
            continue
        u, wt, ker = _kernel(sig, par)
        for start in range(0, idx.size, CHUNK):
            ii = idx[start:start + CHUNK]
            phase = np.exp(-np.outer(np.log(flat[ii]), u))
            out[ii] = ((phase * ker).real @ wt) / math.pi + (sig < 0)
    return out.reshape(y.shape) if y.ndim else float(out[0])
