"""Trace-function tables on F_q and the identities relating them.

Tables hold u -> f(u) for u in F_q^x together with a separately flagged
value at 0.  Multiplicative convolution

    (f * g)(u) = q^{-1/2} sum_{xy=u} f(x) g(y)

becomes cyclic convolution on Z/(q-1) after indexing by discrete log, so
every fast path is a product of transforms.  Each table also has a naive
path that works directly with residues and never uses the log table.

Normalizations:

    Kl_k(u)      = q^{-(k-1)/2} sum_{x_1...x_k = u} e_q(x_1+...+x_k)
    K_k^{a,b}(u) = q^{-(k+1)/2} sum_{x_1...x_k y_1^a y_2^b = u} e_q(sum x + y_1 + y_2)
    Hyp(u;chi,theta) = q^{-(r+t-1)/2} sum_{prod x / prod y = u}
                       e_q(sum x - sum y) prod chi_i(x_i) prod conj(theta_i)(y_i)

Values at 0 come from the defining sum, where variables carrying a negative
exponent range over units only.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DivisibilityViolation, DomainError, EmptyData, TooLarge, WeightBoundViolation
from .ffield import FieldContext, gauss_sum_table
from .multiset import CharacterMultiset, cancel, geometric_rank, rho
from .transform import dft, idft

NAIVE_MAX_Q = 5000


@dataclass(frozen=True, eq=False)
class TraceTable:
    ctx: FieldContext
    values: np.ndarray            # values[u-1] for u = 1..q-1
    value_at_zero: complex = None
    label: str = ""
    normalization: str = ""
    weight_bound: float = None    # declared sup bound on units, if any
    zero_flag: str = "defining-sum"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != (self.ctx.q - 1,):
            raise DomainError("table must have q-1 entries")
        if self.weight_bound is not None:
            sup = float(np.max(np.abs(self.values)))
            if sup > self.weight_bound * (1 + 1e-9) + 1e-9:
                raise WeightBoundViolation(f"{self.label}: sup {sup} > {self.weight_bound}")

    def __call__(self, u):
        u = np.asarray(u, dtype=np.int64) % self.ctx.q
        z = np.nan if self.value_at_zero is None else self.value_at_zero
        out = np.where(u == 0, z, self.values[np.maximum(u, 1) - 1])
        return out if out.ndim else complex(out)

    def dlog_order(self):
        """f(g^m) for m = 0..q-2."""
        return self.values[self.ctx.power - 1]

    def full(self):
        """f(u) for u = 0..q-1 (value at 0 becomes nan when undefined)."""
        z = np.nan if self.value_at_zero is None else self.value_at_zero
        return np.concatenate([[z], self.values])

    def sup(self):
        return float(np.max(np.abs(self.values)))


def _natural(ctx, arr):
    """Convert a log-indexed array to natural order values[u-1]."""
    return np.asarray(arr)[ctx.dlog[1:]]


def _check_naive(ctx):
    if ctx.q > NAIVE_MAX_Q:
        raise TooLarge(f"naive path limited to q <= {NAIVE_MAX_Q}")


def _naive_convolve(ctx, f, g):
    """Direct q^{-1/2} sum_{xy=u} f(x) g(y) on natural-order unit arrays."""
    q = ctx.q
    y = np.arange(1, q, dtype=np.int64)
    out = np.zeros(q, dtype=complex)
    for x in range(1, q):
        np.add.at(out, (x * y) % q, f[x - 1] * g)
    return out[1:] / math.sqrt(q)


def mult_convolve(f, g, naive=False, label=None):
    f.ctx.check(g.ctx)
    ctx = f.ctx
    if naive:
        _check_naive(ctx)
        vals = _naive_convolve(ctx, f.values, g.values)
    else:
        h = idft(dft(f.dlog_order()) * dft(g.dlog_order())) / math.sqrt(ctx.q)
        vals = _natural(ctx, h)
    return TraceTable(ctx, vals, None, label or f"({f.label})*({g.label})",
                      "q^{-1/2} sum_{xy=u}", zero_flag="undefined")


# ---------------------------------------------------------------- building blocks

def _eq_log(ctx):
    return ctx.addroots[ctx.power]


def _eq_natural(ctx):
    return ctx.addroots[1:]


def _fiber_log(ctx, a, mult=1):
    """sum_{y^a = g^m} e_q(mult*y) for m = 0..q-2."""
    n = ctx.q - 1
    idx = (a * np.arange(n, dtype=np.int64)) % n
    w = ctx.addroots[(mult * ctx.power) % ctx.q]
    return (np.bincount(idx, w.real, n) + 1j * np.bincount(idx, w.imag, n))


def _fiber_natural(ctx, a, mult=1):
    q = ctx.q
    out = np.zeros(q, dtype=complex)
    for y in range(1, q):
        out[pow(y, a, q)] += ctx.addroots[(mult * y) % q]
    return out[1:]


def _value_at_zero(sum_units, nvars_full, nvars_units, norm):
    """Defining sum at 0: total sum over the variable box minus the unit part."""
    total = 0.0 if nvars_full else (-1.0) ** nvars_units
    return total * norm - sum_units


# ---------------------------------------------------------------- tables

def kl_table(ctx, k, naive=False):
    if k < 1:
        raise DomainError("Kl_k needs k >= 1")
    q = ctx.q
    if naive:
        _check_naive(ctx)
        base = _eq_natural(ctx)
        vals = base.copy()
        for _ in range(k - 1):
            vals = _naive_convolve(ctx, vals, base)
    else:
        vals = _natural(ctx, idft(dft(_eq_log(ctx)) ** k)) * q ** (-(k - 1) / 2)
    norm = q ** (-(k - 1) / 2)
    z = _value_at_zero(vals.sum(), k, 0, norm)
    return TraceTable(ctx, vals, z, f"Kl_{k}", "q^{-(k-1)/2}", weight_bound=float(k),
                      meta={"kind": "kl", "k": k})


def k_ab_table(ctx, a, b, k, naive=False):
    """K_k^{a,b}(u); for k = 0 this is q^{-1/2} sum_{x^a y^b = u} e_q(x+y)."""
    if a == 0 or b == 0 or k < 0:
        raise DomainError("need a, b nonzero and k >= 0")
    q = ctx.q
    norm = q ** (-(k + 1) / 2)
    if naive:
        _check_naive(ctx)
        vals = _fiber_natural(ctx, a)
        for e in [b] + [1] * k:
            vals = _naive_convolve(ctx, vals, _fiber_natural(ctx, e))
    else:
        freq = dft(_fiber_log(ctx, a)) * dft(_fiber_log(ctx, b))
        if k:
            freq = freq * dft(_eq_log(ctx)) ** k
        vals = _natural(ctx, idft(freq)) * norm
    nfull = k + (a > 0) + (b > 0)
    nunits = (a < 0) + (b < 0)
    z = _value_at_zero(vals.sum(), nfull, nunits, norm)
    rank, degenerate = geometric_rank(a, b, k)
    return TraceTable(ctx, vals, z, f"K_{k}^{{{a},{b}}}", "q^{-(k+1)/2}",
                      weight_bound=None if degenerate else float(rank),
                      meta={"kind": "kab", "a": a, "b": b, "k": k})


def _hyp_factor_log(ctx, j, inverse):
    n = ctx.q - 1
    m = np.arange(n, dtype=np.int64)
    tw = ctx.roots[(j * m) % n]
    if inverse:
        # y = 1/z: conj(theta)(1/z) e_q(-1/z) = theta(z) e_q(-g^{-m})
        return tw * ctx.addroots[(-ctx.power[(-m) % n]) % ctx.q]
    return tw * ctx.addroots[ctx.power]


def hyp_table(ctx, chi, theta, naive=False):
    chi = chi if isinstance(chi, CharacterMultiset) else CharacterMultiset.of(ctx, chi)
    theta = theta if isinstance(theta, CharacterMultiset) else CharacterMultiset.of(ctx, theta)
    r, t = len(chi), len(theta)
    if r + t == 0:
        raise EmptyData("Hyp needs at least one character")
    q = ctx.q
    n = q - 1
    norm = q ** (-(r + t - 1) / 2)
    if naive:
        _check_naive(ctx)
        u = np.arange(1, q)
        factors = []
        for j in chi.indices:
            factors.append(ctx.roots[(j * ctx.dlog[u]) % n] * ctx.addroots[u])
        inv = np.array([pow(int(x), -1, q) for x in u])
        for j in theta.indices:
            # conj(theta)(y) psi(-y) as a function of y, re-indexed by z = 1/y
            by_y = np.conj(ctx.roots[(j * ctx.dlog[u]) % n]) * ctx.addroots[(-u) % q]
            factors.append(by_y[inv - 1])
        vals = factors[0]
        for f in factors[1:]:
            vals = _naive_convolve(ctx, vals, f)
    else:
        # transforms of twisted factors are shifts of one base transform
        freq = np.ones(n, dtype=complex)
        if r:
            base = dft(_hyp_factor_log(ctx, 0, False))
            for j in chi.indices:
                freq = freq * np.roll(base, j)
        if t:
            base = dft(_hyp_factor_log(ctx, 0, True))
            for j in theta.indices:
                freq = freq * np.roll(base, j)
        vals = _natural(ctx, idft(freq)) * norm
    c, th = cancel(chi, theta)
    bound = float(max(r, t)) if (c or th) else None
    z = 0.0 if r else None
    return TraceTable(ctx, vals, z, f"Hyp(chi={chi.indices},theta={theta.indices})",
                      "q^{-(r+t-1)/2}", weight_bound=bound,
                      meta={"kind": "hyp", "chi": chi.indices, "theta": theta.indices})


def fourier_transform(ctx, full_values, naive=True):
    """T^(u) = q^{-1/2} sum_{x in F_q} T(x) e_q(xu) for a length-q array."""
    T = np.asarray(full_values, dtype=complex)
    q = ctx.q
    if T.shape != (q,):
        raise DomainError("need values on all of F_q")
    if naive:
        _check_naive(ctx)
        x = np.arange(q)
        W = ctx.addroots[np.outer(x, x) % q]
        return W @ T / math.sqrt(q)
    return dft(T, +1) / math.sqrt(q)


# ---------------------------------------------------------------- identities

def hasse_davenport_residual(ctx, N):
    """Fit eps_N from the trivial character and return (eps_N, max residual)

    for -eps(psi_N, chi^N) = eps_N * prod_{rho^N = 1} eps(psi, chi rho),
    where eps(psi, chi) = q^{-1/2} sum_{x != 0} psi(x) chi(x) and
    psi_N(x) = psi(N x).
    """
    n = ctx.q - 1
    if N < 1 or n % N:
        raise DivisibilityViolation(f"N={N} must divide q-1={n}")
    q = ctx.q
    G = gauss_sum_table(ctx)
    # eps(psi_N, lambda) for every lambda, computed by its own transform
    GN = dft(ctx.addroots[(N * ctx.power) % q], +1) / math.sqrt(q)
    j = np.arange(n)
    lhs = -GN[(N * j) % n]
    step = n // N
    rhs = np.ones(n, dtype=complex)
    for i in range(N):
        rhs = rhs * G[(j + i * step) % n]
    eps_N = lhs[0] / rhs[0]
    return complex(eps_N), float(np.max(np.abs(lhs - eps_N * rhs)))


def power_fiber_relation(ctx, a):
    """Return (eps_a, residual) for -sum_{x^a=u} psi(a x) = eps_a * Hyp_a(u),

    where Hyp_a = Hyp(u; rho[a], {}) for a > 0 and Hyp(u; {}, rho[a]) for
    a < 0.  For a > 0 eps_a is the Hasse-Davenport constant; for a < 0 it is
    fitted from the trivial character, i.e. from the sums over u.
    """
    s = rho(ctx, a)
    empty = CharacterMultiset.of(ctx, [])
    H = hyp_table(ctx, s, empty) if a > 0 else hyp_table(ctx, empty, s)
    lhs = -_natural(ctx, _fiber_log(ctx, a, mult=a))
    if a > 0:
        eps, _ = hasse_davenport_residual(ctx, a)
    else:
        eps = complex(lhs.sum() / H.values.sum())
    return eps, float(np.max(np.abs(lhs - eps * H.values)))


def uncancelled_sets(ctx, a, b, k):
    """Character multisets attached to K_k^{a,b} before cancellation."""
    chi = CharacterMultiset.of(ctx, [0] * k)
    theta = CharacterMultiset.of(ctx, [])
    for e in (a, b):
        if e > 0:
            chi = chi + rho(ctx, e)
        else:
            theta = theta + rho(ctx, e)
    return chi, theta


def hyp_identity_residual(ctx, a, b, k):
    """max_u |K_k^{a,b}(a^a b^b u) - eps_a eps_b Hyp(u; chi, theta)|."""
    q = ctx.q
    if a % q == 0 or b % q == 0:
        raise DomainError("a and b must be units mod q")
    chi, theta = uncancelled_sets(ctx, a, b, k)
    ea, _ = power_fiber_relation(ctx, a)
    eb, _ = power_fiber_relation(ctx, b)
    K = k_ab_table(ctx, a, b, k)
    H = hyp_table(ctx, chi, theta)
    c = pow(a % q, a, q) * pow(b % q, b, q) % q
    u = np.arange(1, q, dtype=np.int64)
    return float(np.max(np.abs(K((c * u) % q) - ea * eb * H.values)))


def _power_units(ctx, x, e):
    """x^e mod q on an array of units via the log table."""
    n = ctx.q - 1
    return ctx.power[(e * ctx.dlog[np.asarray(x) % ctx.q]) % n]


def poisson_residual(ctx, a, b, k, xi=1):
    """Check the additive Fourier transform of x -> K_k^{a,b}(xi x^b).

    At x = 0 the function takes the defining-sum value K_k^{a,b}(0).  For a
    unit n the transform equals

        K_{k-1}^{a,1}(xi (-n)^{-b}) - q^{-1} sum_{x != 0} K_{k-1}^{a,1}(xi x^{-b})
            + q^{-1/2} K_k^{a,b}(0),

    which follows by rescaling the b-variable by x and summing the additive
    character over x in F_q^x.  Returns the maximum residual over units n.
    """
    if k < 1:
        raise DomainError("needs k >= 1")
    q = ctx.q
    xi = xi % q
    K = k_ab_table(ctx, a, b, k)
    K1 = k_ab_table(ctx, a, 1, k - 1)
    x = np.arange(1, q, dtype=np.int64)
    T = np.empty(q, dtype=complex)
    T[0] = K.value_at_zero
    T[1:] = K((xi * _power_units(ctx, x, b)) % q)
    lhs = fourier_transform(ctx, T, naive=q <= NAIVE_MAX_Q)[1:]
    avg = K1((xi * _power_units(ctx, x, -b)) % q).sum() / q
    rhs = K1((xi * _power_units(ctx, (-x) % q, -b)) % q) - avg + K.value_at_zero / math.sqrt(q)
    return float(np.max(np.abs(lhs - rhs)))


def degenerate_deviations(ctx):
    """Sup-norm deviations of the three degenerate tuples from their models.

    Returns (d3, c2, c1) with d3 = |K_3^{-1,-1} - e_q|, c2 = sqrt(q) |K_2^{-1,-1}
    - sqrt(q) delta_1| and c1 = q |K_1^{-1,1} - e_q(-.)|, so c2 and c1 are the
    implied constants of the error terms.
    """
    q = ctx.q
    u = np.arange(1, q)
    K3 = k_ab_table(ctx, -1, -1, 3).values
    d3 = float(np.max(np.abs(K3 - ctx.addroots[u])))
    K2 = k_ab_table(ctx, -1, -1, 2).values
    delta = np.where(u == 1, math.sqrt(q), 0.0)
    c2 = float(np.max(np.abs(K2 - delta)) * math.sqrt(q))
    K1 = k_ab_table(ctx, -1, 1, 1).values
    c1 = float(np.max(np.abs(K1 - ctx.addroots[(-u) % q])) * q)
    return d3, c2, c1
