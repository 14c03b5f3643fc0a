"""Type-I and smoothed bilinear sums of trace functions, and the Pierce oracle.

    S^I = sum_m alpha_m sum_{n in N} K(xi^{-1} m^{-a} n^{-b}),
    S   = sum_{m,n} K(xi^{-1} m^{-a} n^{-b}) U(m/M) U(n/N) V(mn/q),

with terms having q | mn skipped.  For the Pierce polynomial

    P_v(T) = sum_{i<=l} (T + v_i)^b - (T + v_{l+i})^b

over F_q, negative powers are read as the F_q-function x -> x^{q-1+b}, so
poles contribute 0; ``pole="exclude"`` instead drops any r with r+v_i = 0.
Under the default every r in F_q is used and

    Sigma(v) = sum_{r in F_q} sum_{s != 0} e_q(s P_v(r)) = q #{r : P_v(r) = 0} - q.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import BadShape, DomainError, MismatchedIdentity, NotGallantKernel
from .ffield import FieldContext, build_context
from .tracefn import TraceTable, k_ab_table, kl_table

DEFAULT_SEED = 20240601


# ---------------------------------------------------------------- weights

def bump(x):
    """Smooth bump supported on (1/2, 2), equal to 1 at x = 1."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0.5) & (x < 2.0)
    xi = x[inside]
    out[inside] = np.exp(1.5 - 1.0 / ((xi - 0.5) * (2.0 - xi)) * 0.75)
    return out


def sharp(x):
    """Indicator of (1, 2]."""
    x = np.asarray(x, dtype=float)
    return ((x > 1.0) & (x <= 2.0)).astype(float)


def one(x):
    return np.ones_like(np.asarray(x, dtype=float))


def tail_weight(y):
    """Even-parity weight of the functional equation."""
    from .lmoments.weights import v_weight
    return v_weight(np.asarray(y, dtype=float))


WEIGHTS = {"bump": bump, "sharp": sharp, "one": one, "afe": tail_weight}


@dataclass
class BilinearConfig:
    kernel: TraceTable
    a: int
    b: int
    M: float
    N: float
    xi: int = 1
    alpha: np.ndarray = None      # coefficients for m = floor(M)+1 .. floor(2M)
    n_start: int = None           # first element of the N consecutive integers
    U: str = "bump"
    V: str = "afe"
    context: FieldContext = None  # the field the sum is meant for, if stated
    meta: dict = field(default_factory=dict)

    @property
    def ctx(self):
        if self.context is not None:
            self.context.check(self.kernel.ctx)
        return self.kernel.ctx

    def m_range(self):
        return np.arange(int(math.floor(self.M)) + 1, int(math.floor(2 * self.M)) + 1)

    def n_range(self):
        start = int(math.floor(self.N)) + 1 if self.n_start is None else self.n_start
        return np.arange(start, start + int(round(self.N)))


def unit_coefficients(size, seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    return np.exp(2j * np.pi * rng.random(size))


def _kernel_at(cfg, m, n):
    ctx = cfg.ctx
    q = ctx.q
    nn = q - 1
    dm, dn = ctx.dlog[m % q], ctx.dlog[n % q]
    idx = (-ctx.dlog[cfg.xi % q] - cfg.a * dm - cfg.b * dn) % nn
    return cfg.kernel.dlog_order()[idx]


def type1_sum(cfg):
    """Return (S, S / (||alpha||_2 M^{1/2} N))."""
    q = cfg.ctx.q
    m = cfg.m_range()
    n = cfg.n_range()
    alpha = np.ones(m.size, dtype=complex) if cfg.alpha is None else np.asarray(cfg.alpha)
    if alpha.size != m.size:
        raise BadShape(f"need {m.size} coefficients, got {alpha.size}")
    if n.size == 0 or m.size == 0:
        return 0j, 0.0
    mm, nn_ = np.meshgrid(m, n, indexing="ij")
    keep = (mm % q != 0) & (nn_ % q != 0)
    vals = np.where(keep, _kernel_at(cfg, mm % q, nn_ % q), 0)
    S = complex(alpha @ vals.sum(axis=1))
    norm = np.linalg.norm(alpha) * math.sqrt(cfg.M) * cfg.N
    return S, abs(S) / norm if norm else 0.0


def type1_sum_loops(cfg):
    """The same sum with explicit loops and modular inverses."""
    q = cfg.ctx.q
    alpha = np.ones(cfg.m_range().size, dtype=complex) if cfg.alpha is None else cfg.alpha
    xinv = pow(cfg.xi % q, -1, q)
    S = 0j
    for n in cfg.n_range():
        if n % q == 0:
            continue
        for i, m in enumerate(cfg.m_range()):
            if m % q == 0:
                continue
            u = xinv * pow(int(m), -cfg.a, q) * pow(int(n), -cfg.b, q) % q
            S += alpha[i] * cfg.kernel(u)
    return complex(S)


def smooth_bilinear(cfg):
    q = cfg.ctx.q
    U, V = WEIGHTS[cfg.U], WEIGHTS[cfg.V]
    m = np.arange(max(1, int(cfg.M / 2)), int(2 * cfg.M) + 2)
    n = np.arange(max(1, int(cfg.N / 2)), int(2 * cfg.N) + 2)
    mm, nn_ = np.meshgrid(m, n, indexing="ij")
    keep = (mm % q != 0) & (nn_ % q != 0)
    w = U(mm / cfg.M) * U(nn_ / cfg.N) * V(mm * nn_ / q) * keep
    vals = np.where(keep, _kernel_at(cfg, mm % q, nn_ % q), 0)
    return complex(np.sum(w * vals))


# ---------------------------------------------------------------- Pierce oracle

@dataclass(frozen=True)
class PierceInstance:
    q: int
    l: int
    b: int
    v: tuple
    pole: str = "zero"

    def __post_init__(self):
        if len(self.v) != 2 * self.l:
            raise BadShape(f"need 2l = {2 * self.l} shifts")
        if self.l < 2 or not (self.b < 0 or self.b >= self.l):
            raise BadShape("need l >= 2 and b < 0 or b >= l")
        if self.q <= max(abs(self.b), 2 * self.l):
            raise BadShape("need q > max(|b|, 2l)")
        if self.pole not in ("zero", "exclude"):
            raise BadShape("pole must be 'zero' or 'exclude'")


def _power_table(q, b):
    """x^b on F_q with 0^b = 0 for b < 0 (the function x^(q-1+b))."""
    x = np.arange(q, dtype=np.int64)
    e = b if b > 0 else (q - 1 + b) % (q - 1) or (q - 1)
    out = np.array([pow(int(t), e, q) for t in x], dtype=np.int64)
    if b < 0:
        out[0] = 0
    return out


def _evaluate(q, l, b, V, pole):
    """P_v(r) for all r and a mask of usable r; V has shape (count, 2l)."""
    pw = _power_table(q, b)
    r = np.arange(q, dtype=np.int64)
    pts = (V[:, None, :] + r[None, :, None]) % q          # (count, q, 2l)
    vals = pw[pts]
    P = (vals[..., :l].sum(-1) - vals[..., l:].sum(-1)) % q
    if b < 0 and pole == "exclude":
        domain = np.all(pts != 0, axis=-1)
    else:
        domain = np.ones(P.shape, dtype=bool)
    return P, domain


def _matching(q, l, V):
    A = np.sort(V[:, :l] % q, axis=1)
    B = np.sort(V[:, l:] % q, axis=1)
    return np.all(A == B, axis=1)


def pierce_vanishes(inst):
    V = np.asarray([inst.v], dtype=np.int64)
    P, dom = _evaluate(inst.q, inst.l, inst.b, V, inst.pole)
    vanishes = bool(np.all((P == 0) | ~dom))
    return vanishes, bool(_matching(inst.q, inst.l, V)[0])


def pierce_exhaustive(q, l, b, pole="zero", chunk=200_000):
    """Check vanishes <=> matching over all v in [0, q)^{2l}.

    Returns (vectors checked, number of disagreements, first counterexample).
    """
    PierceInstance(q, l, b, tuple([0] * (2 * l)), pole)   # validates parameters
    total = q ** (2 * l)
    bad = 0
    first = None
    digits = q ** np.arange(2 * l, dtype=np.int64)
    for start in range(0, total, chunk):
        code = np.arange(start, min(total, start + chunk), dtype=np.int64)
        V = (code[:, None] // digits[None, :]) % q
        P, dom = _evaluate(q, l, b, V, pole)
        van = np.all((P == 0) | ~dom, axis=1)
        mat = _matching(q, l, V)
        diff = van != mat
        nb = int(diff.sum())
        if nb and first is None:
            first = tuple(int(x) for x in V[np.argmax(diff)])
        bad += nb
    return total, bad, first


def root_bound(inst):
    """Upper bound on #{r : P_v(r) = 0} when P_v is not identically zero."""
    if inst.b > 0:
        return inst.b - 1
    # numerator after clearing denominators, plus the pole points
    return abs(inst.b) * (2 * inst.l - 1) + 2 * inst.l


def sigma_v(inst, tol=1e-8):
    """Sigma(v): direct double sum against the root-count formula.

    Returns (value, roots, domain size).  The formula is
    q * #roots - #domain, which is q * #roots - q under the default
    pole convention.
    """
    q = inst.q
    V = np.asarray([inst.v], dtype=np.int64)
    P, dom = _evaluate(q, inst.l, inst.b, V, inst.pole)
    P, dom = P[0], dom[0]
    s = np.arange(1, q, dtype=np.int64)
    ctx = build_context(q)
    direct = complex(np.sum(ctx.addroots[(np.outer(P[dom], s)) % q]))
    roots = int(np.sum((P == 0) & dom))
    formula = q * roots - int(dom.sum())
    if abs(direct - formula) > tol * q * q:
        raise MismatchedIdentity(f"direct {direct} vs formula {formula}")
    return formula, roots, int(dom.sum())


# ---------------------------------------------------------------- decay profiles

def _eq_hypotheses(a, b):
    return (b <= -3 or b >= 1) and -1 not in (a, b) and (a, b) != (-2, -2)


def make_kernel(ctx, kind, a, b, k):
    """Build the kernel table for a decay profile after the gallant check."""
    from .sheafclass import classify, smallest_admissible_prime
    if kind == "eq":
        if not _eq_hypotheses(a, b):
            raise NotGallantKernel(f"e_q kernel needs b <= -3 or b >= 1, got b={b}")
        vals = ctx.addroots[1:]
        return TraceTable(ctx, vals.copy(), 1.0, "e_q", "1", weight_bound=1.0)
    if kind == "kl":
        tup = (1, 1, k - 2)
        table = kl_table(ctx, k)
    elif kind == "kab":
        tup = (a, b, k)
        base = k_ab_table(ctx, a, b, k)
        # the sums use u -> K(u^{-1})
        table = TraceTable(ctx, base.values[_inverse_index(ctx)], None,
                           base.label + "(1/u)", base.normalization)
    else:
        raise DomainError(f"unknown kernel kind {kind}")
    q0 = smallest_admissible_prime(*tup)
    v = classify(build_context(q0), *tup, fallback=False)
    if v.gallant != "yes":
        hint = "; the e_q kernel applies" if _eq_hypotheses(a, b) else ""
        raise NotGallantKernel(f"{tup} is not gallant ({v.exception or v.g0_label}){hint}")
    return table


def _inverse_index(ctx):
    q = ctx.q
    u = np.arange(1, q)
    inv = ctx.power[(-ctx.dlog[u]) % (q - 1)]
    return inv - 1


@dataclass
class DecayRow:
    q: int
    M: int
    N: int
    normalized: float
    fitted: float
    predicted: float


def predicted_exponent(kind, l):
    """Exponent of q in the normalized bound at M = N = q^{1/2}."""
    if kind == "eq":
        return (1 + 1 / l - 1.5) / (2 * l)
    return (1 + 3 / (2 * l) - 1.5) / (2 * l)


def decay_profile(a, b, k, kind, primes, draws=20, seed=DEFAULT_SEED, l=None, divisor=False):
    """Median normalized type-I sums over random unit coefficients.

    The exponent is a least-squares slope of log(normalized) against log q,
    reported next to the exponent the bounds predict.  With ``divisor`` the
    measured sum is sum_n d(n) U(n/N) e_q(xi n^{-a}) / (q N)^{1/2}.
    """
    l = l or (3 if kind == "eq" else 4)
    rows = []
    for q in primes:
        ctx = build_context(q)
        M = N = int(math.ceil(math.sqrt(q)))
        if divisor:
            val = _divisor_sum(ctx, a, N)
        else:
            kern = make_kernel(ctx, kind, a, b, k)
            meds = []
            for d in range(draws):
                cfg = BilinearConfig(kern, a, b, M, N,
                                     alpha=unit_coefficients(int(2 * M) - M, seed + d))
                meds.append(type1_sum(cfg)[1])
            val = float(np.median(meds))
        rows.append(DecayRow(q, M, N, val, float("nan"), predicted_exponent(kind, l)))
    if len(rows) >= 2:
        x = np.log([r.q for r in rows])
        y = np.log([max(r.normalized, 1e-300) for r in rows])
        slope = float(np.polyfit(x, y, 1)[0])
        for r in rows:
            r.fitted = slope
    return rows


def _divisor_sum(ctx, a, N):
    q = ctx.q
    n = np.arange(max(1, N // 2), 2 * N + 1)
    n = n[n % q != 0]
    d = np.array([sum(1 for t in range(1, int(math.isqrt(int(x))) + 1) if x % t == 0) * 2
                  - (math.isqrt(int(x)) ** 2 == x) for x in n])
    arg = ctx.power[(-a * ctx.dlog[n % q]) % (q - 1)]
    S = np.sum(d * bump(n / N) * ctx.addroots[arg])
    return float(abs(S) / math.sqrt(q * N))
