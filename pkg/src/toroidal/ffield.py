"""Prime field context, multiplicative characters and Gauss sums.

A ``FieldContext`` fixes a prime q, the smallest primitive root g and the
discrete logarithm table.  Characters are indexed by j in Z/(q-1):

    chi_j(g^m) = exp(2*pi*i*j*m/(q-1)),    chi_j(0) = 0,

so chi_0 is the trivial character, chi_j(-1) = (-1)^j and the Legendre
symbol is chi_{(q-1)/2}.  Gauss sums are normalized to modulus one:

    eps(chi) = q^{-1/2} sum_{c mod q} chi(c) exp(2*pi*i*c/q).
"""

from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np

from .errors import ContextMismatch, NonUnitGaussSum, NotPrime, TooLarge, TrivialCharacter
from .transform import dft

MAX_Q = 2_000_000


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = math.isqrt(n)
    for p in range(3, r + 1, 2):
        if n % p == 0:
            return False
    return True


def prime_factors(n):
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def smallest_primitive_root(q):
    if q == 2:
        return 1
    ps = prime_factors(q - 1)
    for g in range(2, q):
        if all(pow(g, (q - 1) // p, q) != 1 for p in ps):
            return g
    raise NotPrime(q)


@dataclass(frozen=True, eq=False)
class FieldContext:
    q: int
    g: int
    dlog: np.ndarray = field(repr=False)   # dlog[x] for x in 1..q-1, dlog[0] = -1
    power: np.ndarray = field(repr=False)  # power[m] = g^m mod q
    roots: np.ndarray = field(repr=False)  # exp(2 pi i j/(q-1))
    addroots: np.ndarray = field(repr=False)  # exp(2 pi i c/q)

    @property
    def order(self):
        return self.q - 1

    def idx(self, j):
        return int(j) % (self.q - 1)

    def inv(self, x):
        return pow(int(x) % self.q, -1, self.q)

    def residue(self, a):
        return int(a) % self.q

    def power_residue(self, x, e):
        """x^e mod q for a unit x and any integer e."""
        x = int(x) % self.q
        if x == 0:
            raise ZeroDivisionError("power of zero")
        return pow(x, int(e), self.q)

    def check(self, other):
        if other.q != self.q:
            raise ContextMismatch(f"q={self.q} vs q={other.q}")

    def __eq__(self, other):
        return isinstance(other, FieldContext) and other.q == self.q

    def __hash__(self):
        return hash(self.q)


@lru_cache(maxsize=64)
def build_context(q, max_q=MAX_Q):
    q = int(q)
    if q > max_q:
        raise TooLarge(f"q={q} exceeds bound {max_q}")
    if not is_prime(q):
        raise NotPrime(q)
    g = smallest_primitive_root(q)
    n = q - 1
    power = np.empty(n, dtype=np.int64)
    x = 1
    for m in range(n):
        power[m] = x
        x = x * g % q
    dlog = np.full(q, -1, dtype=np.int64)
    dlog[power] = np.arange(n, dtype=np.int64)
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    addroots = np.exp(2j * np.pi * np.arange(q) / q)
    for arr in (power, dlog, roots, addroots):
        arr.setflags(write=False)
    return FieldContext(q, g, dlog, power, roots, addroots)


def e_q(ctx, x):
    """exp(2 pi i x/q) for integer x (array or scalar)."""
    return ctx.addroots[np.asarray(x, dtype=np.int64) % ctx.q]


@dataclass(frozen=True)
class DirichletCharacter:
    ctx: FieldContext
    j: int

    def __post_init__(self):
        object.__setattr__(self, "j", int(self.j) % (self.ctx.q - 1))

    @property
    def is_trivial(self):
        return self.j == 0

    @property
    def parity(self):
        """0 if chi(-1) = 1, else 1."""
        return self.j % 2 if self.ctx.q > 2 else 0

    def __call__(self, x):
        x = np.asarray(x, dtype=np.int64) % self.ctx.q
        m = self.ctx.dlog[x]
        vals = self.ctx.roots[(self.j * m) % (self.ctx.q - 1)]
        vals = np.where(x == 0, 0.0, vals)
        return vals if vals.ndim else complex(vals)

    def values(self):
        """chi(x) for x = 0..q-1."""
        return self(np.arange(self.ctx.q))

    def __mul__(self, other):
        self.ctx.check(other.ctx)
        return DirichletCharacter(self.ctx, self.j + other.j)

    def __pow__(self, e):
        return DirichletCharacter(self.ctx, self.j * int(e))

    def conj(self):
        return DirichletCharacter(self.ctx, -self.j)


def character(ctx, j):
    return DirichletCharacter(ctx, j)


@lru_cache(maxsize=64)
def _gauss_table(q):
    ctx = build_context(q)
    # eps(chi_j) = q^{-1/2} sum_m e(jm/(q-1)) e(g^m/q)
    seq = ctx.addroots[ctx.power]
    tab = dft(seq, +1) / math.sqrt(q)
    tab.setflags(write=False)
    return tab


def gauss_sum_table(ctx):
    """eps(chi_j) for j = 0..q-2 in one transform."""
    return _gauss_table(ctx.q)


def gauss_sum(chi):
    return complex(gauss_sum_table(chi.ctx)[chi.j])


def gauss_sum_naive(chi):
    c = np.arange(chi.ctx.q)
    return complex(np.sum(chi(c) * e_q(chi.ctx, c)) / math.sqrt(chi.ctx.q))


def gauss_angle(chi, tol=1e-9):
    """Principal argument of eps(chi) in (-pi, pi]."""
    if chi.is_trivial:
        raise TrivialCharacter("the angle of the trivial character is undefined")
    eps = gauss_sum(chi)
    if abs(abs(eps) - 1.0) > tol:
        raise NonUnitGaussSum(f"|eps(chi_{chi.j})| = {abs(eps)}")
    th = math.atan2(eps.imag, eps.real)
    return math.pi if th <= -math.pi else th


def angle_table(ctx):
    """Principal angles for all non-trivial characters (index 0 is nan)."""
    th = np.angle(gauss_sum_table(ctx))
    th = np.where(th <= -np.pi, np.pi, th)
    th = np.array(th)
    th[0] = np.nan
    th.setflags(write=False)
    return th
