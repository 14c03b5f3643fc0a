"""Finite multisets of multiplicative characters of F_q.

Characters are stored by their index mod q-1, so rho[a], the set of
characters whose a-th power is trivial, is {j : a*j = 0 mod q-1}.
"""

from collections import Counter
from dataclasses import dataclass

from .errors import DivisibilityViolation
from .ffield import FieldContext


@dataclass(frozen=True)
class CharacterMultiset:
    ctx: FieldContext
    counts: tuple  # sorted (index, multiplicity) pairs

    @classmethod
    def of(cls, ctx, indices):
        n = ctx.q - 1
        c = Counter(int(j) % n for j in indices)
        return cls(ctx, tuple(sorted(c.items())))

    @property
    def counter(self):
        return Counter(dict(self.counts))

    @property
    def indices(self):
        return [j for j, m in self.counts for _ in range(m)]

    def __len__(self):
        return sum(m for _, m in self.counts)

    def __bool__(self):
        return len(self) > 0

    def __add__(self, other):
        self.ctx.check(other.ctx)
        return CharacterMultiset.of(self.ctx, self.indices + other.indices)

    def __and__(self, other):
        return CharacterMultiset.of(self.ctx, (self.counter & other.counter).elements())

    def __sub__(self, other):
        return CharacterMultiset.of(self.ctx, (self.counter - other.counter).elements())

    def shift(self, eta):
        """eta * chi for a character index eta."""
        return CharacterMultiset.of(self.ctx, [j + eta for j in self.indices])

    def inverse(self):
        return CharacterMultiset.of(self.ctx, [-j for j in self.indices])

    def product_index(self):
        """Index of the product of all members."""
        return sum(self.indices) % (self.ctx.q - 1)

    def as_fractions(self):
        """Members as j/(q-1) in lowest terms, a field-independent label."""
        from fractions import Fraction
        n = self.ctx.q - 1
        return sorted(Fraction(j, n) for j in self.indices)

    def __repr__(self):
        return f"CharacterMultiset(q={self.ctx.q}, {self.indices})"


def rho(ctx, a):
    """rho[a] = {chi : chi^a = 1}; requires |a| to divide q-1."""
    a = abs(int(a))
    n = ctx.q - 1
    if a == 0 or n % a:
        raise DivisibilityViolation(f"{a} does not divide q-1={n}")
    step = n // a
    return CharacterMultiset.of(ctx, range(0, n, step))


def cancel(chi, theta):
    """Remove the common part of two multisets."""
    common = chi & theta
    return chi - common, theta - common


def geometric_sets(a, b, k):
    """Uncancelled data for K_k^{a,b} as Counters of fractions j/|e|.

    This is the description over the algebraic closure, independent of q.
    """
    from fractions import Fraction
    chi = Counter([Fraction(0)] * k)
    theta = Counter()
    for e in (a, b):
        (chi if e > 0 else theta).update(Fraction(i, abs(e)) for i in range(abs(e)))
    return chi, theta


def geometric_rank(a, b, k):
    """(max(r, t) before cancellation, whether everything cancels)."""
    chi, theta = geometric_sets(a, b, k)
    common = chi & theta
    degenerate = not (chi - common) and not (theta - common)
    return max(sum(chi.values()), sum(theta.values())), degenerate
