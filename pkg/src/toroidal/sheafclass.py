"""Classification of the hypergeometric data attached to K_k^{a,b}.

Pipeline: character multisets -> cancellation -> Kummer / Belyi induction
tests -> Katz's theorems for one set or a pair -> candidate identity
components G^0 -> gallant verdict with the known exceptions -> fallback
(a, 1, k-1) when the tuple is not gallant.

Candidate groups are kept as sets whenever the theorems leave a choice.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import json
import math

from .errors import DomainError, InadmissiblePrime
from .ffield import build_context, is_prime
from .multiset import CharacterMultiset, cancel, geometric_sets, rho
from .tracefn import uncancelled_sets

# tuples whose monodromy is finite and solvable; (3,-4,1) and (-4,3,1) are
# both carried since the two published lists disagree
SOLVABLE = {(1, -2, 1): "S_2", (2, -3, 1): "S_3", (3, -4, 1): "S_4", (-4, 3, 1): "S_4"}

EXOTIC = {7: ["G2"], 8: ["Spin7", "Ad(SL3)", "SL2xSL2xSL2"], 9: ["SL3xSL3"]}
# non-gallant exotic candidates ruled out by the (8,2)/(9,3) exclusion
PRUNED = {(8, 2): {"SL2xSL2xSL2"}, (9, 3): {"SL3xSL3"}}
GALLANT_EXOTIC = {"G2", "Spin7", "Ad(SL3)"}


@dataclass(frozen=True)
class SheafDescriptor:
    a: int
    b: int
    k: int
    chi: CharacterMultiset
    theta: CharacterMultiset
    swapped: bool = False   # chi was empty, so the roles were exchanged
    scale: int = None       # a^a b^b mod q, the argument rescaling of the identity

    @property
    def degenerate(self):
        return not self.chi and not self.theta

    @property
    def r(self):
        return len(self.chi)

    @property
    def t(self):
        return len(self.theta)


def sheaf_descriptor(ctx, a, b, k):
    """Cancelled character data for K_k^{a,b}.

    When everything on the chi side cancels, the pair is replaced by
    (theta^{-1}, chi^{-1}), which describes the same sheaf after u -> 1/u.
    """
    if a == 0 or b == 0 or k < 0:
        raise DomainError("need a, b nonzero and k >= 0")
    chi, theta = cancel(*uncancelled_sets(ctx, a, b, k))
    swapped = False
    if not chi and theta:
        chi, theta, swapped = theta.inverse(), chi.inverse(), True
    q = ctx.q
    scale = pow(a % q, a, q) * pow(b % q, b, q) % q
    return SheafDescriptor(a, b, k, chi, theta, swapped, scale)


# ---------------------------------------------------------------- structural tests

def _divisors(n):
    return [d for d in range(2, n + 1) if n % d == 0]


def is_kummer_induced(chi, theta=None):
    """Return (flag, witness) where witness = (d, eta index).

    Stability under one eta of exact order d gives stability under its
    powers, which are all characters of exact order d.  Any stabilizing
    eta is a ratio of members, so its order divides q-1.
    """
    ctx = chi.ctx
    n = ctx.q - 1
    sizes = len(chi) if theta is None else math.gcd(len(chi), len(theta))
    for d in _divisors(sizes):
        if n % d:
            continue
        eta = n // d
        if chi.shift(eta) == chi and (theta is None or theta.shift(eta) == theta):
            return True, (d, eta)
    return False, None


def _roots(ctx, alpha, c):
    """All chi with chi^c = alpha inside the character group."""
    n = ctx.q - 1
    return [j for j in range(n) if (c * j - alpha) % n == 0]


def _belyi_one(chi, theta):
    ctx = chi.ctx
    nn = len(chi)
    m = ctx.q - 1
    if nn != len(theta) or nn < 2:
        return None
    for c in range(1, nn):
        d = nn - c
        # alpha = lambda^c and beta = mu^d for members lambda, mu of chi
        alphas = sorted({(c * j) % m for j in chi.indices})
        betas = sorted({(d * j) % m for j in chi.indices} - {0})
        for al in alphas:
            ra = _roots(ctx, al, c)
            if len(ra) != c:
                continue
            for be in betas:
                rb = _roots(ctx, be, d)
                if len(rb) != d:
                    continue
                if CharacterMultiset.of(ctx, ra + rb) != chi:
                    continue
                rt = _roots(ctx, (al + be) % m, nn)
                if len(rt) == nn and CharacterMultiset.of(ctx, rt) == theta:
                    return (c, d, al, be)
    return None


def is_belyi_induced(chi, theta):
    """Return (flag, {"chi,theta": witness, "theta,chi": witness})."""
    w1 = _belyi_one(chi, theta)
    w2 = _belyi_one(theta, chi)
    return (w1 is not None or w2 is not None), {"chi,theta": w1, "theta,chi": w2}


def twist_selfdual(chi):
    """All (xi, tag) with chi = xi * chi^{-1}; tag is symmetric/alternating."""
    ctx = chi.ctx
    m = ctx.q - 1
    n = len(chi)
    inv = chi.inverse()
    lam = chi.product_index()
    out = []
    for xi in range(m):
        if inv.shift(xi) != chi:
            continue
        if n % 2 or lam != (xi * (n // 2)) % m:
            out.append((xi, "symmetric"))
        else:
            out.append((xi, "alternating"))
    return out


# ---------------------------------------------------------------- group theory

def _is_gallant_group(label):
    if label in GALLANT_EXOTIC:
        return True
    if "_" not in label:
        return False
    kind, n = label.split("_")
    n = int(n)
    if kind == "SL":
        return n >= 2
    if kind == "Sp":
        return n >= 2 and n % 2 == 0
    if kind == "SO":
        return n == 3 or n >= 5
    return False


def _single_candidates(chi, ctx):
    n = len(chi)
    sd = twist_selfdual(chi)
    if n % 2 or not sd:
        return [f"SL_{n}"], (sd[0] if sd else None)
    tag = sd[0][1]
    return ([f"SO_{n}"] if tag == "symmetric" else [f"Sp_{n}"]), sd[0]


def _pair_candidates(chi, theta, ctx):
    r, t = len(chi), len(theta)
    n = max(r, t)
    m = ctx.q - 1
    note = ""
    ratio = (chi.product_index() - theta.product_index()) % m
    if (r - t) % 2:
        return [f"SL_{n}"], None, "r-t odd"
    sdc = {xi: tag for xi, tag in twist_selfdual(chi)}
    sdt = {xi: tag for xi, tag in twist_selfdual(theta)}
    common = sorted(set(sdc) & set(sdt))
    selfdual = (common[0], sdc[common[0]]) if common else None
    if r != t:
        classical = [f"SL_{n}", f"SO_{n}"] + ([f"Sp_{n}"] if n % 2 == 0 else [])
        if common:
            if n % 2 == 0 and ratio == 0:
                classical = [f"Sp_{n}"]
                note = "both selfdual, Lambda ratio trivial"
            else:
                classical = [f"SO_{n}"]
                note = "both selfdual with a common dualizing character"
        exotic = []
        if abs(r - t) == 6 and n in EXOTIC:
            exotic = [g for g in EXOTIC[n] if g not in PRUNED.get((max(r, t), min(r, t)), set())]
        return classical + exotic, selfdual, note
    if ratio == 0:
        return [f"SL_{n}"] + ([f"Sp_{n}"] if n % 2 == 0 else []), selfdual, "r=t, Lambda ratio trivial"
    if m % 2 == 0 and ratio == m // 2:
        return ["trivial", f"SO_{n}"] + ([f"Sp_{n}"] if n % 2 == 0 else []), selfdual, \
            "r=t, Lambda ratio quadratic"
    return ["trivial", f"SL_{n}", f"SO_{n}"] + ([f"Sp_{n}"] if n % 2 == 0 else []), selfdual, "r=t"


# ---------------------------------------------------------------- verdicts

@dataclass
class ClassificationVerdict:
    descriptor: SheafDescriptor
    q: int
    n: int
    r: int
    t: int
    kummer: bool = False
    kummer_witness: tuple = None
    belyi: bool = False
    belyi_witness: dict = None
    selfdual: tuple = None
    g0_candidates: list = field(default_factory=list)
    gallant: str = "no"
    exception: str = None          # short problem label, e.g. "SO_4"
    exception_reason: str = ""
    fallback: "ClassificationVerdict" = None

    @property
    def tuple(self):
        d = self.descriptor
        return (d.a, d.b, d.k)

    @property
    def g0_label(self):
        return " or ".join(self.g0_candidates)

    def to_dict(self):
        d = self.descriptor
        m = self.q - 1
        frac = lambda s: [str(Fraction(j, m)) for j in s.indices]
        out = {
            "a": d.a, "b": d.b, "k": d.k, "q": self.q,
            "chi": d.chi.indices, "theta": d.theta.indices,
            "chi_fractions": frac(d.chi), "theta_fractions": frac(d.theta),
            "swapped": d.swapped, "scale": d.scale, "n": self.n, "r": self.r, "t": self.t,
            "kummer": self.kummer, "kummer_witness": self.kummer_witness,
            "belyi": self.belyi, "belyi_witness": self.belyi_witness,
            "selfdual": self.selfdual, "g0_candidates": self.g0_candidates,
            "gallant": self.gallant, "exception": self.exception,
            "exception_reason": self.exception_reason,
            "fallback": self.fallback.to_dict() if self.fallback else None,
        }
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _cancelled_size(a, b, k):
    """max(r, t) after cancellation, computed with exact fractions."""
    chi, theta = geometric_sets(a, b, k)
    common = chi & theta
    return max(sum((chi - common).values()), sum((theta - common).values()))


def admissible_primes(a, b, k, count=3, start=2):
    """The first `count` primes q >= start with |a|,|b| | q-1 and q > 2n+1."""
    L = math.lcm(abs(a), abs(b))
    n = _cancelled_size(a, b, k)
    out = []
    q = max(start, 3)
    while len(out) < count:
        if (q - 1) % L == 0 and q > 2 * n + 1 and q > max(abs(a), abs(b)) and is_prime(q):
            out.append(q)
        q += 1
    return out


def smallest_admissible_prime(a, b, k):
    return admissible_primes(a, b, k, 1)[0]


def classify_sets(ctx, chi, theta, tuple_=None):
    """Classify explicit (already cancelled) data; tuple_ is (a, b, k) if known."""
    a, b, k = tuple_ if tuple_ else (0, 0, 0)
    desc = SheafDescriptor(a, b, k, chi, theta)
    return _classify(ctx, desc, tuple_, with_fallback=False)


def classify(ctx, a, b, k, fallback=True):
    m = ctx.q - 1
    if a == 0 or b == 0 or m % abs(a) or m % abs(b):
        raise InadmissiblePrime(f"q={ctx.q}: |a|, |b| must divide q-1 for {(a, b, k)}")
    desc = sheaf_descriptor(ctx, a, b, k)
    n = max(desc.r, desc.t)
    if ctx.q <= 2 * n + 1:
        raise InadmissiblePrime(f"q={ctx.q} not admissible for {(a, b, k)}")
    return _classify(ctx, desc, (a, b, k), with_fallback=fallback)


def _classify(ctx, desc, tup, with_fallback):
    chi, theta = desc.chi, desc.theta
    r, t = desc.r, desc.t
    n = max(r, t)
    v = ClassificationVerdict(desc, ctx.q, n, r, t)
    reasons = []

    if desc.degenerate:
        v.g0_candidates = ["undetermined-subset"]
        v.exception, v.gallant = "degenerate", "no"
        v.exception_reason = "all characters cancel"
        return _with_fallback(ctx, v, tup, with_fallback)

    if theta:
        v.kummer, v.kummer_witness = is_kummer_induced(chi, theta)
        v.belyi, v.belyi_witness = is_belyi_induced(chi, theta)
    else:
        v.kummer, v.kummer_witness = is_kummer_induced(chi)

    if n == 1:
        v.g0_candidates = ["rank-1"]
    elif v.kummer or v.belyi:
        v.g0_candidates = ["undetermined-subset"]
        reasons.append("Kummer induced" if v.kummer else "Belyi induced")
    elif not theta:
        v.g0_candidates, v.selfdual = _single_candidates(chi, ctx)
    else:
        v.g0_candidates, v.selfdual, note = _pair_candidates(chi, theta, ctx)
        if note:
            reasons.append(note)

    # exceptions in priority order
    if tup in SOLVABLE:
        v.exception = SOLVABLE[tup]
        v.g0_candidates = ["finite/solvable"]
        reasons.append(f"finite solvable monodromy {SOLVABLE[tup]}")
        if tup in ((3, -4, 1), (-4, 3, 1)):
            reasons.append("listed as (3,-4,1) in the gallant lemma and as (-4,3,1) "
                           "in the reduction table; both are flagged")
    elif n == 1:
        v.exception = "rank 1"
        reasons.append("rank one")
    elif n == 4 and (desc.k >= 1 or "SO_4" in v.g0_candidates):
        # rank four counts as potentially SO_4 for every tuple with k >= 1; the
        # k = 0 targets of the reduction are judged by their candidates alone
        sp = [g for g in v.g0_candidates if g == "Sp_4"]
        v.exception = " or ".join(["SO_4"] + sp)
        reasons.append("rank four: potentially SO_4, candidates " + ", ".join(v.g0_candidates))

    if v.exception is not None:
        v.gallant = "no"
    else:
        flags = [_is_gallant_group(g) for g in v.g0_candidates]
        undetermined = [g in ("trivial", "undetermined-subset") for g in v.g0_candidates]
        if all(flags):
            v.gallant = "yes"
        elif any(flags) or any(undetermined):
            v.gallant = "conditionally"
        else:
            v.gallant = "no"
    v.exception_reason = "; ".join(reasons)
    return _with_fallback(ctx, v, tup, with_fallback)


def _with_fallback(ctx, v, tup, with_fallback):
    if not with_fallback or tup is None or v.gallant == "yes":
        return v
    a, b, k = tup
    if k >= 1 and (a != -1 or k > 1):
        fb = (a, 1, k - 1)
        m = ctx.q - 1
        fctx = ctx
        if m % abs(a) or ctx.q <= 2 * _cancelled_size(*fb) + 1:
            fctx = build_context(smallest_admissible_prime(*fb))
        v.fallback = classify(fctx, *fb, fallback=True)
    return v


def classify_tuple(a, b, k, q=None):
    """Classify at q, or at the smallest admissible prime when q is None."""
    q = q or smallest_admissible_prime(a, b, k)
    return classify(build_context(q), a, b, k)
