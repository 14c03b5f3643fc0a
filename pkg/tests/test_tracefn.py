import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from toroidal.errors import ContextMismatch, DivisibilityViolation, EmptyData, TooLarge, WeightBoundViolation
from toroidal.ffield import build_context, is_prime
from toroidal.multiset import CharacterMultiset, rho
from toroidal.sheafclass import sheaf_descriptor
from toroidal.tracefn import (
    TraceTable, degenerate_deviations, fourier_transform, hasse_davenport_residual, hyp_identity_residual,
    hyp_table, k_ab_table, kl_table, mult_convolve, poisson_residual, uncancelled_sets, _power_units,
)

PRIMES_499 = [p for p in range(3, 500) if is_prime(p)]


def test_kloosterman_examples():
    ctx = build_context(5)
    assert np.allclose(kl_table(ctx, 1).values, ctx.addroots[1:])
    K2 = kl_table(ctx, 2)
    # frozen from the four-term sum over x in F_5^x
    assert abs(K2(1) - 0.1708203932499369) < 1e-12
    assert abs(K2(1) - oracles.kl(5, 2, 1)) < 1e-12
    assert abs(K2(1) - (2 + 2 * math.cos(4 * math.pi / 5)) / math.sqrt(5)) < 1e-12
    assert abs(K2.values.sum() - 1 / math.sqrt(5)) < 1e-12


@pytest.mark.parametrize("q,k", [(7, 2), (7, 3), (11, 2), (13, 4)])
def test_kloosterman_against_brute_force(q, k):
    ctx = build_context(q)
    T = kl_table(ctx, k)
    for u in range(1, q):
        assert abs(T(u) - oracles.kl(q, k, u)) < 1e-10


@pytest.mark.parametrize("a,b,k", [(2, 3, 1), (2, -3, 1), (-1, -1, 2), (-2, 1, 0), (1, 1, 0), (3, -1, 2)])
def test_k_ab_against_brute_force(a, b, k):
    q = 7
    ctx = build_context(q)
    T = k_ab_table(ctx, a, b, k)
    for u in range(1, q):
        assert abs(T(u) - oracles.kab(q, a, b, k, u)) < 1e-10


def test_k_ab_degenerate_forms():
    ctx = build_context(7)
    # K_3^{-1,-1} = e_q + (q+1)/q^2, checked against the brute-force sum
    K3 = k_ab_table(ctx, -1, -1, 3)
    for u in range(1, 7):
        assert abs(K3(u) - oracles.kab(7, -1, -1, 3, u)) < 1e-10
    for q in (7, 101, 211):
        c = build_context(q)
        K3 = k_ab_table(c, -1, -1, 3)
        assert np.allclose(K3.values, c.addroots[1:] + (q + 1) / q ** 2, atol=1e-10)
    ctx = build_context(101)
    K0 = k_ab_table(ctx, 1, 1, 0)
    assert np.allclose(K0.values, kl_table(ctx, 2).values, atol=1e-12)


def test_degenerate_constants_stable():
    rows = [degenerate_deviations(build_context(q)) for q in (101, 211, 401)]
    c2 = [r[1] for r in rows]
    c1 = [r[2] for r in rows]
    # the implied constants settle near 1
    assert max(c2) / min(c2) < 1.05 and max(c2) < 1.1
    assert max(c1) / min(c1) < 1.05 and max(c1) < 1.1


@given(st.sampled_from(PRIMES_499), st.integers(-6, 6), st.integers(-6, 6), st.integers(0, 4))
def test_fast_and_naive_paths_agree(q, a, b, k):
    if a == 0 or b == 0 or q in (a, b, -a, -b):
        return
    ctx = build_context(q)
    f, g = k_ab_table(ctx, a, b, k), k_ab_table(ctx, a, b, k, naive=True)
    assert np.max(np.abs(f.values - g.values)) < 1e-8
    if k >= 1:
        assert np.max(np.abs(kl_table(ctx, k + 1).values - kl_table(ctx, k + 1, naive=True).values)) < 1e-8


@given(st.sampled_from(PRIMES_499[:40]), st.data())
def test_hyp_paths_agree(q, data):
    ctx = build_context(q)
    chi = data.draw(st.lists(st.integers(0, q - 2), max_size=3))
    theta = data.draw(st.lists(st.integers(0, q - 2), max_size=3))
    if not chi and not theta:
        return
    f = hyp_table(ctx, chi, theta)
    g = hyp_table(ctx, chi, theta, naive=True)
    assert np.max(np.abs(f.values - g.values)) < 1e-8


def test_hyp_examples():
    ctx = build_context(13)
    assert np.allclose(hyp_table(ctx, [0], []).values, ctx.addroots[1:], atol=1e-12)
    assert np.allclose(hyp_table(ctx, [0, 0], []).values, kl_table(ctx, 2).values, atol=1e-12)
    H = hyp_table(ctx, [0, 6], [4, 8])
    for u in (1, 2, 5, 12):
        assert abs(H(u) - oracles.hyp(13, [0, 6], [4, 8], u)) < 1e-10
    c5 = build_context(5)
    for chi, theta in [([], [1]), ([2], [1]), ([0, 1], [3])]:
        for path in (False, True):
            T = hyp_table(c5, chi, theta, naive=path)
            assert all(abs(T(u) - oracles.hyp(5, chi, theta, u)) < 1e-10 for u in range(1, 5))
    with pytest.raises(EmptyData):
        hyp_table(ctx, [], [])


def test_mult_convolve():
    ctx = build_context(101)
    rng = np.random.default_rng(1)
    tabs = [TraceTable(ctx, rng.normal(size=100) + 1j * rng.normal(size=100)) for _ in range(3)]
    f, g, h = tabs
    delta = TraceTable(ctx, np.eye(100)[0].astype(complex))
    assert np.allclose(mult_convolve(delta, f).values, f.values / math.sqrt(101))
    eq = kl_table(ctx, 1)
    assert np.allclose(mult_convolve(eq, eq).values, kl_table(ctx, 2).values, atol=1e-12)
    lhs = mult_convolve(mult_convolve(f, g), h).values
    rhs = mult_convolve(f, mult_convolve(g, h)).values
    assert np.max(np.abs(lhs - rhs)) < 1e-9
    assert np.allclose(mult_convolve(f, g).values, mult_convolve(f, g, naive=True).values, atol=1e-9)
    with pytest.raises(ContextMismatch):
        mult_convolve(f, kl_table(build_context(103), 1))


def test_naive_fourier():
    q = 211
    ctx = build_context(q)
    c = 17
    T = ctx.addroots[(c * np.arange(q)) % q]
    That = fourier_transform(ctx, T)
    expect = np.zeros(q)
    expect[(-c) % q] = math.sqrt(q)
    assert np.allclose(That, expect, atol=1e-9)
    That = fourier_transform(ctx, np.ones(q))
    assert np.allclose(That, math.sqrt(q) * np.eye(q)[0], atol=1e-9)
    rng = np.random.default_rng(5)
    T = rng.normal(size=q) + 1j * rng.normal(size=q)
    F = fourier_transform(ctx, T)
    assert abs(np.sum(abs(F) ** 2) / np.sum(abs(T) ** 2) - 1) < 1e-10
    assert np.allclose(F, fourier_transform(ctx, T, naive=False), atol=1e-9)


def test_fourier_sup_does_not_grow():
    for a, b, k, xi in [(2, -3, 2, 5), (1, 2, 1, 3), (2, 3, 1, 1)]:
        sups = []
        for q in (101, 211, 401):
            ctx = build_context(q)
            K = k_ab_table(ctx, a, b, k)
            T = np.zeros(q, dtype=complex)
            T[1:] = K((xi * _power_units(ctx, np.arange(1, q), -a)) % q)
            sups.append(np.abs(fourier_transform(ctx, T)).max())
        # sqrt(q) growth would double the sup from 101 to 401
        assert max(sups[1:]) < 1.6 * sups[0]
        assert max(sups) < 4


def test_k0_bounded():
    for a, b in [(1, 2), (2, 3), (1, -2), (3, -1)]:
        sups = [k_ab_table(build_context(q), a, b, 0).sup() for q in (101, 211, 401)]
        assert max(sups) < 3


def test_weight_bound_checked():
    ctx = build_context(11)
    with pytest.raises(WeightBoundViolation):
        TraceTable(ctx, np.full(10, 3.0 + 0j), weight_bound=2.0)
    with pytest.raises(TooLarge):
        kl_table(build_context(5003), 2, naive=True)


def test_hasse_davenport():
    ctx = build_context(13)
    eps1, res1 = hasse_davenport_residual(ctx, 1)
    assert abs(eps1 + 1) < 1e-12 and res1 < 1e-12
    for N in (2, 3, 4, 6):
        eps, res = hasse_davenport_residual(ctx, N)
        assert res < 1e-9 and abs(abs(eps) - 1) < 1e-9
    with pytest.raises(DivisibilityViolation):
        hasse_davenport_residual(ctx, 5)


def test_descriptor_examples():
    ctx = build_context(13)
    chi, theta = uncancelled_sets(ctx, 2, 3, 1)
    assert chi.indices == [0, 0, 0, 4, 6, 8] and not theta
    d = sheaf_descriptor(ctx, 2, -3, 1)
    assert d.chi.indices == [0, 6] and d.theta.indices == [4, 8]
    assert d.scale == pow(2, 2, 13) * pow(-3 % 13, -3, 13) % 13
    assert sheaf_descriptor(ctx, -1, -1, 2).degenerate
    with pytest.raises(DivisibilityViolation):
        sheaf_descriptor(ctx, 5, 1, 1)


@pytest.mark.parametrize("q", [13, 31])
@pytest.mark.parametrize("abk", [(2, 3, 1), (2, -3, 1), (2, 3, 2), (1, 1, 0), (1, 1, 2), (-2, 3, 1)])
def test_hyp_identity(q, abk):
    assert hyp_identity_residual(build_context(q), *abk) < 1e-8


@pytest.mark.parametrize("abk,xi", [((2, -3, 2), 5), ((1, 1, 1), 1), ((-1, -1, 2), 1), ((2, 3, 1), 7),
                                    ((-2, 1, 1), 3)])
def test_poisson_identity(abk, xi):
    assert poisson_residual(build_context(101), *abk, xi=xi) < 1e-8


def test_weil_deligne_bounds():
    for q in PRIMES_499:
        K = kl_table(build_context(q), 2)
        assert K.sup() <= 2 + 1e-9
        assert np.max(np.abs(K.values.imag)) < 1e-10
    for q in [p for p in PRIMES_499 if p <= 199]:
        ctx = build_context(q)
        for k in range(1, 6):
            assert kl_table(ctx, k).sup() <= k + 1e-9
