import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import Polynomial

import oracles
from toroidal.errors import BadMinorant, BadPolynomial, DomainError, ExcludedTuple
from toroidal.ffield import build_context, character, gauss_sum_table
from toroidal.lmoments import (
    afe_crosscheck, certificate, central_values, fe_phase_residual, hurwitz_zeta, l_values_half, minorant,
    mobius_log_sum, mollified_moment, mollifier_values, moment, moment_ladder, nonvanishing_count,
    pin_fe_phase, q4_moment, trivial_solution_count, v_weight,
)
from toroidal.lmoments.lvalues import central_values_naive


def test_hurwitz_examples():
    assert abs(hurwitz_zeta(2, 1) - math.pi ** 2 / 6) < 1e-12
    assert abs(hurwitz_zeta(2, 0.5) - math.pi ** 2 / 2) < 1e-12
    assert abs(hurwitz_zeta(0.5, 1) + 1.4603545088095868) < 1e-12
    for bad in [(1, 0.5), (-1, 0.5), (2, 0.0), (2, 1.5)]:
        with pytest.raises(DomainError):
            hurwitz_zeta(*bad)


@given(st.floats(0.1, 6).filter(lambda s: abs(s - 1) > 1e-3), st.floats(1e-3, 1))
def test_hurwitz_against_mpmath(s, x):
    ref = float(mpmath.zeta(s, x))
    assert abs(hurwitz_zeta(s, x) - ref) <= 1e-12 * max(1, abs(ref))


def test_hurwitz_vectorized():
    x = np.linspace(0.01, 1, 50)
    z = hurwitz_zeta(0.5, x)
    assert np.allclose(z, [hurwitz_zeta(0.5, t) for t in x], atol=0, rtol=0)


@pytest.mark.parametrize("q", [5, 7, 13])
def test_central_values_against_mpmath(q):
    L = central_values(build_context(q))
    for j in range(1, q - 1):
        assert abs(L[j] - oracles.central_value(q, j)) < 1e-10


def test_lvalue_table():
    ctx = build_context(101)
    tab = l_values_half(ctx)
    n = 100
    j = np.arange(1, n)
    assert np.max(np.abs(np.conj(tab.L_half[j]) - tab.L_half[(-j) % n])) < 1e-10
    assert np.max(np.abs(np.abs(tab.eps[1:]) - 1)) < 1e-10
    chi_minus_one = np.array([character(ctx, jj)(n) for jj in range(n)])
    assert np.array_equal(tab.parity, (chi_minus_one.real < 0).astype(int))
    rng = np.random.default_rng(101)
    for jj in rng.integers(1, n, 10):
        assert abs(tab.L_half[jj] - central_values_naive(ctx, int(jj))) < 1e-10
    with pytest.raises(ValueError):
        tab.L_half[1] = 0


def test_fe_phase():
    assert pin_fe_phase(5) == (1, -1)
    for q in (7, 13, 101, 1009):
        assert fe_phase_residual(build_context(q)) < 1e-8
    # the other three phase conventions fail
    for sp in [(1, 1), (-1, 1), (-1, -1)]:
        assert fe_phase_residual(build_context(5), *sp) > 0.1


def test_moment_diagnostic_mode():
    ctx = build_context(101)
    assert abs(moment(ctx, 1, 2, 0, 1, diagnostic=True) - 99 / 100) < 1e-12
    for xi in (2, 5, 100):
        assert abs(moment(ctx, 1, 2, 0, xi, diagnostic=True) + 1 / 100) < 1e-12


def test_moment_definition():
    q = 13
    ctx = build_context(q)
    L = central_values(ctx)
    G = gauss_sum_table(ctx)
    for a, b, k, xi in [(1, 2, 0, 1), (1, -1, 0, 1), (2, 3, 1, 5), (1, 2, -1, 2)]:
        s = sum(character(ctx, j)(xi) * L[(a * j) % 12] * L[(b * j) % 12] * G[j] ** k for j in range(1, 12))
        assert abs(moment(ctx, a, b, k, xi) - s / 12) < 1e-12
        full = moment(ctx, a, b, k, xi, include_trivial=True)
        assert abs(full - moment(ctx, a, b, k, xi) - L[0] ** 2 * G[0] ** k / 12) < 1e-12
    m = moment(ctx, 1, -1, 0)
    assert abs(m.imag) < 1e-12 and m.real > 0
    with pytest.raises(DomainError):
        moment(ctx, 1, 2, 0, 13)


def test_moment_ladder_deterministic(monkeypatch):
    seq = moment_ladder([101, 103, 107], 1, 2, 0)
    monkeypatch.setenv("TOROIDAL_THREADS", "3")
    par = moment_ladder([101, 103, 107], 1, 2, 0)
    assert seq == par


def _v_mpmath(y, ta, tb, sigma=2):
    def G(u):
        out = mpmath.mpf(1)
        for j in (ta, tb):
            out *= mpmath.pi ** (-u / 2) * mpmath.gamma((0.5 + u + j) / 2) / mpmath.gamma((0.5 + j) / 2)
        return out

    f = lambda t: mpmath.re(y ** (-(sigma + 1j * t)) * G(sigma + 1j * t) / (sigma + 1j * t))
    return float(mpmath.quad(f, [0, 10, 30, 80]) / mpmath.pi)


@pytest.mark.parametrize("y", [1e-3, 0.3, 1.0, 4.0])
@pytest.mark.parametrize("par", [(0, 0), (1, 1), (0, 1)])
def test_v_weight_against_mpmath(y, par):
    assert abs(v_weight(y, *par) - _v_mpmath(y, *par)) < 1e-9


def test_v_weight_properties():
    # frozen from the mpmath quadrature: V(1e-3) = 0.75488 for the even kernel
    assert abs(v_weight(1e-3) - 0.7548797040243297) < 1e-9
    assert v_weight(1e-12) > 0.9999
    assert abs(v_weight(1e3)) < 1e-6
    assert abs(v_weight(1.0, sigma=1) - v_weight(1.0, sigma=2)) < 1e-8
    y = np.geomspace(0.05, 20, 40)
    v = v_weight(y)
    big = v > 1e-15
    assert np.all(np.diff(v[big]) < 0)
    assert np.all(np.abs(v[~big]) < 1e-15)
    with pytest.raises(DomainError):
        v_weight(0.0)


def test_afe_crosscheck_guards():
    ctx = build_context(101)
    with pytest.raises(ExcludedTuple):
        afe_crosscheck(ctx, 2, 3, 0)
    with pytest.raises(ExcludedTuple):
        afe_crosscheck(ctx, -1, 2, 1)
    with pytest.raises(DomainError):
        afe_crosscheck(ctx, 2, 3, -1)


def test_afe_exact_residual():
    for q in (101, 211):
        r = afe_crosscheck(build_context(q), 2, 3, 1)
        assert r.exact_residual < 1e-7
        assert abs(r.residual - abs(r.direct - r.reconstructed)) < 1e-15


def _mobius(n):
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def test_mollifier_values():
    ctx = build_context(101)
    assert np.allclose(mollifier_values(ctx, 1.9), 1)
    L = 9.5
    P = Polynomial([0, 0, 1])
    M = mollifier_values(ctx, L, P)
    for j in (1, 7, 50):
        chi = character(ctx, j)
        ref = sum(_mobius(l) * chi(l) * l ** -0.5 * P(math.log(L / l) / math.log(L)) for l in range(1, 10))
        assert abs(M[j] - ref) < 1e-12
    bound = sum(l ** -0.5 for l in range(1, 10))
    assert np.max(np.abs(M)) <= bound
    for bad in ([1, 0, 1], [0, 0.5]):
        with pytest.raises(BadPolynomial):
            mollifier_values(ctx, L, Polynomial(bad))


def test_mollified_moments():
    ctx = build_context(503)
    assert abs(mollified_moment(ctx, 1, 2, 0, 1.5) - moment(ctx, 1, 2, 0)) < 1e-12
    assert abs(mollified_moment(ctx, 2, 3, 1, 1.5) - moment(ctx, 2, 3, 1)) < 1e-12
    q4 = q4_moment(ctx, 1, 2, 503 ** 0.2)
    assert np.isfinite(q4) and q4 > 0


def test_nonvanishing_count():
    ctx = build_context(1009)
    edges = [-math.pi, -1.0, 0.3, 2.0, math.pi]
    parts = [nonvanishing_count(ctx, 1, 2, (lo, hi)) for lo, hi in zip(edges, edges[1:])]
    whole = nonvanishing_count(ctx, 1, 2, (-math.pi, math.pi))
    assert sum(parts) == whole
    L = central_values(ctx)
    j = np.arange(1, 1008)
    assert whole == int(np.sum((np.abs(L[j]) > 1e-8) & (np.abs(L[(2 * j) % 1008]) > 1e-8)))
    # a wrapping interval and its complement
    assert nonvanishing_count(ctx, 1, 2, (2.0, -1.0)) + nonvanishing_count(ctx, 1, 2, (-1.0, 2.0)) == whole
    assert nonvanishing_count(ctx, 1, 2, (0, math.pi)) > 0
    with pytest.raises(DomainError):
        nonvanishing_count(ctx, 1, 2, (0, 4))


def test_certificate():
    ctx = build_context(1009)
    c = certificate(ctx, 1, 2, 1009 ** 0.1, (0, math.pi))
    assert c["certificate"] > 0 and c["E"] > 0 and c["holds"]
    zero = certificate(ctx, 1, 2, 1009 ** 0.1, (0, math.pi), phi=lambda t: 0.0 * t)
    assert zero["certificate"] == 0
    with pytest.raises(BadMinorant):
        certificate(ctx, 1, 2, 4.0, (0, 1.0), phi=lambda t: np.ones_like(t))
    with pytest.raises(BadMinorant):
        minorant((0, 1.0), margin=0.6)
    phi = minorant((2.5, -2.5))
    assert phi(math.pi) == pytest.approx(1.0) and phi(0.0) == 0


def test_trivial_solution_count():
    assert all(trivial_solution_count(1, 1, b, q) == 1 for b in (1, 2, 5) for q in (1, 10))
    assert trivial_solution_count(2, 1, 1, 2) == 2
    assert trivial_solution_count(1, 2, 1, 100) == 0
    # brute force over a box
    for l1, l2, b, q in [(12, 1, 1, 50), (8, 2, 1, 50), (1, 1, -1, 30), (3, 2, -2, 200)]:
        ref = sum(1 for m in range(1, q + 1) for n in range(1, q + 1)
                  if m * n <= q and (m * (n * l2) ** b == l1 if b > 0 else m == l1 * (n * l2) ** -b))
        assert trivial_solution_count(l1, l2, b, q) == ref


def test_mobius_sums_shrink():
    s = [abs(mobius_log_sum(L)) for L in (1e3, 1e4, 1e5)]
    assert s[0] > s[1] > s[2]
    assert all(v * math.log(L) < 2 for v, L in zip(s, (1e3, 1e4, 1e5)))
