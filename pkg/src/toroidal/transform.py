"""Arbitrary-length discrete Fourier transforms.

The multiplicative group of F_q is cyclic of order q-1, which is almost
never a power of two.  ``dft`` evaluates

    X[k] = sum_n x[n] * exp(2*pi*i*sign*n*k/N)

for any N with Bluestein's chirp substitution nk = (n^2 + k^2 - (k-n)^2)/2,
turning the transform into one linear convolution done with power-of-two
FFTs.  ``naive_dft`` is the O(N^2) reference used by the tests.
"""

import numpy as np


def _chirp(N, sign):
    m = np.arange(N, dtype=np.int64)
    # reduce m^2 mod 2N in integers so large N keeps full phase accuracy
    r = (m * m) % (2 * N)
    return np.exp(1j * np.pi * sign * r / N)


def dft(x, sign=-1):
    x = np.asarray(x, dtype=complex)
    N = x.shape[-1]
    if N == 0:
        return x.copy()
    if N & (N - 1) == 0:
        # power of two: the plain FFT already has the requested length
        if sign < 0:
            return np.fft.fft(x, axis=-1)
        return np.fft.ifft(x, axis=-1) * N
    c = _chirp(N, sign)
    L = 1 << int(2 * N - 1).bit_length()
    a = np.zeros(x.shape[:-1] + (L,), dtype=complex)
    a[..., :N] = x * c
    b = np.zeros(L, dtype=complex)
    cb = np.conj(c)
    b[:N] = cb
    b[L - N + 1:] = cb[1:][::-1]
    conv = np.fft.ifft(np.fft.fft(a, axis=-1) * np.fft.fft(b), axis=-1)
    return c * conv[..., :N]


def idft(X, sign=+1):
    """Inverse of ``dft(x, -sign)``, including the 1/N factor."""
    X = np.asarray(X, dtype=complex)
    return dft(X, sign) / X.shape[-1]


def naive_dft(x, sign=-1):
    x = np.asarray(x, dtype=complex)
    N = x.shape[-1]
    n = np.arange(N)
    W = np.exp(2j * np.pi * sign * ((np.outer(n, n)) % N) / N)
    return x @ W.T


def cyclic_convolve(f, g, naive=False):
    """(f*g)[m] = sum_i f[i] g[m-i] with indices mod N."""
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    N = f.shape[-1]
    if naive:
        out = np.zeros(N, dtype=complex)
        for i in range(N):
            out += f[i] * np.roll(g, i)
        return out
    return idft(dft(f) * dft(g))
