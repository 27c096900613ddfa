"""Low-level numerical helpers: prime sieves, error-free transforms, sums."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ResourceError

_SPLITTER = 134217729.0  # 2**27 + 1


def primes_up_to(n: int) -> np.ndarray:
    """All primes p <= n as an int64 array."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    try:
        is_prime = np.ones(n + 1, dtype=bool)
    except MemoryError as exc:
        raise ResourceError(f"cannot allocate prime sieve of size {n + 1}") from exc
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@lru_cache(maxsize=8)
def odd_primes_up_to(n: int) -> np.ndarray:
    ps = primes_up_to(n)
    ps = ps[ps > 2]
    ps.flags.writeable = False
    return ps


def mobius_up_to(n: int) -> list[int]:
    """mu(0..n) by a linear sieve; index 0 is unused."""
    mu = [1] * (n + 1)
    mu[0] = 0
    is_comp = [False] * (n + 1)
    primes: list[int] = []
    for i in range(2, n + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > n:
                break
            is_comp[i * p] = True
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu


@lru_cache(maxsize=None)
def bernoulli_even(count: int) -> tuple[float, ...]:
    """B_2, B_4, ..., B_{2*count} as floats (exact rationals rounded once)."""
    # Akiyama-Tanigawa
    size = 2 * count + 1
    a = [Fraction(0)] * (size + 1)
    b = []
    for m in range(size + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        b.append(a[0])
    return tuple(float(b[2 * k]) for k in range(1, count + 1))


def two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a: float, b: float) -> tuple[float, float]:
    """Dekker's exact product: a*b == p + e."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def dd_mul(x: tuple[float, float], y: float) -> tuple[float, float]:
    """Double-double times double, renormalised."""
    p, e = two_prod(x[0], y)
    e += x[1] * y
    return two_sum(p, e)


def dd_pow(x: float, n: int) -> tuple[float, float]:
    r = (1.0, 0.0)
    for _ in range(n):
        r = dd_mul(r, x)
    return r


def fsum_complex(values) -> complex:
    arr = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


def compensated_rowsum(mat: np.ndarray) -> np.ndarray:
    """Sum along the last axis: pairwise summation with TwoSum error capture.

    Every pairwise addition records its exact rounding error; the errors are
    added back at the end.  Fixed reduction order, so results are
    reproducible bit for bit.
    """
    mat = np.asarray(mat)
    if np.iscomplexobj(mat):
        return _pairwise_two_sum(mat.real) + 1j * _pairwise_two_sum(mat.imag)
    return _pairwise_two_sum(mat.astype(float))


def _pairwise_two_sum(vals: np.ndarray) -> np.ndarray:
    err = np.zeros(vals.shape[:-1])
    if vals.shape[-1] == 0:
        return err
    while vals.shape[-1] > 1:
        if vals.shape[-1] % 2:
            pad = np.zeros(vals.shape[:-1] + (1,))
            vals = np.concatenate([vals, pad], axis=-1)
        a = vals[..., 0::2]
        b = vals[..., 1::2]
        s = a + b
        bb = s - a
        err = err + np.sum((a - (s - bb)) + (b - bb), axis=-1)
        vals = s
    return vals[..., 0] + err


def clog1p(z):
    """log(1+z) for complex z, accurate when |z| is tiny."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    out = np.log(1.0 + np.where(small, 0.0, z))
    zs = np.where(small, z, 0.0)
    series = zs * (1.0 - zs * (0.5 - zs * (1.0 / 3.0 - zs * 0.25)))
    return np.where(small, series, out)
