"""The Hardy-Littlewood singular series and the twin prime constant."""

from __future__ import annotations

import csv
import math
import os
import struct
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, ResourceError
from .numerics import odd_primes_up_to, primes_up_to
from .zeta_engine import prime_zeta_tail

MAGIC = b"SINGSER1"
C2_PRIME_LIMIT = 10**6
EXACT_MODE_LIMIT = 10**5


@dataclass(frozen=True)
class TwinPrimeConstant:
    value: float
    prime_limit: int
    tail_corrected: bool
    tail: float = 0.0  # log of the factors for p > prime_limit that was applied
    tail_bound: float = 0.0  # 2/(P log P) >= sum_{p>P} 1/(p-1)^2


def twin_prime_constant(prime_limit: int, tail_corrected: bool = False) -> TwinPrimeConstant:
    """C2 = prod_{p>2} (1 - 1/(p-1)^2), truncated at ``prime_limit``.

    The tail correction is the exact expansion
    log(1 - 1/(p-1)^2) = sum_{n>=2} (2 - 2^n)/n p^-n summed over p > P with
    prime zeta tails, so the corrected value is accurate to rounding.
    """
    if prime_limit < 3:
        raise DomainError("prime_limit must be >= 3")
    ps = odd_primes_up_to(prime_limit).astype(float)
    log_c2 = math.fsum(np.log1p(-1.0 / (ps - 1.0) ** 2))
    bound = 2.0 / (prime_limit * math.log(prime_limit))
    tail = 0.0
    if tail_corrected:
        logp = math.log(prime_limit)
        orders = []
        n = 2
        while True:
            est = (2.0**n / n) * math.exp((1 - n) * logp) / ((n - 1) * logp)
            if est < 1e-19 and n > 3:
                break
            orders.append(n)
            n += 1
        tails = prime_zeta_tail(np.array(orders, dtype=float), prime_limit).real
        tail = math.fsum((2.0 - 2.0**n) / n * t for n, t in zip(orders, tails))
    return TwinPrimeConstant(math.exp(log_c2 + tail), prime_limit, tail_corrected, tail, bound)


@lru_cache(maxsize=1)
def best_c2() -> float:
    return twin_prime_constant(C2_PRIME_LIMIT, tail_corrected=True).value


def _odd_prime_factors(k: int):
    while k % 2 == 0:
        k //= 2
    p = 3
    while p * p <= k:
        if k % p == 0:
            yield p
            while k % p == 0:
                k //= p
        p += 2
    if k > 1:
        yield k


def singular_series(k: int) -> float:
    """S(k) = 2 C2 prod_{p | k, p > 2} (p-1)/(p-2) for even k, 0 for odd k."""
    if int(k) != k or k <= 0:
        raise DomainError(f"singular series is defined here for integers k >= 1, got {k!r}")
    k = int(k)
    if k % 2:
        return 0.0
    r = 1.0
    for p in _odd_prime_factors(k):
        r *= (p - 1) / (p - 2)
    return 2.0 * best_c2() * r


@dataclass(frozen=True, eq=False)
class SingularSeriesTable:
    """S(k)/(2 C2) for 1 <= k <= limit.

    ``ratios[k]`` is the value for k (index 0 is a zero placeholder); odd k
    hold exactly 0.  ``exact_num/exact_den`` are present in exact mode.
    """

    limit: int
    ratios: np.ndarray
    c2: float
    exact_num: tuple[int, ...] | None = None
    exact_den: tuple[int, ...] | None = None

    def __post_init__(self):
        self.ratios.flags.writeable = False

    @property
    def values(self) -> np.ndarray:
        return 2.0 * self.c2 * self.ratios

    def value(self, k: int) -> float:
        return 2.0 * self.c2 * float(self.ratios[k])

    def exact_ratio(self, k: int) -> Fraction:
        if self.exact_num is None:
            raise DomainError("table was not built in exact mode")
        return Fraction(self.exact_num[k], self.exact_den[k])

    def mean_value(self) -> float:
        return 2.0 * self.c2 * math.fsum(self.ratios) / self.limit


def _check_allocation(n_items: int, itemsize: int = 8) -> None:
    need = n_items * itemsize
    try:
        avail = os.sysconf("SC_AVPHYS_PAGES") * os.sysconf("SC_PAGE_SIZE")
    except (ValueError, OSError, AttributeError):
        return
    if need > avail:
        raise ResourceError(f"table needs {need} bytes, only {avail} bytes available")


def sieve_singular_series(N: int, exact_mode: bool = False, c2: float | None = None) -> SingularSeriesTable:
    """Tabulate S(k)/(2 C2) for k <= N by sieving over odd primes.

    Each odd prime p multiplies (p-1)/(p-2) into every even multiple of p,
    so no k is ever factored.  Exact mode (N <= 1e5) also keeps the ratios
    as reduced fractions, built from a smallest-odd-prime-factor table.
    """
    if int(N) != N or N < 1:
        raise DomainError("N must be an integer >= 1")
    N = int(N)
    _check_allocation(2 * (N + 1))
    try:
        ratios = np.zeros(N + 1)
    except MemoryError as exc:
        raise ResourceError(f"cannot allocate {8 * (N + 1)} bytes for the table") from exc
    ratios[2::2] = 1.0
    for p in odd_primes_up_to(N // 2 if N >= 6 else 2).tolist():
        ratios[2 * p :: 2 * p] *= (p - 1) / (p - 2)
    num = den = None
    if exact_mode:
        if N > EXACT_MODE_LIMIT:
            raise ResourceError(f"exact mode is limited to N <= {EXACT_MODE_LIMIT}")
        num, den = _exact_ratios(N)
    return SingularSeriesTable(N, ratios, best_c2() if c2 is None else c2, num, den)


def _exact_ratios(N: int):
    spf = list(range(N + 1))
    for p in primes_up_to(math.isqrt(N)).tolist():
        for m in range(p * p, N + 1, p):
            if spf[m] == m:
                spf[m] = p
    num = [0] * (N + 1)
    den = [1] * (N + 1)
    for k in range(2, N + 1, 2):
        a, b = 1, 1
        r = k
        while r > 1:
            p = spf[r]
            while r % p == 0:
                r //= p
            if p > 2:
                a *= p - 1
                b *= p - 2
        g = math.gcd(a, b)
        num[k], den[k] = a // g, b // g
    return tuple(num), tuple(den)


def save_table(table: SingularSeriesTable, path) -> None:
    """Little-endian: magic, uint64 N, then N float64 values of S(k)/(2 C2)."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", table.limit))
        fh.write(table.ratios[1:].astype("<f8").tobytes())


def load_table(path, c2: float | None = None) -> SingularSeriesTable:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if len(head) != 16 or head[:8] != MAGIC:
            raise ValueError(f"{path}: not a SINGSER1 table")
        (n,) = struct.unpack("<Q", head[8:])
        body = fh.read()
    if len(body) != 8 * n:
        raise ValueError(f"{path}: expected {8 * n} payload bytes, found {len(body)}")
    ratios = np.empty(n + 1)
    ratios[0] = 0.0
    ratios[1:] = np.frombuffer(body, dtype="<f8")
    return SingularSeriesTable(n, ratios, best_c2() if c2 is None else c2)


def export_csv(table: SingularSeriesTable, path) -> None:
    vals = table.values
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "singular_series"])
        for k in range(1, table.limit + 1):
            w.writerow([k, f"{vals[k]:.17g}"])
