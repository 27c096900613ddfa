"""Riesz means S_m(x) = sum_{k<=x} (x-k)^m S(k), the main term, and E_m(x).

S_m is assembled from power sums P_j(x) = sum_{k<=x} k^j S(k)/(2 C2) via the
binomial expansion of (x-k)^m.  Power sums are accumulated in fixed blocks of
BLOCK consecutive k; a block is reduced with math.fsum and the block results
are again combined with fsum, so a value depends only on the cutoff and not on
how the cutoff was reached.  Grid evaluation and single-point evaluation
therefore agree bit for bit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .csvio import g17, write_csv
from .errors import (
    CancellationWarning,
    DomainError,
    OrderingError,
    QuadratureError,
    RangeError,
)
from .generating import F_closed, F_closed_array
from .numerics import dd_mul, dd_pow, fsum_complex
from .singular_series import SingularSeriesTable
from .zeta_engine import EULER_GAMMA, LOG_2PI

BLOCK = 512

# Largest x for which E_m is considered trustworthy in binary64.
X_CAPS = {1: 10**7, 2: 10**7, 3: 10**5, 4: 10**5}
X_CAP_DEFAULT = 10**4


def x_cap(m: int) -> int:
    return X_CAPS.get(m, X_CAP_DEFAULT)


def check_x_cap(m: int, x: float) -> None:
    cap = x_cap(m)
    if x > cap:
        raise RangeError(f"x = {x:g} exceeds the supported cap {cap:g} for m = {m}")


def harmonic(m: int) -> Fraction:
    return sum((Fraction(1, n) for n in range(1, m + 1)), Fraction(0))


def _check_m(m) -> int:
    if int(m) != m or m < 1:
        raise DomainError(f"m must be an integer >= 1, got {m!r}")
    return int(m)


def _main_term_parts(m: int, x: float) -> list[float]:
    xm = dd_pow(x, m)
    lead = dd_mul(xm, x)
    q = lead[0] / (m + 1)
    # remainder of the division, exact up to the low word
    r_hi, r_lo = dd_mul((q, 0.0), float(m + 1))
    q_lo = ((lead[0] - r_hi) - r_lo + lead[1]) / (m + 1)
    bracket = math.log(x) - float(harmonic(m)) + EULER_GAMMA + LOG_2PI
    sec = dd_mul(xm, -0.5 * bracket)
    return [q, q_lo, sec[0], sec[1]]


def main_term(m: int, x: float) -> float:
    """x^{m+1}/(m+1) - (1/2) x^m (log x - H_m + gamma + log 2 pi)."""
    m = _check_m(m)
    if not x > 0:
        raise DomainError("main term needs x > 0")
    return math.fsum(_main_term_parts(m, float(x)))


class PowerSumAccumulator:
    """Running sums P_j = sum_{k<=cutoff} k^j S(k)/(2 C2), 0 <= j <= m."""

    def __init__(self, table: SingularSeriesTable, m: int):
        self.table = table
        self.m = _check_m(m)
        self._blocks: list[list[float]] = [[] for _ in range(self.m + 1)]
        self.cutoff = 0

    def _terms(self, lo: int, hi: int) -> list[np.ndarray]:
        """k^j q_k for k in (lo, hi]."""
        q = self.table.ratios[lo + 1 : hi + 1]
        k = np.arange(lo + 1, hi + 1, dtype=float)
        out = [q]
        for _ in range(self.m):
            out.append(out[-1] * k)
        return out

    def _ensure_blocks(self, nb: int) -> None:
        have = len(self._blocks[0])
        for b in range(have, nb):
            terms = self._terms(b * BLOCK, (b + 1) * BLOCK)
            for j in range(self.m + 1):
                self._blocks[j].append(math.fsum(terms[j]))

    def power_sums(self, cutoff: int) -> list[float]:
        if cutoff > self.table.limit:
            raise RangeError(f"cutoff {cutoff} beyond table limit {self.table.limit}")
        if cutoff < self.cutoff:
            raise OrderingError("power-sum cutoff can only advance")
        nb = cutoff // BLOCK
        self._ensure_blocks(nb)
        partial = self._terms(nb * BLOCK, cutoff)
        self.cutoff = cutoff
        return [
            math.fsum(self._blocks[j][:nb] + [math.fsum(partial[j])])
            for j in range(self.m + 1)
        ]


def _combine(m: int, x: float, sums: list[float]) -> list[float]:
    """Components whose exact sum is sum_j C(m,j) (-1)^j x^{m-j} P_j."""
    parts: list[float] = []
    for j in range(m + 1):
        c = math.comb(m, j) * (-1) ** j
        term = dd_mul(dd_mul(dd_pow(x, m - j), sums[j]), float(c))
        parts.extend(term)
    return parts


@dataclass(frozen=True)
class RieszEvaluation:
    m: int
    x: float
    s_m: float
    main: float
    e_m: float
    scaled: float


def _evaluate(m: int, x: float, sums: list[float] | None, c2: float) -> RieszEvaluation:
    main = main_term(m, x)
    if sums is None:
        s_m = 0.0
    else:
        s_m = 2.0 * c2 * math.fsum(_combine(m, x, sums))
    e_m = s_m - main
    if main != 0 and abs(e_m) < 10 * np.finfo(float).eps * abs(main):
        warnings.warn(
            f"E_{m}({x:g}) is below the rounding level of the main term", CancellationWarning
        )
    return RieszEvaluation(m, x, s_m, main, e_m, e_m / x ** (m - 0.75))


def riesz_mean_exact(m: int, x: float, table: SingularSeriesTable) -> float:
    """S_m(x) from the sieve table (cutoff floor(x))."""
    m = _check_m(m)
    x = float(x)
    if x > table.limit:
        raise RangeError(f"x = {x:g} exceeds table limit {table.limit}")
    if x < 2:
        return 0.0
    acc = PowerSumAccumulator(table, m)
    return 2.0 * table.c2 * math.fsum(_combine(m, x, acc.power_sums(int(math.floor(x)))))


def error_term(m: int, x: float, table: SingularSeriesTable) -> RieszEvaluation:
    m = _check_m(m)
    x = float(x)
    if not x > 0:
        raise DomainError("x must be positive")
    if x > table.limit:
        raise RangeError(f"x = {x:g} exceeds table limit {table.limit}")
    if x < 2:
        return _evaluate(m, x, None, table.c2)
    acc = PowerSumAccumulator(table, m)
    return _evaluate(m, x, acc.power_sums(int(math.floor(x))), table.c2)


def error_term_grid(m: int, xs, table: SingularSeriesTable) -> list[RieszEvaluation]:
    """One forward pass over the table; identical to per-point error_term calls."""
    m = _check_m(m)
    xs = [float(x) for x in xs]
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise OrderingError("grid must be ascending")
    if xs and xs[-1] > table.limit:
        raise RangeError(f"x = {xs[-1]:g} exceeds table limit {table.limit}")
    acc = PowerSumAccumulator(table, m)
    out = []
    for x in xs:
        if not x > 0:
            raise DomainError("x must be positive")
        sums = acc.power_sums(int(math.floor(x))) if x >= 2 else None
        out.append(_evaluate(m, x, sums, table.c2))
    return out


class ExactPowerSums:
    """Exact-rational mirror of PowerSumAccumulator for tables built in exact mode.

    Ratios are brought to one common denominator so the running sums are
    plain integers.
    """

    def __init__(self, table: SingularSeriesTable, m: int):
        if table.exact_num is None:
            raise DomainError("table was not built in exact mode")
        self.m = _check_m(m)
        self.table = table
        den = 1
        for d in set(table.exact_den):
            den = den * d // math.gcd(den, d)
        self.denominator = den
        self._num = table.exact_num
        self._den = table.exact_den
        self.cutoff = 0
        self._sums = [0] * (self.m + 1)

    def advance(self, cutoff: int) -> None:
        if cutoff < self.cutoff:
            raise OrderingError("power-sum cutoff can only advance")
        for k in range(self.cutoff + 1, cutoff + 1):
            n = self._num[k]
            if n:
                v = n * (self.denominator // self._den[k])
                for j in range(self.m + 1):
                    self._sums[j] += v
                    v *= k
        self.cutoff = cutoff

    def power_sums(self, cutoff: int) -> list[Fraction]:
        self.advance(cutoff)
        return [Fraction(s, self.denominator) for s in self._sums]

    def ratio_mean(self, x) -> Fraction:
        """sum_{k<=x} (x-k)^m S(k)/(2 C2) as an exact rational; x int or Fraction."""
        x = Fraction(x)
        self.advance(math.floor(x))
        total = 0
        for j in range(self.m + 1):
            total += math.comb(self.m, j) * (-1) ** j * x ** (self.m - j) * self._sums[j]
        return Fraction(total) / self.denominator


def riesz_mean_rational(m: int, x, table: SingularSeriesTable) -> Fraction:
    """Exact S_m(x)/(2 C2) (oracle; exact-mode tables only)."""
    return ExactPowerSums(table, m).ratio_mean(x)


def mellin_inversion_check(
    m: int, x: float, T: float, nodes_per_panel: int = 8
) -> float:
    """S_m(x) from (1/2 pi) int_{-T}^{T} m! F(2+it) x^{2+it+m} / ((s)(s+1)...(s+m)) dt.

    Composite Gauss-Legendre; panels of width 0.05 for |t| <= 1 and at most
    0.5 (shrinking with log x to follow the x^{it} oscillation) beyond.
    """
    m = _check_m(m)
    if m < 2:
        raise DomainError("the truncated Mellin integral is only usable for m >= 2")
    if x < 2:
        raise DomainError("x must be >= 2")
    if T < 100:
        raise DomainError("T must be >= 100")
    wide = min(0.5, 1.0 / max(1.0, math.log(x)))
    inner = np.linspace(0.0, 1.0, 21)
    n_outer = int(math.ceil((T - 1.0) / wide))
    outer = np.linspace(1.0, T, n_outer + 1)
    right = np.concatenate([inner, outer[1:]])
    edges = np.concatenate([-right[::-1], right[1:]])
    gl_x, gl_w = np.polynomial.legendre.leggauss(nodes_per_panel)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * gl_x[None, :]).ravel()
    w = (half[:, None] * gl_w[None, :]).ravel()
    s = 2.0 + 1j * t
    denom = np.ones_like(s)
    for j in range(m + 1):
        denom = denom * (s + j)
    integrand = math.factorial(m) * F_closed_array(s) * np.exp((s + m) * math.log(x)) / denom
    total = fsum_complex(integrand * w) / (2 * math.pi)
    if abs(total.imag) > 1e-6 * abs(total.real):
        raise QuadratureError(
            f"imaginary part {total.imag:.3e} too large relative to {total.real:.6e}"
        )
    return total.real


def kernel_residue(center: complex, m: int, x: float, radius: float = 1e-2, nodes: int = 32) -> complex:
    """Residue of m! F(s) x^{s+m} / (s (s+1) ... (s+m)) at ``center``.

    Trapezoid rule on a circle; geometric convergence as long as no other
    singularity lies near the circle.
    """
    m = _check_m(m)
    center = complex(center)
    acc = []
    for th in 2 * math.pi * np.arange(nodes) / nodes:
        d = radius * complex(math.cos(th), math.sin(th))
        s = center + d
        den = complex(1.0)
        for j in range(m + 1):
            den *= s + j
        acc.append(math.factorial(m) * F_closed(s) * np.exp((s + m) * math.log(x)) / den * d)
    return fsum_complex(acc) / nodes


CSV_HEADER = ["x", "m", "S_m", "main_term", "E_m", "E_m_scaled"]


def write_evaluations_csv(evals, target) -> None:
    rows = ([g17(ev.x), ev.m, g17(ev.s_m), g17(ev.main), g17(ev.e_m), g17(ev.scaled)] for ev in evals)
    write_csv(target, CSV_HEADER, rows)
