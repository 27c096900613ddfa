"""Zero-sum side of the explicit formula for E_m(x).

For a simple zero rho = 1/2 + i gamma the coefficient is

    a(rho, m) = 2 C2 m! zeta(h-1) zeta(h) G(h-1)
                / ((2^h + 1) zeta'(rho) (h-1) h (h+1) ... (h+m-1)),   h = rho/2,

and E_m(x) is approximated by x^{m-3/4} 2 Re sum_gamma>0 a(rho, m) x^{i gamma/2}.
Only gamma > 0 is stored; the coefficient of the conjugate zero is the
complex conjugate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .csvio import g17, write_csv
from .errors import DomainError, NearMultipleZeroError, RangeError
from .numerics import compensated_rowsum, fsum_complex
from .riesz_means import kernel_residue
from .singular_series import best_c2
from .zeta_engine import G_best, ZeroTable, ZetaZero, zeta, zeta_derivative

MULTIPLE_ZERO_THRESHOLD = 1e-6
TAIL_FIT_ZEROS = 20
SCAN_POINTS = 100_000
_SCAN_CHUNK = 4096


def _check_m(m) -> int:
    if int(m) != m or m < 1:
        raise DomainError(f"m must be an integer >= 1, got {m!r}")
    return int(m)


@dataclass(frozen=True)
class ExplicitCoefficient:
    zero: ZetaZero
    m: int
    value: complex
    zeta_prime_source: str = "computed: differentiated Euler-Maclaurin"

    @property
    def modulus(self) -> float:
        return abs(self.value)


@lru_cache(maxsize=4096)
def _base(rho: complex, zeta_prime: complex) -> complex:
    """The m-independent part 2 C2 zeta(h-1) zeta(h) G(h-1) / ((2^h+1) zeta'(rho) (h-1))."""
    if abs(zeta_prime) < MULTIPLE_ZERO_THRESHOLD:
        raise NearMultipleZeroError(
            f"|zeta'(rho)| = {abs(zeta_prime):.3e} at rho = {rho}: the simple-zero formula does not apply"
        )
    h = rho / 2
    num = 2 * best_c2() * zeta(h - 1) * zeta(h) * G_best(h - 1)
    return num / ((2**h + 1) * zeta_prime * (h - 1))


def _m_factor(rho: complex, m: int) -> complex:
    h = rho / 2
    f = complex(math.factorial(m))
    for j in range(m):
        f /= h + j
    return f


def coefficient_at(rho: complex, m: int, zeta_prime: complex | None = None) -> complex:
    """a(rho, m) for any rho (either sign of the ordinate); zeta'(rho) computed if omitted."""
    m = _check_m(m)
    rho = complex(rho)
    if zeta_prime is None:
        zeta_prime = zeta_derivative(rho)
    return _base(rho, complex(zeta_prime)) * _m_factor(rho, m)


def coefficient_a(zero: ZetaZero, m: int) -> ExplicitCoefficient:
    return ExplicitCoefficient(zero, _check_m(m), coefficient_at(zero.rho, m, zero.zeta_prime))


def coefficients(table: ZeroTable, m: int, count: int | None = None) -> np.ndarray:
    zeros = table.zeros if count is None else table.zeros[:count]
    return np.array([coefficient_at(z.rho, m, z.zeta_prime) for z in zeros])


# ---------------------------------------------------------------------------
# Truncated zero sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredictionRecord:
    m: int
    x: float
    zero_count: int
    prediction: float
    scaled_prediction: float
    tail_estimate: float


def tail_fit(table: ZeroTable, m: int, fit_zeros: int = TAIL_FIT_ZEROS) -> float:
    """C in |a(rho_n, m)| ~ C gamma_n^{-(m-1/2)}, fitted on the last table zeros."""
    k = min(fit_zeros, table.count)
    g = table.gammas[-k:]
    a = np.abs(coefficients(table, m)[-k:])
    return float(np.exp(np.mean(np.log(a) + (m - 0.5) * np.log(g))))


def extrapolated_tail(table: ZeroTable, m: int) -> float:
    """2 sum_{gamma > last table zero} |a|, with |a| = C gamma^{-(m-1/2)} and density log(gamma/2 pi)/2 pi."""
    alpha = m - 0.5
    if alpha <= 1:
        return math.inf
    big_g = float(table.gammas[-1])
    c = tail_fit(table, m)
    integral = big_g ** (1 - alpha) / (alpha - 1) * (
        math.log(big_g / (2 * math.pi)) + 1 / (alpha - 1)
    )
    return 2 * c * integral / (2 * math.pi)


def zero_sum_scaled(m: int, xs, table: ZeroTable, count: int) -> np.ndarray:
    """2 Re sum_{n<=count} a(rho_n, m) x^{i gamma_n/2} for every x in xs."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    a = coefficients(table, m, count)
    half = table.gammas[:count] / 2
    out = np.empty(xs.size)
    for start in range(0, xs.size, _SCAN_CHUNK):
        lx = np.log(xs[start : start + _SCAN_CHUNK])
        terms = a[None, :] * np.exp(1j * np.outer(lx, half))
        out[start : start + _SCAN_CHUNK] = 2.0 * compensated_rowsum(terms.real)
    return out


def zero_sum_predictions(
    m: int, xs, table: ZeroTable, count: int | None = None
) -> list[PredictionRecord]:
    m = _check_m(m)
    count = table.count if count is None else int(count)
    if count < 1:
        raise DomainError("zero_count must be >= 1")
    if count > table.count:
        raise RangeError(f"zero_count {count} exceeds the {table.count} zeros in the table")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(xs < 2):
        raise DomainError("predictions need x >= 2")
    scaled = zero_sum_scaled(m, xs, table, count)
    rest = np.abs(coefficients(table, m)[count:])
    tail_scaled = 2.0 * math.fsum(rest) + extrapolated_tail(table, m)
    out = []
    for x, sc in zip(xs.tolist(), scaled.tolist()):
        w = x ** (m - 0.75)
        out.append(PredictionRecord(m, x, count, w * sc, sc, w * tail_scaled))
    return out


def zero_sum_prediction(
    m: int, x: float, table: ZeroTable, count: int | None = None
) -> PredictionRecord:
    return zero_sum_predictions(m, [x], table, count)[0]


def two_sided_sum(m: int, x: float, table: ZeroTable, count: int) -> complex:
    """sum over +gamma and -gamma, each coefficient evaluated directly (realness check)."""
    terms = []
    lx = math.log(x)
    for z in table.zeros[:count]:
        for rho in (z.rho, z.rho.conjugate()):
            zp = z.zeta_prime if rho.imag > 0 else z.zeta_prime.conjugate()
            terms.append(coefficient_at(rho, m, zp) * np.exp(1j * rho.imag / 2 * lx))
    return fsum_complex(terms)


# ---------------------------------------------------------------------------
# c_m and the sums of Lemma-type diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CPartialResult:
    m: int
    partial_sums: np.ndarray  # 2 sum_{n<=N} |a(rho_n, m)|, N = 1..count
    exponent: float  # slope of log|a| against log gamma
    prefactor: float

    @property
    def total(self) -> float:
        return float(self.partial_sums[-1])


def c_m_partial(m: int, table: ZeroTable) -> CPartialResult:
    m = _check_m(m)
    mods = np.abs(coefficients(table, m))
    partial = 2.0 * np.cumsum(mods)
    if table.count >= 2:
        slope, icpt = np.polyfit(np.log(table.gammas), np.log(mods), 1)
    else:
        slope, icpt = math.nan, math.log(mods[0])
    return CPartialResult(m, partial, float(slope), float(math.exp(icpt)))


def quarter_increments(partial: np.ndarray) -> tuple[float, float]:
    """Growth of the partial sums over the first and the last quarter of the zeros."""
    n = len(partial)
    q = n // 4
    if q < 1:
        raise DomainError("need at least 4 partial sums")
    padded = np.concatenate([[0.0], partial])
    return float(padded[q] - padded[0]), float(padded[n] - padded[n - q])


def T_sums(b: float, table: ZeroTable) -> tuple[float, float]:
    """(sum 1/(gamma^b |zeta'(rho)|), sum 1/(gamma^b |zeta'(rho)|^2)) over the table."""
    if not b > 1:
        raise DomainError("T sums need b > 1")
    g = table.gammas
    zp = np.abs(table.zeta_primes)
    return math.fsum(1.0 / (g**b * zp)), math.fsum(1.0 / (g**b * zp**2))


# ---------------------------------------------------------------------------
# Smoothed sums and the oscillation scan
# ---------------------------------------------------------------------------


def _ingham_terms(m: int, T: float, table: ZeroTable) -> tuple[np.ndarray, np.ndarray]:
    half = table.gammas / 2
    n = int(np.searchsorted(half, T, side="right"))
    if T > half[-1]:
        # untabulated zeros could still have gamma/2 <= T
        raise RangeError(
            f"T = {T:g} reaches beyond the last tabulated zero (gamma/2 = {half[-1]:.6f})"
        )
    weights = 1.0 - half[:n] / T
    return half[:n], weights * coefficients(table, m, n)


def ingham_average(m: int, x0, T: float, table: ZeroTable):
    """S_T*(x0) = 2 Re sum_{gamma/2 <= T} (1 - gamma/(2T)) a(rho, m) x0^{i gamma/2}."""
    m = _check_m(m)
    if not T > 0:
        raise DomainError("T must be positive")
    scalar = np.ndim(x0) == 0
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if np.any(x0 <= 0):
        raise DomainError("x0 must be positive")
    half, r = _ingham_terms(m, T, table)
    out = np.zeros(x0.size)
    if half.size:
        for start in range(0, x0.size, _SCAN_CHUNK):
            lx = np.log(x0[start : start + _SCAN_CHUNK])
            terms = r[None, :] * np.exp(1j * np.outer(lx, half))
            out[start : start + _SCAN_CHUNK] = 2.0 * compensated_rowsum(terms.real)
    return float(out[0]) if scalar else out


def default_scan_grid(table: ZeroTable, points: int = SCAN_POINTS, periods: float = 1.0) -> np.ndarray:
    """Log-spaced x0 over ``periods`` fundamental periods e^{4 pi/gamma_1} of the lowest zero."""
    top = periods * 4 * math.pi / float(table.gammas[0])
    return np.exp(np.linspace(0.0, top, points))


@dataclass(frozen=True)
class OscillationScanResult:
    m: int
    T: float
    best_high: tuple[float, float]
    best_low: tuple[float, float]
    zero_count_used: int


def oscillation_scan(m: int, T: float, table: ZeroTable, x0_grid=None) -> OscillationScanResult:
    """Max and min of S_T* over a grid; ties resolve to the smallest x0."""
    m = _check_m(m)
    grid = default_scan_grid(table) if x0_grid is None else np.asarray(x0_grid, dtype=float)
    if grid.size == 0:
        raise DomainError("scan grid is empty")
    vals = ingham_average(m, grid, T, table)
    vals = np.atleast_1d(vals)
    hi = _first_extreme(grid, vals, vals.max())
    lo = _first_extreme(grid, vals, vals.min())
    used = int(np.searchsorted(table.gammas / 2, T, side="right"))
    return OscillationScanResult(m, float(T), hi, lo, used)


def _first_extreme(grid: np.ndarray, vals: np.ndarray, target: float) -> tuple[float, float]:
    idx = np.flatnonzero(vals == target)
    i = idx[np.argmin(grid[idx])]
    return float(grid[i]), float(vals[i])


# ---------------------------------------------------------------------------
# Residue cross-check
# ---------------------------------------------------------------------------


def contour_residue(rho: complex, m: int, x: float = 10.0, radius: float = 1e-3, nodes: int = 64) -> complex:
    """Residue at s = rho/2 - 1 of the Riesz kernel integrand, divided by x^{rho/2+m-1}."""
    center = complex(rho) / 2 - 1
    return kernel_residue(center, m, x, radius, nodes) / np.exp((center + m) * math.log(x))


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

PREDICTION_HEADER = ["x", "m", "zero_count", "prediction", "scaled_prediction", "tail_estimate"]
SCAN_HEADER = ["x0", "value"]


def write_predictions_csv(records, target) -> None:
    rows = (
        [g17(r.x), r.m, r.zero_count, g17(r.prediction), g17(r.scaled_prediction), g17(r.tail_estimate)]
        for r in records
    )
    write_csv(target, PREDICTION_HEADER, rows)


def write_scan_csv(grid, values, target) -> None:
    rows = ([g17(x0), g17(v)] for x0, v in zip(np.asarray(grid).tolist(), np.asarray(values).tolist()))
    write_csv(target, SCAN_HEADER, rows)
