"""Riemann zeta evaluation, the correction product G(s), and zero tables.

zeta is evaluated by Euler-Maclaurin summation; the number of direct terms N
and Bernoulli corrections K are chosen so that the standard remainder bound
falls below the requested absolute error.  Everything works on numpy arrays
internally; the public scalar functions are thin wrappers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import (
    ConsistencyError,
    DomainError,
    OrderingError,
    PoleError,
    RangeError,
    ZeroFileError,
    ZeroValidationError,
)
from .numerics import (
    bernoulli_even,
    clog1p,
    compensated_rowsum,
    fsum_complex,
    mobius_up_to,
    odd_primes_up_to,
    primes_up_to,
)

EULER_GAMMA = 0.57721566490153286061
LOG_2PI = 1.8378770664093454836

MAX_IMAG = 1.0e5
DEFAULT_TARGET = 1e-13
MAX_BERNOULLI = 40
G_PRIME_LIMIT = 10**6
G_ACCEL_PRIME_LIMIT = 10**4
DEFAULT_ZERO_TOLERANCE = 1e-4

_B2K = np.array(bernoulli_even(MAX_BERNOULLI + 1))
_LOG_ABS_B2K = np.log(np.abs(_B2K))
_LOG_FACT = np.array([math.lgamma(n + 1) for n in range(2 * MAX_BERNOULLI + 4)])


# ---------------------------------------------------------------------------
# Euler-Maclaurin core
# ---------------------------------------------------------------------------


def _em_plan(s: np.ndarray, a: int, target: float) -> tuple[str, int, int]:
    """Pick the evaluation scheme for a block of points sharing one plan."""
    sig = float(np.min(s.real))
    tmax = float(np.max(np.abs(s.imag)))
    if sig > 2.0:
        # direct summation: sum_{n>M} n^-sig <= M^(1-sig)/(sig-1) + M^-sig
        m = a
        while m < a + 400:
            if m ** (1 - sig) / (sig - 1) + m ** (-sig) < target:
                return "direct", m, 0
            m += 1
    n = max(a + 1, 10, int(math.ceil(tmax / math.pi)) + 1)
    for _ in range(12):
        best = math.inf
        for k in range(1, MAX_BERNOULLI + 1):
            order = 2 * k + 1  # first omitted term uses B_{2k+2} and (s)_{2k+1}
            if sig + order <= 0:
                continue
            j = np.arange(order)
            # floor at 1: a vanishing factor kills the zeta remainder but not its derivative
            logpoch = np.sum(np.log(np.maximum(np.abs(s[:, None] + j[None, :]), 1.0)), axis=1)
            log_term = (
                _LOG_ABS_B2K[k]
                - _LOG_FACT[2 * k + 2]
                + logpoch
                - (s.real + order) * math.log(n)
            )
            ratio = np.abs(s + order) / (s.real + order)
            bound = float(np.max(np.exp(log_term) * ratio))
            if bound < target:
                return "em", n, k
            if bound > best:
                break
            best = bound
        n *= 2
    raise RangeError("Euler-Maclaurin plan did not converge")


def _em_block(s: np.ndarray, a: int, target: float, deriv: bool):
    """sum_{n>=a} n^-s (continued) and optionally its s-derivative."""
    kind, n_end, k_max = _em_plan(s, a, target)
    if kind == "direct":
        n = np.arange(a, n_end + 1, dtype=float)
    else:
        n = np.arange(a, n_end, dtype=float)
    logn = np.log(n)
    terms = np.exp(-np.outer(s, logn)) if n.size else np.zeros((s.size, 0), complex)
    val = compensated_rowsum(terms) if n.size else np.zeros(s.size, complex)
    dval = -compensated_rowsum(terms * logn) if (deriv and n.size) else np.zeros(s.size, complex)
    if kind == "direct":
        return val, dval
    big_n = float(n_end)
    log_n = math.log(big_n)
    ns = np.exp(-s * log_n)
    sm1 = s - 1.0
    corr = big_n * ns / sm1 + 0.5 * ns
    dcorr = big_n * ns * (-log_n / sm1 - 1.0 / sm1**2) - 0.5 * log_n * ns
    poch = s.copy()
    dpoch = np.ones_like(s)
    scale = ns / big_n  # N^{-s-1}
    for k in range(1, k_max + 1):
        c = _B2K[k - 1] / math.exp(_LOG_FACT[2 * k])
        corr = corr + c * poch * scale
        if deriv:
            dcorr = dcorr + c * scale * (dpoch - log_n * poch)
        # advance (s)_{2k-1} -> (s)_{2k+1}
        f1 = s + (2 * k - 1)
        f2 = s + 2 * k
        dpoch = dpoch * f1 * f2 + poch * (f1 + f2)
        poch = poch * f1 * f2
        scale = scale / (big_n * big_n)
    return val + corr, dval + dcorr


def dirichlet_tail(s, a: int = 1, target: float = DEFAULT_TARGET, deriv: bool = False):
    """Analytically continued sum_{n>=a} n^-s for an array of points.

    Points are grouped by |Im s| so that each group gets its own plan.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    out = np.empty_like(s)
    dout = np.empty_like(s)
    for idx in _plan_groups(np.abs(s.imag)):
        v, dv = _em_block(s[idx], a, target, deriv)
        out[idx] = v
        dout[idx] = dv
    return (out, dout) if deriv else out


def _plan_groups(t: np.ndarray, size: int = 128):
    """Split indices, sorted by |t|, into groups of similar height.

    A shared plan uses the largest |t| in the group; mixing very different
    heights would give low points far more terms (and phase rounding) than
    they need.
    """
    order = np.argsort(t, kind="stable")
    start = 0
    while start < order.size:
        lo = t[order[start]]
        stop = start + 1
        while stop < order.size and stop - start < size and t[order[stop]] <= 2.0 * lo + 20.0:
            stop += 1
        yield order[start:stop]
        start = stop


def _check_point(s: complex, target: float) -> complex:
    s = complex(s)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise DomainError(f"non-finite argument {s}")
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if abs(s.imag) > MAX_IMAG:
        raise RangeError(f"|Im s| = {abs(s.imag):g} exceeds supported range {MAX_IMAG:g}")
    if target < 1e-14:
        raise DomainError("target_abs_error must be >= 1e-14")
    return s


def zeta(s, target_abs_error: float = DEFAULT_TARGET) -> complex:
    """Riemann zeta at a complex point (analytic continuation, s != 1)."""
    s = _check_point(s, target_abs_error)
    return complex(dirichlet_tail(np.array([s]), 1, target_abs_error)[0])


def zeta_array(s, target_abs_error: float = DEFAULT_TARGET) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    if np.any(np.abs(s.imag) > MAX_IMAG):
        raise RangeError(f"|Im s| exceeds supported range {MAX_IMAG:g}")
    if np.any(s == 1):
        raise PoleError("zeta has a pole at s = 1")
    return dirichlet_tail(s.ravel(), 1, target_abs_error).reshape(s.shape)


def zeta_derivative(
    s, target_abs_error: float = DEFAULT_TARGET, check: bool = True
) -> complex:
    """zeta'(s) by the differentiated Euler-Maclaurin sum.

    With ``check`` the result is compared with a five-point central difference
    of zeta (step 1e-5); disagreement beyond 1e-6 raises ConsistencyError.
    """
    s = _check_point(s, target_abs_error)
    _, d = dirichlet_tail(np.array([s]), 1, target_abs_error * 1e-2, deriv=True)
    d = complex(d[0])
    if check:
        fd = finite_difference_derivative(s)
        if fd is not None and abs(fd - d) > 1e-6 * max(1.0, abs(d)):
            raise ConsistencyError(
                f"zeta'({s}) = {d} disagrees with finite difference {fd}"
            )
    return d


def finite_difference_derivative(s: complex, h: float = 1e-5) -> complex | None:
    """Five-point central difference of zeta; None too close to the pole."""
    s = complex(s)
    if abs(s - 1) < 3 * h:
        return None
    pts = s + h * np.array([-2.0, -1.0, 1.0, 2.0])
    f = dirichlet_tail(pts, 1, 1e-14)
    return complex((f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h))


# ---------------------------------------------------------------------------
# Prime zeta function tails
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _mobius_table() -> tuple[int, ...]:
    return tuple(mobius_up_to(200))


def prime_zeta_tail(w, prime_limit: int) -> np.ndarray:
    """sum_{p > prime_limit} p^-w for Re w > 1.05, via sum_k mu(k)/k log zeta(kw)."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if np.any(w.real <= 1.05):
        raise DomainError("prime zeta tail needs Re w > 1.05")
    mu = _mobius_table()
    owners, points, weights = [], [], []
    for i, wi in enumerate(w):
        kmax = int(math.ceil(52.0 / (wi.real * math.log(2.0))))
        for k in range(1, kmax + 1):
            if mu[k]:
                owners.append(i)
                points.append(k * wi)
                weights.append(mu[k] / k)
    points = np.array(points)
    zm1 = dirichlet_tail(points, 2, 1e-18)
    logs = clog1p(zm1) * np.array(weights)
    owners = np.array(owners)
    full = np.array([fsum_complex(logs[owners == i]) for i in range(w.size)])
    ps = primes_up_to(prime_limit).astype(float)
    partial = np.array([fsum_complex(np.exp(-wi * np.log(ps))) for wi in w])
    return full - partial


def chebyshev_prime_tail(f, prime_limit: int) -> float:
    """Estimate sum_{p > P} f(p) for smooth decreasing f from the prime number theorem.

    Uses sum_{p>P} f(p) ~ int_P^inf f(t)/log t dt + f(P)/log P * (P - theta(P))
    with the exact Chebyshev theta(P); the residual is driven by theta(t) - t
    beyond P.
    """
    p = float(prime_limit)
    theta = math.fsum(np.log(primes_up_to(prime_limit).astype(float)))
    lo = math.log(p)
    val, _ = integrate.quad(
        lambda u: f(math.exp(u)) * math.exp(u) / u, lo, lo + 80.0,
        epsabs=1e-22, epsrel=1e-13, limit=400,
    )
    return val + f(p) / lo * (p - theta)


# ---------------------------------------------------------------------------
# The correction Euler product G(s)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EulerProduct:
    value: complex
    tail_bound: float
    prime_limit: int
    tail: str = "none"


def _log_g_truncated(s: np.ndarray, prime_limit: int) -> np.ndarray:
    ps = odd_primes_up_to(prime_limit).astype(float)
    logp = np.log(ps)
    out = np.empty(s.shape, dtype=complex)
    chunk = max(1, 2_000_000 // max(ps.size, 1))
    for start in range(0, s.size, chunk):
        sc = s[start : start + chunk]
        pw = np.exp(np.outer(sc + 1.0, logp))
        w = 2.0 / ((ps - 2.0) * (pw + 1.0))
        lw = clog1p(w)
        if sc.size <= 4:
            out[start : start + chunk] = [fsum_complex(row) for row in lw]
        else:
            out[start : start + chunk] = compensated_rowsum(lw)
    return out


def _truncation_bound(sigma: float, prime_limit: int) -> float:
    """Bound on sum_{p>P} |log(1 + 2/((p-2)(p^{s+1}+1)))|."""
    alpha = sigma + 1.0
    p = float(prime_limit)
    return 1.3 * 2.0 * p / (p - 2.0) / (1.0 - p ** (-alpha)) / (alpha * p**alpha * math.log(p))


def _g_tail_series(s: complex, prime_limit: int, tol: float = 1e-18) -> complex:
    """sum_{p>P} log(1 + 2/((p-2)(p^{s+1}+1))) by expansion in p^-1 and p^-(s+1).

    Each factor equals (1 + z p/(p-2))/(1 + z) with z = p^-(s+1), so its log is
    sum_{j>=1} (-1)^{j+1}/j z^j ((1-2/p)^-j - 1)
      = sum_{j>=1, a>=1} (-1)^{j+1} C(a+j-1, a) 2^a / j * p^{-a - j(s+1)}.
    """
    alpha = s.real + 1.0
    logp = math.log(prime_limit)
    exps, coefs = [], []
    a = 1
    while True:
        added = False
        j = 1
        while True:
            re_w = a + j * alpha
            c = (-1) ** (j + 1) * math.comb(a + j - 1, a) * 2.0**a / j
            est = abs(c) * math.exp((1.0 - re_w) * logp) / ((re_w - 1.0) * logp)
            if est < tol:
                break
            exps.append(a + j * (s + 1.0))
            coefs.append(c)
            added = True
            j += 1
        if not added:
            break
        a += 1
    if not exps:
        return 0j
    tails = prime_zeta_tail(np.array(exps), prime_limit)
    return fsum_complex(np.array(coefs) * tails)


def G(s, prime_limit: int = G_PRIME_LIMIT, tail: str = "none") -> EulerProduct:
    """The product over odd primes of 1 + 2/((p-2)(p^{s+1}+1)), Re s > -1.

    ``tail`` selects how primes beyond ``prime_limit`` are handled:
    "none" truncates and reports a bound for the neglected factors,
    "prime_zeta" adds the neglected log-factors through prime zeta tails
    (needs prime_limit >= 100 and Re s >= -0.9), "chebyshev" adds a
    prime-number-theorem estimate (real s only).
    """
    s = complex(s)
    if s.real <= -1.0:
        raise DomainError("G(s) diverges for Re s <= -1")
    if prime_limit < 3:
        raise DomainError("prime_limit must be >= 3")
    logg = complex(_log_g_truncated(np.array([s]), prime_limit)[0])
    trunc = _truncation_bound(s.real, prime_limit)
    if tail == "none":
        value = np.exp(logg)
        bound = abs(value) * math.expm1(trunc)
    elif tail == "prime_zeta":
        if prime_limit < 100 or s.real < -0.9:
            raise DomainError("prime_zeta tail needs prime_limit >= 100 and Re s >= -0.9")
        value = np.exp(logg + _g_tail_series(s, prime_limit))
        bound = abs(value) * 1e-13
    elif tail == "chebyshev":
        if s.imag != 0:
            raise DomainError("chebyshev tail is only available for real s")
        sr = s.real
        est = chebyshev_prime_tail(
            lambda t: math.log1p(2.0 / ((t - 2.0) * (t ** (sr + 1.0) + 1.0))), prime_limit
        )
        value = np.exp(logg + est)
        bound = abs(value) * trunc * 2.0 / math.sqrt(prime_limit)
    else:
        raise ValueError(f"unknown tail method {tail!r}")
    return EulerProduct(complex(value), float(bound), prime_limit, tail)


def G_array(s, prime_limit: int) -> np.ndarray:
    """Truncated G on an array of points (no tail handling)."""
    s = np.asarray(s, dtype=complex)
    if np.any(s.real <= -1.0):
        raise DomainError("G(s) diverges for Re s <= -1")
    return np.exp(_log_g_truncated(s.ravel(), prime_limit)).reshape(s.shape)


@lru_cache(maxsize=4096)
def G_best(s: complex) -> complex:
    """G to full double precision (prime zeta tail beyond 10^4)."""
    return G(s, G_ACCEL_PRIME_LIMIT, tail="prime_zeta").value


def G_log_derivative_at_0(
    prime_limit: int = G_PRIME_LIMIT, tail_corrected: bool = True
) -> tuple[float, float]:
    """(G'/G)(0) = sum_{p>2} -2p log p / ((p-2)(p+1)^2 (1 + 2/((p-2)(p+1)))).

    Returns (value, tail_bound).  The tail beyond ``prime_limit`` is either
    dropped (bound ~ 2/P) or estimated from the prime number theorem.
    """
    ps = odd_primes_up_to(prime_limit).astype(float)

    def term(p):
        return -2.0 * p * np.log(p) / (
            (p - 2.0) * (p + 1.0) ** 2 * (1.0 + 2.0 / ((p - 2.0) * (p + 1.0)))
        )

    val = math.fsum(term(ps))
    p = float(prime_limit)
    if tail_corrected:
        val += chebyshev_prime_tail(lambda t: float(term(t)), prime_limit)
        bound = 8.0 / p**1.5
    else:
        bound = 2.5 / p
    return val, bound


# ---------------------------------------------------------------------------
# Zero tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZetaZero:
    gamma: float
    zeta_prime: complex
    residual: float
    index: int

    @property
    def rho(self) -> complex:
        return complex(0.5, self.gamma)


@dataclass(frozen=True)
class ZeroTable:
    zeros: tuple[ZetaZero, ...]
    source_path: str = ""
    count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "count", len(self.zeros))
        if self.count < 1:
            raise ZeroFileError("zero table is empty")
        g = [z.gamma for z in self.zeros]
        if any(b <= a for a, b in zip(g, g[1:])):
            raise OrderingError("zero ordinates must be strictly ascending")

    @property
    def gammas(self) -> np.ndarray:
        return np.array([z.gamma for z in self.zeros])

    @property
    def zeta_primes(self) -> np.ndarray:
        return np.array([z.zeta_prime for z in self.zeros])

    def head(self, count: int) -> "ZeroTable":
        return ZeroTable(self.zeros[:count], self.source_path)


def parse_zero_file(path) -> list[float]:
    gammas: list[float] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                g = float(line.split()[0])
            except ValueError:
                raise ZeroFileError(f"cannot parse {line!r}", lineno) from None
            if not math.isfinite(g) or g <= 0:
                raise ZeroFileError(f"ordinate must be positive, got {line!r}", lineno)
            if gammas and g <= gammas[-1]:
                raise OrderingError(
                    f"line {lineno}: {g!r} is not above the previous ordinate {gammas[-1]!r}"
                )
            gammas.append(g)
    if not gammas:
        raise ZeroFileError(f"{path}: no ordinates found")
    return gammas


def validate_ordinate(gamma: float) -> tuple[float, complex]:
    rho = complex(0.5, gamma)
    residual = abs(zeta(rho, 1e-14))
    return residual, zeta_derivative(rho, 1e-14)


def load_zeros(
    path, validation_tolerance: float = DEFAULT_ZERO_TOLERANCE, workers: int = 1
) -> ZeroTable:
    """Read ordinates (one per line, '#' comments) and validate each one."""
    gammas = parse_zero_file(path)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            checked = list(ex.map(validate_ordinate, gammas))
    else:
        checked = [validate_ordinate(g) for g in gammas]
    zeros = []
    for i, (g, (res, zp)) in enumerate(zip(gammas, checked), start=1):
        if res > validation_tolerance:
            raise ZeroValidationError(
                f"gamma = {g!r}: |zeta(1/2 + i gamma)| = {res:.3e} exceeds {validation_tolerance:g}"
            )
        zeros.append(ZetaZero(g, zp, res, i))
    return ZeroTable(tuple(zeros), str(path))


def packaged_zeros_path() -> Path:
    return Path(__file__).with_name("data") / "zeros_100.txt"


@lru_cache(maxsize=2)
def default_zero_table(count: int = 100) -> ZeroTable:
    return load_zeros(packaged_zeros_path()).head(count)
