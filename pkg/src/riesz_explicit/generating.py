"""The Dirichlet series F(s) = sum S(k) k^-s: truncated series and closed form."""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, PoleError
from .numerics import fsum_complex
from .singular_series import SingularSeriesTable, best_c2, sieve_singular_series
from .zeta_engine import G, G_array, G_best, zeta, zeta_array

POLE_DISTANCE = 1e-8
MELLIN_G_PRIME_LIMIT = 2000


def _g_for_closed_form(s: complex) -> complex:
    if s.real >= -0.9:
        return G_best(s)
    # prime zeta tails need Re(s) >= -0.9; fall back to the long truncated product
    return G(s, 10**6).value


def F_closed(s) -> complex:
    """(4 C2 / (2^{s+1} + 1)) zeta(s) zeta(s+1) G(s) / zeta(2s+2), valid for Re s > -1."""
    s = complex(s)
    if s.real <= -1.0:
        raise DomainError("closed form of F is only valid for Re s > -1")
    if abs(s - 1) < POLE_DISTANCE:
        raise PoleError("s is within 1e-8 of the simple pole at s = 1")
    if abs(s) < POLE_DISTANCE:
        raise PoleError("s is within 1e-8 of the double pole at s = 0")
    z2 = zeta(2 * s + 2)
    if abs(z2) < 2 * POLE_DISTANCE:
        raise PoleError(
            f"s is within ~1e-8 of a pole s = rho/2 - 1 (zeta(2s+2) = {abs(z2):.2e} at 2s+2 = {2 * s + 2})"
        )
    c2 = best_c2()
    return 4 * c2 / (2 ** (s + 1) + 1) * zeta(s) * zeta(s + 1) * _g_for_closed_form(s) / z2


def F_closed_array(s, g_prime_limit: int = MELLIN_G_PRIME_LIMIT) -> np.ndarray:
    """Vectorised closed form with G truncated at ``g_prime_limit`` (for quadrature)."""
    s = np.asarray(s, dtype=complex)
    c2 = best_c2()
    return (
        4 * c2 / (2.0 ** (s + 1) + 1)
        * zeta_array(s) * zeta_array(s + 1)
        * G_array(s, g_prime_limit) / zeta_array(2 * s + 2)
    )


def F_series(s, K: int, table: SingularSeriesTable | None = None) -> complex:
    """sum_{k <= K} S(k) k^-s for Re s > 1."""
    s = complex(s)
    if s.real <= 1.0:
        raise DomainError("the Dirichlet series for F converges only for Re s > 1")
    if K < 2:
        raise DomainError("K must be >= 2")
    if table is None or table.limit < K:
        table = sieve_singular_series(K)
    k = np.arange(2, K + 1, 2, dtype=float)
    vals = table.values[2 : K + 1 : 2]
    return fsum_complex(vals * np.exp(-s * np.log(k)))


def F_series_tail_bound(s, K: int) -> float:
    """Bound for |F(s) - F_series(s, K)| from the mean value 1 of S(k)."""
    sig = complex(s).real
    return 1.2 * K ** (1 - sig) / (sig - 1) + 10.0 * K ** (-sig) * math.log(K)
