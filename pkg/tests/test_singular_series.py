import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riesz_explicit.errors import DomainError, ResourceError
from riesz_explicit.numerics import odd_primes_up_to
from riesz_explicit.singular_series import (
    best_c2,
    export_csv,
    load_table,
    save_table,
    sieve_singular_series,
    singular_series,
    twin_prime_constant,
)

C2_REF = float(mpmath.twinprime)


def test_c2_single_factor():
    c = twin_prime_constant(3)
    assert c.value == 0.75
    assert not c.tail_corrected


def test_c2_truncated_five_digits():
    c = twin_prime_constant(10**6)
    assert f"{c.value:.5f}" == "0.66016"
    assert c.value > C2_REF
    assert c.value - C2_REF < c.tail_bound


def test_c2_tail_corrected_against_mpmath():
    mpmath.mp.dps = 30
    ref = mpmath.twinprime
    c = twin_prime_constant(10**6, tail_corrected=True)
    assert abs(c.value - float(ref)) < 1e-10 * float(ref)
    assert abs(best_c2() - float(ref)) < 1e-14


def test_c2_decreasing_in_limit():
    vals = [twin_prime_constant(p).value for p in (3, 5, 7, 100, 1000, 10**5)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert all(0 < v < 1 for v in vals)


def test_c2_domain():
    with pytest.raises(DomainError):
        twin_prime_constant(2)


def test_pointwise_values():
    c2 = best_c2()
    assert singular_series(3) == 0
    assert singular_series(2) == 2 * c2
    assert singular_series(6) == pytest.approx(4 * c2, rel=1e-15)
    assert singular_series(10) == pytest.approx(8 / 3 * c2, rel=1e-15)
    with pytest.raises(DomainError):
        singular_series(0)
    with pytest.raises(DomainError):
        singular_series(-4)


def test_sieve_small():
    c2 = best_c2()
    t = sieve_singular_series(10)
    want = [0, 2 * c2, 0, 2 * c2, 0, 4 * c2, 0, 2 * c2, 0, 8 / 3 * c2]
    np.testing.assert_allclose(t.values[1:], want, rtol=1e-15)
    assert sieve_singular_series(1).values[1:].tolist() == [0.0]


def test_sieve_matches_pointwise_exhaustive():
    n = 10**5
    t = sieve_singular_series(n)
    ref = np.array([0.0] + [singular_series(k) for k in range(1, n + 1)])
    np.testing.assert_allclose(t.values, ref, rtol=1e-12, atol=0)


def test_sieve_invariants(table_1e6):
    v = table_1e6.values
    assert np.all(v[1::2] == 0)
    assert np.all(v[2::2] > 0)
    powers = [v[2**j] for j in range(1, 20)]
    assert len(set(powers)) == 1
    assert v[6] == v[12] == v[24]
    # same odd radical
    m = np.arange(1, 10**6 // 4 + 1)
    assert np.array_equal(v[2 * m], v[4 * m])


def test_product_bound():
    n = 3000
    t = sieve_singular_series(n)
    c2 = best_c2()
    ps = odd_primes_up_to(n)
    partial = np.cumprod((ps - 1) / (ps - 2))
    for k in range(2, n + 1, 2):
        idx = np.searchsorted(ps, k, side="right")
        upper = 2 * c2 * (partial[idx - 1] if idx else 1.0)
        assert 2 * c2 * (1 - 1e-15) <= t.values[k] <= upper * (1 + 1e-12)


def test_mean_value(table_1e6):
    assert abs(table_1e6.mean_value() - 1) < 0.01
    assert abs(sieve_singular_series(10**4).mean_value() - 1) < 0.05


def test_exact_mode(exact_table):
    assert exact_table.exact_ratio(10) == Fraction(4, 3)
    assert exact_table.exact_ratio(30) == Fraction(8, 3)
    assert exact_table.exact_ratio(7) == 0
    for k in range(1, 10**4 + 1):
        assert exact_table.ratios[k] == pytest.approx(float(exact_table.exact_ratio(k)), rel=1e-12)


def test_exact_mode_limit():
    with pytest.raises(ResourceError):
        sieve_singular_series(10**5 + 1, exact_mode=True)


def test_allocation_failure_reports_sizes():
    with pytest.raises(ResourceError, match="bytes"):
        sieve_singular_series(10**15)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=10**9))
def test_pointwise_properties(k):
    v = singular_series(k)
    if k % 2:
        assert v == 0
    else:
        assert v >= 2 * best_c2() * (1 - 1e-15)
        assert singular_series(2 * k) == v


def test_binary_roundtrip(tmp_path):
    t = sieve_singular_series(10)
    p = tmp_path / "t.bin"
    save_table(t, p)
    raw = p.read_bytes()
    assert raw[:8] == b"SINGSER1"
    assert len(raw) == 16 + 80
    back = load_table(p)
    assert back.limit == 10
    assert np.array_equal(back.ratios, t.ratios)
    save_table(back, tmp_path / "u.bin")
    assert (tmp_path / "u.bin").read_bytes() == raw


def test_load_rejects_garbage(tmp_path):
    p = tmp_path / "bad.bin"
    p.write_bytes(b"NOTATABLE" + bytes(20))
    with pytest.raises(ValueError):
        load_table(p)


def test_csv_export(tmp_path):
    p = tmp_path / "t.csv"
    export_csv(sieve_singular_series(6), p)
    lines = p.read_text().splitlines()
    assert lines[0] == "k,singular_series"
    assert lines[1] == "1,0"
    assert float(lines[6].split(",")[1]) == 4 * best_c2()
    assert math.isclose(float(lines[2].split(",")[1]), 2 * best_c2(), rel_tol=0, abs_tol=0)
