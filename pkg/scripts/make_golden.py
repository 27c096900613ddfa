"""Independent high-precision evaluation of the coefficients a(rho, m).

Everything here is mpmath at 30 digits: zeta, zeta', the twin prime constant
and the Euler product G (exact product over p <= 2000 plus a prime-zeta
expansion of the remaining factors).  Nothing is imported from riesz_explicit
so the file can serve as an oracle for it.
"""

import argparse
import csv
import math

import mpmath as mp

P0 = 2000


def odd_primes(n):
    sieve = bytearray([1]) * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [p for p in range(3, n + 1) if sieve[p]]


PRIMES = odd_primes(P0)


def G(s):
    logp = mp.fsum(mp.log(1 + 2 / ((p - 2) * (mp.power(p, s + 1) + 1))) for p in PRIMES)
    # log(1 + 2/((p-2)(p^{s+1}+1))) = sum_{a,j>=1} (-1)^{j+1} C(a+j-1,a) 2^a/j p^{-a-j(s+1)}
    digits = mp.mp.dps + 5
    tail = mp.mpf(0)
    for a in range(1, 200):
        if a * math.log(P0) > digits * math.log(10) + 10:
            break
        for j in range(1, 400):
            w = a + j * (s + 1)
            if mp.re(w) * math.log(P0) > digits * math.log(10) + 10:
                break
            coef = (-1) ** (j + 1) * mp.binomial(a + j - 1, a) * mp.mpf(2) ** a / j
            head = mp.fsum(mp.power(p, -w) for p in [2] + PRIMES)
            tail += coef * (mp.primezeta(w) - head)
    return mp.exp(logp + tail)


def coefficients(gamma, ms):
    rho = mp.mpc(mp.mpf("0.5"), gamma)
    h = rho / 2
    common = (
        2 * mp.twinprime * mp.zeta(h - 1) * mp.zeta(h) * G(h - 1)
        / ((mp.power(2, h) + 1) * mp.zeta(rho, derivative=1))
    )
    out = {}
    for m in ms:
        den = mp.mpf(1)
        for j in range(-1, m):
            den *= h + j
        out[m] = mp.factorial(m) * common / den
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--zeros", default="src/riesz_explicit/data/zeros_100.txt")
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--max-m", type=int, default=4)
    ap.add_argument("--dps", type=int, default=30)
    ap.add_argument("--out", default="src/riesz_explicit/data/coefficients_golden.csv")
    args = ap.parse_args()
    mp.mp.dps = args.dps
    with open(args.zeros, encoding="utf-8") as fh:
        gammas = [ln.split()[0] for ln in fh if ln.strip() and not ln.startswith("#")]
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["gamma", "m", "re_a", "im_a"])
        for g in gammas[: args.count]:
            vals = coefficients(mp.mpf(g), range(1, args.max_m + 1))
            for m, v in vals.items():
                w.writerow([g, m, mp.nstr(v.real, 17), mp.nstr(v.imag, 17)])
            print(g, mp.nstr(abs(vals[2]), 12), flush=True)


if __name__ == "__main__":
    main()
