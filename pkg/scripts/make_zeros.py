"""Write the ordinates of the first N nontrivial zeta zeros (mpmath) to a text file."""

import argparse

import mpmath


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--digits", type=int, default=12)
    ap.add_argument("--out", default="src/riesz_explicit/data/zeros_100.txt")
    args = ap.parse_args()
    mpmath.mp.dps = 30
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# imaginary parts of the first {args.count} nontrivial zeros of zeta\n")
        fh.write("# generated by scripts/make_zeros.py (mpmath.zetazero)\n")
        for n in range(1, args.count + 1):
            g = mpmath.zetazero(n).imag
            q = int(mpmath.nint(g * 10**args.digits))
            whole, frac = divmod(q, 10**args.digits)
            fh.write(f"{whole}.{frac:0{args.digits}d}\n")


if __name__ == "__main__":
    main()
