"""Ingham-smoothed oscillation bounds for increasing T."""

import argparse

from riesz_explicit.explicit_formula import default_scan_grid, oscillation_scan
from riesz_explicit.zeta_engine import default_zero_table


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--T", type=float, nargs="+", default=[10, 20, 40, 80, 110])
    ap.add_argument("--points", type=int, default=100_000)
    args = ap.parse_args()

    zeros = default_zero_table()
    grid = default_scan_grid(zeros, args.points)
    print("T,zeros_used,limsup_lower_bound,liminf_upper_bound")
    for T in args.T:
        r = oscillation_scan(args.m, T, zeros, grid)
        print(f"{T:g},{r.zero_count_used},{r.best_high[1]:.6g},{r.best_low[1]:.6g}")


if __name__ == "__main__":
    main()
