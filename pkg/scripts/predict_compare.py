"""Compare E_m(x) with the truncated zero sum on a log grid.

Also fits E_m - prediction to x^(m-1) (a log x + b): a large share of the
mismatch is that single smooth term, which the zero sum does not model.
"""

import argparse

import numpy as np

from riesz_explicit.cli import comparison_summary
from riesz_explicit.explicit_formula import zero_sum_predictions
from riesz_explicit.riesz_means import error_term_grid
from riesz_explicit.singular_series import sieve_singular_series
from riesz_explicit.zeta_engine import default_zero_table


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--x-start", type=float, default=1e3)
    ap.add_argument("--x-stop", type=float, default=1e6)
    ap.add_argument("--x-count", type=int, default=200)
    ap.add_argument("--zeros", type=int, default=100)
    args = ap.parse_args()

    xs = np.geomspace(args.x_start, args.x_stop, args.x_count)
    xs[0], xs[-1] = args.x_start, args.x_stop
    table = sieve_singular_series(int(np.ceil(args.x_stop)))
    evals = error_term_grid(args.m, xs, table)
    preds = zero_sum_predictions(args.m, xs, default_zero_table(), args.zeros)
    for key, val in comparison_summary(args.m, evals, preds).items():
        print(f"{key:24s} {val:.6g}")

    resid = np.array([e.e_m - p.prediction for e, p in zip(evals, preds)]) / xs ** (args.m - 1)
    a, b = np.polyfit(np.log(xs), resid, 1)
    print(f"fit E_m - prediction ~ x^(m-1) ({a:.4f} log x + {b:.4f})")
    left = resid - (a * np.log(xs) + b)
    corrected = np.array([e.scaled for e in evals]) - (a * np.log(xs) + b) * xs ** -0.25
    p_scaled = np.array([p.scaled_prediction for p in preds])
    print(f"correlation after removing the fit   {np.corrcoef(p_scaled, corrected)[0, 1]:.4f}")
    print(f"max |remaining residual| / x^(m-1)   {np.max(np.abs(left)):.4f}")


if __name__ == "__main__":
    main()
