"""Command-line front end.

Exit codes: 0 success, 2 configuration or parse error, 3 verification
failure, 4 resource error.  Settings come from (lowest to highest priority)
built-in defaults, a flat key=value config file (--config, or the path in
RIESZ_EXPLICIT_CONFIG) and command-line flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import explicit_formula as ef
from .csvio import g17, write_csv
from .errors import (
    DomainError,
    OrderingError,
    RangeError,
    ResourceError,
    ZeroFileError,
    ZeroValidationError,
)
from .riesz_means import check_x_cap, error_term_grid, write_evaluations_csv
from .singular_series import (
    load_table,
    save_table,
    sieve_singular_series,
    twin_prime_constant,
)
from .zeta_engine import (
    DEFAULT_ZERO_TOLERANCE,
    G,
    G_log_derivative_at_0,
    load_zeros,
    packaged_zeros_path,
    parse_zero_file,
    validate_ordinate,
    zeta,
    zeta_derivative,
)

ENV_CONFIG = "RIESZ_EXPLICIT_CONFIG"
IDENTITY_TOLERANCE = 1e-8

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3
EXIT_RESOURCE = 4


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    m: int = 2
    x_start: float = 1e3
    x_stop: float = 1e6
    x_count: int = 200
    x_spacing: str = "log"
    table_path: str = ""
    zeros_path: str = ""
    zero_count: int = 100
    output_path: str = ""
    prime_limit: int = 10**7
    T: float = 10.0
    force: bool = False
    limit: int = 0
    scan_points: int = ef.SCAN_POINTS
    tolerance: float = DEFAULT_ZERO_TOLERANCE

    def validate(self) -> None:
        if self.m < 1:
            raise ConfigError("m must be >= 1")
        if self.x_count < 1:
            raise ConfigError("x_count must be >= 1")
        if self.x_spacing not in ("log", "linear"):
            raise ConfigError("x_spacing must be 'log' or 'linear'")
        if not 0 < self.x_start <= self.x_stop:
            raise ConfigError("need 0 < x_start <= x_stop")
        if self.zero_count < 1:
            raise ConfigError("zero_count must be >= 1")
        if self.scan_points < 1:
            raise ConfigError("scan_points must be >= 1")

    def x_grid(self) -> np.ndarray:
        if self.x_count == 1:
            return np.array([float(self.x_start)])
        if self.x_spacing == "log":
            xs = np.exp(np.linspace(math.log(self.x_start), math.log(self.x_stop), self.x_count))
        else:
            xs = np.linspace(self.x_start, self.x_stop, self.x_count)
        xs[0], xs[-1] = self.x_start, self.x_stop  # keep the endpoints exact
        return xs


# flag name -> RunConfig field
_ALIASES = {"table": "table_path", "zeros": "zeros_path", "out": "output_path"}
_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _field_name(key: str) -> str:
    key = key.strip().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key not in _FIELDS:
        raise ConfigError(f"unknown config key {key!r}")
    return key


def _coerce(name: str, raw):
    typ = _FIELDS[name].type
    try:
        if typ == "bool":
            if isinstance(raw, bool):
                return raw
            v = str(raw).strip().lower()
            if v in ("1", "true", "yes", "on"):
                return True
            if v in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ == "int":
            v = float(raw)
            if v != int(v):
                raise ValueError(raw)
            return int(v)
        if typ == "float":
            return float(raw)
        return str(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value {raw!r} for {name}") from None


def read_config_file(path) -> dict:
    out = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            name = _field_name(key)
            out[name] = _coerce(name, value.strip())
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    path = args.config or os.environ.get(ENV_CONFIG)
    if path:
        values.update(read_config_file(path))
    for name in _FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = _coerce(name, v)
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------


def _existing(path: str, what: str) -> str:
    if not Path(path).is_file():
        raise ConfigError(f"{what} {path!r} does not exist")
    return path


def _get_table(cfg: RunConfig, need: float):
    if cfg.table_path:
        table = load_table(_existing(cfg.table_path, "table file"))
        if table.limit < need:
            raise ConfigError(f"table limit {table.limit} is below the required {need:g}")
        return table
    return sieve_singular_series(int(math.ceil(need)))


def _get_zeros(cfg: RunConfig):
    path = cfg.zeros_path or str(packaged_zeros_path())
    table = load_zeros(_existing(path, "zero file"))
    if cfg.zero_count > table.count:
        raise ConfigError(f"zero_count {cfg.zero_count} exceeds the {table.count} zeros in {path}")
    return table.head(cfg.zero_count)


def _open_out(cfg: RunConfig):
    if not cfg.output_path or cfg.output_path == "-":
        return None
    p = Path(cfg.output_path)
    if p.exists() and not cfg.force:
        raise ConfigError(f"{p} exists; pass --force to overwrite")
    return p


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_constants(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    P = cfg.prime_limit
    if P < 3:
        raise ConfigError("prime_limit must be >= 3")
    c2 = twin_prime_constant(max(P, 100), tail_corrected=True).value
    g0 = G(0.0, P, tail="chebyshev")
    g1 = G(1.0, P, tail="chebyshev")
    dlog, dbound = G_log_derivative_at_0(P, tail_corrected=True)
    z2, z4 = zeta(2).real, zeta(4).real
    dz2 = zeta_derivative(2).real
    residuals = {
        "4 zeta(2) G(1) C2 / (5 zeta(4)) - 1": 4 * z2 * g1.value.real * c2 / (5 * z4) - 1,
        "4 G(0) C2 / (3 zeta(2)) - 1": 4 * g0.value.real * c2 / (3 * z2) - 1,
        "G'/G(0) - (2/3) log 2 - 2 zeta'/zeta(2)": dlog - 2 / 3 * math.log(2) - 2 * dz2 / z2,
    }
    print(f"prime_limit = {P}", file=out)
    print(f"C2          = {c2:.15f}", file=out)
    print(f"G(0)        = {g0.value.real:.15f}", file=out)
    print(f"G(1)        = {g1.value.real:.15f}", file=out)
    print(f"G'/G(0)     = {dlog:.15f}  (tail bound {dbound:.1e})", file=out)
    ok = True
    for label, r in residuals.items():
        flag = "ok" if abs(r) < IDENTITY_TOLERANCE else "FAIL"
        ok &= flag == "ok"
        print(f"residual  {label:42s} {r: .3e}  {flag}", file=out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_sieve(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    n = cfg.limit or int(math.ceil(cfg.x_stop))
    path = _open_out(cfg)
    if path is None:
        raise ConfigError("sieve needs --out")
    table = sieve_singular_series(n)
    save_table(table, path)
    print(f"N = {n}", file=out)
    print(f"mean of S(k), k <= N: {table.mean_value():.12f}", file=out)
    print(f"wrote {path}", file=out)
    return EXIT_OK


def cmd_exact(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    xs = cfg.x_grid()
    check_x_cap(cfg.m, float(xs[-1]))
    table = _get_table(cfg, float(xs[-1]))
    evals = error_term_grid(cfg.m, xs, table)
    path = _open_out(cfg)
    write_evaluations_csv(evals, path if path is not None else out)
    return EXIT_OK


PREDICT_HEADER = ["x", "E_m", "prediction", "residual", "residual_over_tail"]


def cmd_predict(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    xs = cfg.x_grid()
    if xs[0] < 2:
        raise ConfigError("predictions need x_start >= 2")
    check_x_cap(cfg.m, float(xs[-1]))
    table = _get_table(cfg, float(xs[-1]))
    zeros = _get_zeros(cfg)
    evals = error_term_grid(cfg.m, xs, table)
    preds = ef.zero_sum_predictions(cfg.m, xs, zeros)
    rows = []
    for e, p in zip(evals, preds):
        res = e.e_m - p.prediction
        rows.append((e.x, e.e_m, p.prediction, res, abs(res) / p.tail_estimate))
    path = _open_out(cfg)
    _write_rows(PREDICT_HEADER, rows, path if path is not None else out)
    summary = comparison_summary(cfg.m, evals, preds)
    report = err if path is None else out
    print(f"m = {cfg.m}, zeros used = {zeros.count}, grid points = {len(xs)}", file=report)
    print(f"max |residual| / x^(m-1)      = {summary['max_residual_scale']:.6g}", file=report)
    print(f"|residual| / x^(m-1) at x_min = {summary['first_residual_scale']:.6g}", file=report)
    print(f"correlation(scaled prediction, scaled E_m) = {summary['correlation']:.6f}", file=report)
    print(
        "correlation after removing a fitted x^(m-1) (a log x + b) trend = "
        f"{summary['detrended_correlation']:.6f}",
        file=report,
    )
    return EXIT_OK


def comparison_summary(m: int, evals, preds) -> dict:
    xs = np.array([e.x for e in evals])
    e_scaled = np.array([e.scaled for e in evals])
    p_scaled = np.array([p.scaled_prediction for p in preds])
    resid = np.array([e.e_m - p.prediction for e, p in zip(evals, preds)]) / xs ** (m - 1)
    out = {
        "max_residual_scale": float(np.max(np.abs(resid))),
        "first_residual_scale": float(abs(resid[0])),
        "correlation": _corr(p_scaled, e_scaled),
        "detrended_correlation": math.nan,
    }
    if xs.size >= 3:
        lx = np.log(xs)
        trend = np.polyval(np.polyfit(lx, resid, 1), lx) * xs ** -0.25
        out["detrended_correlation"] = _corr(p_scaled, e_scaled - trend)
    return out


def _corr(a, b) -> float:
    if len(a) < 2 or np.std(a) == 0 or np.std(b) == 0:
        return math.nan
    return float(np.corrcoef(a, b)[0, 1])


def _write_rows(header, rows, target) -> None:
    write_csv(target, header, ([g17(v) for v in row] for row in rows))


def cmd_oscillate(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    zeros = _get_zeros(cfg)
    grid = ef.default_scan_grid(zeros, cfg.scan_points)
    values = ef.ingham_average(cfg.m, grid, cfg.T, zeros)
    res = ef.oscillation_scan(cfg.m, cfg.T, zeros, grid)
    path = _open_out(cfg)
    if path is not None:
        ef.write_scan_csv(grid, values, path)
    label = f"E_{cfg.m}(x)/x^{cfg.m - 0.75:g}"
    print(f"m = {cfg.m}, T = {cfg.T:g}, zeros with gamma/2 <= T: {res.zero_count_used}", file=out)
    print(f"liminf {label} <= {res.best_low[1]:.12g}   (x0 = {res.best_low[0]:.12g})", file=out)
    print(f"{res.best_high[1]:.12g} <= limsup {label}   (x0 = {res.best_high[0]:.12g})", file=out)
    return EXIT_OK


def cmd_zeros_verify(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    path = _existing(cfg.zeros_path or str(packaged_zeros_path()), "zero file")
    gammas = parse_zero_file(path)
    bad = 0
    print("n,gamma,residual,re_zeta_prime,im_zeta_prime,status", file=out)
    for n, g in enumerate(gammas, start=1):
        res, zp = validate_ordinate(g)
        ok = res <= cfg.tolerance
        bad += not ok
        print(f"{n},{g!r},{res:.3e},{zp.real:.12g},{zp.imag:.12g},{'ok' if ok else 'FAIL'}", file=out)
    print(f"# {len(gammas) - bad}/{len(gammas)} ordinates pass at tolerance {cfg.tolerance:g}", file=out)
    return EXIT_OK if bad == 0 else EXIT_VERIFY


COMMANDS = {
    "constants": cmd_constants,
    "sieve": cmd_sieve,
    "exact": cmd_exact,
    "predict": cmd_predict,
    "oscillate": cmd_oscillate,
    "zeros-verify": cmd_zeros_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--m")
    common.add_argument("--x-start")
    common.add_argument("--x-stop")
    common.add_argument("--x-count")
    common.add_argument("--x-spacing", choices=["log", "linear"])
    common.add_argument("--table", dest="table_path", help="SINGSER1 table (sieved on the fly if omitted)")
    common.add_argument("--zeros", dest="zeros_path", help="zero ordinates (packaged first 100 if omitted)")
    common.add_argument("--zero-count")
    common.add_argument("--out", dest="output_path")
    common.add_argument("--prime-limit")
    common.add_argument("--T")
    common.add_argument("--force", action="store_const", const=True)
    common.add_argument("--limit", help="sieve size N (default: ceil(x_stop))")
    common.add_argument("--scan-points")
    common.add_argument("--tolerance", help="zero validation tolerance")

    parser = argparse.ArgumentParser(prog="riesz-explicit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "constants": "C2, G(0), G(1) and the three product identities",
        "sieve": "tabulate the singular series and write a SINGSER1 file",
        "exact": "S_m(x), main term and E_m(x) on a grid (CSV)",
        "predict": "exact E_m(x) against the truncated zero sum (CSV + summary)",
        "oscillate": "scan the smoothed zero sum for certified liminf/limsup bounds",
        "zeros-verify": "check that each ordinate in a zero file is a zero of zeta",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ZeroValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ConfigError, ZeroFileError, OrderingError, DomainError, RangeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
