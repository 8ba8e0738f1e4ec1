"""Command-line entry point.

Every subcommand writes ``<name>.csv`` (17 significant digits) and
``<name>.manifest.json`` (inputs, cutoffs, library versions, wall time) into
the output directory.  Exit status: 0 ok, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import platform
import sys
import time
import warnings
from importlib import metadata
from pathlib import Path

import numpy as np

from . import __version__
from . import euler_products as ep
from . import hardy_littlewood as hl
from . import predictions as pr
from . import selftest as st
from . import tauberian as tb
from . import variance as var
from . import zero_stats as zs
from .coefficients import BudgetError, lambda_table, prime_coefficients
from .coefficients.cache import cache_dir
from .config import ConfigError, ExperimentConfig, load_config

OK, CHECK_FAILED, USAGE = 0, 1, 2
FMT = "{:.16e}"

SUBCOMMANDS = ("coeffs", "variance", "predict", "hl", "paircorr", "explicit", "tauberian", "selftest")


def _versions() -> dict:
    out = {"selberg_lab": __version__, "python": platform.python_version()}
    for pkg in ("numpy", "scipy", "numba", "mpmath", "sympy", "gmpy2"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FMT.format(float(v))
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows([_cell(v) for v in row] for row in rows)


def write_manifest(path: Path, name: str, cfg: ExperimentConfig, start: float, outputs, status: int, extra=None) -> None:
    manifest = {
        "subcommand": name,
        "inputs": cfg.to_dict(),
        "cutoffs": {"N": cfg.table_length(), "P": cfg.P, "L": cfg.L, "eps": cfg.eps},
        "versions": _versions(),
        "cache_dir": str(cache_dir()),
        "wall_time_s": time.time() - start,
        "outputs": [str(p) for p in outputs],
        "status": status,
    }
    if extra:
        manifest.update(extra)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")


# -- subcommands -------------------------------------------------------------------


def cmd_coeffs(cfg: ExperimentConfig, out: Path):
    desc = cfg.descriptor()
    # building the cache is the point of this subcommand, so the budget is lifted
    method = "bsgs" if desc.source.kind == "elliptic_curve" else "table"
    table = prime_coefficients(desc, cfg.P, parallel=True, method=method, budget=cfg.P)
    rows = zip(table.primes.tolist(), table.values.tolist(), table.bad.tolist())
    path = out / "coeffs.csv"
    write_csv(path, ("p", "a_p_normalized", "bad"), rows)
    return OK, [path], {"primes": int(table.primes.size)}


def cmd_variance(cfg: ExperimentConfig, out: Path):
    desc = cfg.descriptor()
    grid = cfg.grid_values()
    path = out / "variance.csv"
    header = ("X", "h_or_delta", "value", "normalized", "log_ratio", "predicted_normalized", "regime", "formula")
    if grid.size == 0:
        write_csv(path, header, [])
        return OK, [path], {"points": 0}
    table = lambda_table(desc, cfg.table_length())
    curve = var.variance_curve(table, cfg.X, grid, cfg.grid_kind)
    predict = pr.predict_v_tilde if cfg.grid_kind == "tilde" else pr.predict_v_delta
    rows = []
    for r in curve.points:
        line = predict(desc, cfg.X, r.param)
        rows.append((r.X, r.param, r.value, r.normalized, r.log_ratio, line.normalized, line.regime, line.formula))
    write_csv(path, header, rows)
    slope = intercept = None
    if len(curve) >= 2:
        slope, intercept = var.fit_line(curve)
    return OK, [path], {"points": len(curve), "fit": {"slope": slope, "intercept": intercept}}


def cmd_predict(cfg: ExperimentConfig, out: Path):
    desc = cfg.descriptor()
    rows = []
    predict = pr.predict_v_tilde if cfg.grid_kind == "tilde" else pr.predict_v_delta
    for v in cfg.grid_values().tolist():
        line = predict(desc, cfg.X, v)
        rows.append((line.kind, cfg.X, v, line.value, line.normalized, line.regime, line.formula))
    if cfg.T is not None:
        line = pr.predict_pair_correlation(desc, cfg.X, cfg.T)
        rows.append((line.kind, cfg.X, cfg.T, line.value, line.normalized, line.regime, line.formula))
    path = out / "predict.csv"
    write_csv(path, ("kind", "X", "param", "value", "normalized", "regime", "formula"), rows)
    return OK, [path], {}


def cmd_hl(cfg: ExperimentConfig, out: Path):
    desc = cfg.descriptor()
    X = int(cfg.X)
    table = lambda_table(desc, max(cfg.table_length(), X + cfg.k + 1))
    S = hl.singular_series(cfg.k) if cfg.k >= 1 else None
    auto = hl.autocorrelation(table, X, cfg.k)
    sval = S.value if S is not None else float("nan")
    ratio = auto / (sval * X) if S is not None and sval > 0 else float("nan")
    path = out / "hl.csv"
    write_csv(path, ("k", "X", "singular_series", "autocorrelation", "ratio"), [(cfg.k, float(X), sval, auto, ratio)])
    return OK, [path], {}


def _zero_list(cfg: ExperimentConfig) -> zs.ZeroList:
    if not cfg.zeros:
        raise ConfigError("zeros", "this subcommand needs a zero list")
    lists = []
    for p in cfg.zeros:
        try:
            lists.append(zs.load_zeros(p, cfg.reflect).ordinates)
        except (OSError, zs.ZeroFileError) as exc:
            raise ConfigError("zeros", str(exc)) from None
    return zs.ZeroList(np.sort(np.concatenate(lists)), cfg.reflect, ",".join(cfg.zeros))


def cmd_paircorr(cfg: ExperimentConfig, out: Path):
    desc = cfg.descriptor()
    zeros = _zero_list(cfg)
    T = cfg.T if cfg.T is not None else zeros.max_ordinate
    Xs = cfg.grid_values() if cfg.grid.strip() else np.array([cfg.X])
    rows = []
    for X in Xs.tolist():
        F = zs.f_statistic(zeros, X, T)
        Ft = zs.f_tilde(zeros, X, T)
        line = pr.predict_pair_correlation(desc, X, T)
        rows.append((X, T, F, Ft, line.value, ep.form_factor_prediction(desc, X, T), line.regime, line.formula))
    path = out / "paircorr.csv"
    write_csv(path, ("X", "T", "F", "F_tilde", "predicted_F", "predicted_F_tilde", "regime", "formula"), rows)
    return OK, [path], {"zeros": len(zeros)}


def cmd_explicit(cfg: ExperimentConfig, out: Path):
    desc = cfg.descriptor()
    zeros = _zero_list(cfg)
    Z = cfg.Z if cfg.Z is not None else zeros.max_ordinate
    rng = np.random.default_rng(cfg.seed)
    xs = rng.uniform(2.0, cfg.X, cfg.samples)
    ds = rng.uniform(0.01, 0.5, cfg.samples)
    table = lambda_table(desc, int(math.ceil(cfg.X * 1.5)) + 2)
    rows = []
    worst = 0.0
    for x, d in zip(xs.tolist(), ds.tolist()):
        r = zs.explicit_formula_residual(desc, table, zeros, x, d, Z)
        ratio = abs(r.residual) / r.envelope
        worst = max(worst, ratio)
        rows.append((x, d, Z, r.lhs, r.zero_sum, r.residual, r.envelope, ratio))
    path = out / "explicit.csv"
    write_csv(path, ("x", "delta", "Z", "lhs", "zero_sum", "residual", "envelope", "ratio"), rows)
    return OK, [path], {"max_ratio": worst}


def tauberian_rows():
    """(check, parameter, computed, predicted, error, tolerance) for the kernel lemmas."""
    rows = []
    f_log = lambda u: np.log(2.0 + np.abs(u))
    f_osc = lambda u: np.log(3.0 + np.abs(u)) + 0.5 * np.cos(np.sqrt(np.abs(u)))
    for kappa in (1e-2, 1e-3):
        got = tb.fejer_functional(lambda u: np.ones_like(u, dtype=float), kappa)
        rows.append(("lemma1_const", kappa, got, math.pi * kappa, abs(got - math.pi * kappa), 1e-8))
        got = tb.fejer_functional(f_log, kappa)
        want = tb.lemma1_prediction(kappa, -2.0, 2.0)
        rows.append(("lemma1_log", kappa, got, want, abs(got - want), 0.05 * kappa * math.log(1 / kappa)))
    kappa = 1e-3
    got = tb.fejer_functional(f_osc, kappa)
    want = tb.lemma1_prediction(kappa, -2.0, 2.0)
    rows.append(("lemma1_log_osc", kappa, got, want, abs(got - want), 0.05 * abs(want)))
    kappa = 0.1
    for a in (0.5 * kappa, 1.5 * kappa, 3.0 * kappa):
        got = tb.fejer_functional(lambda u, a=a: np.cos(a * u), kappa)
        want = math.pi * max(kappa - a / 2, 0.0)
        rows.append((f"lemma1_cos_a={a:g}", kappa, got, want, abs(got - want), 1e-8))
    eta = 0.5
    for t, want in ((0.5, 1.0), (2.0, 0.0), (1 + eta / 2, 0.5)):
        d = tb.lemma2_transform_identity(eta, t)
        rows.append((f"lemma2_t={t:g}", eta, tb.k_eta_hat(t, eta) + d, want, abs(tb.k_eta_hat(t, eta) + d - want), 1e-4))
    for e in (0.1, 0.5, 1.0):
        c = tb.k_eta_envelope_constant(e)
        rows.append(("lemma2_envelope_C", e, c, 1e3, max(0.0, c - 1e3), 0.0))
        gap = max(abs(tb.k_eta_hat(1 - 1e-12, e) - tb.k_eta_hat(1 + 1e-12, e)),
                  abs(tb.k_eta_hat(1 + e - 1e-12, e) - tb.k_eta_hat(1 + e + 1e-12, e)))
        rows.append(("lemma2_continuity", e, gap, 0.0, gap, 1e-8))
    Y = 20.0
    r = tb.lemma3_check(lambda t: np.ones_like(t, dtype=float), Y)
    rows.append(("lemma3_const_conclusion", Y, r.conclusion, 1.5, abs(r.conclusion - 1.5), 0.0))
    rows.append(("lemma3_const_hypothesis", Y, r.hypothesis_deviation, 0.0, r.hypothesis_deviation, 1e-12))
    r = tb.lemma3_check(lambda t: 1.0 + np.exp(-t), Y)
    want = 1.5 + math.exp(-Y)
    rows.append(("lemma3_exp_conclusion", Y, r.conclusion, want, abs(r.conclusion - want), 1e-12))
    rows.append(("lemma3_exp_hypothesis", Y, r.hypothesis_deviation, 0.0, r.hypothesis_deviation, 2 * math.exp(1 - Y)))
    r = tb.lemma3_check(lambda t: np.zeros_like(t, dtype=float), Y)
    rows.append(("lemma3_zero_conclusion", Y, r.conclusion, 0.0, abs(r.conclusion), 0.0))
    rows.append(("lemma3_zero_hypothesis", Y, r.hypothesis_deviation, 1.0, abs(r.hypothesis_deviation - 1.0), 1e-12))
    return rows


def cmd_tauberian(cfg: ExperimentConfig, out: Path):
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for check, param, got, want, err, tol in tauberian_rows():
            rows.append((check, param, got, want, err, tol, err <= tol))
    path = out / "tauberian.csv"
    write_csv(path, ("check", "param", "computed", "predicted", "error", "tolerance", "pass"), rows)
    failed = [r[0] for r in rows if not r[-1]]
    return (CHECK_FAILED if failed else OK), [path], {"failed": failed}


def cmd_selftest(cfg: ExperimentConfig, out: Path):
    zeros = cfg.zeros[0] if cfg.zeros else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        results = st.run(zeros, log=lambda s: print(s, file=sys.stderr))
    path = out / "selftest.csv"
    write_csv(path, ("check", "status", "seconds", "detail"),
              [(n, "skip" if ok is None else ("pass" if ok else "fail"), dt, d)
               for n, ok, d, dt in results])
    failed = [n for n, ok, _, _ in results if ok is False]
    return (CHECK_FAILED if failed else OK), [path], {"failed": failed}


COMMANDS = {
    "coeffs": cmd_coeffs,
    "variance": cmd_variance,
    "predict": cmd_predict,
    "hl": cmd_hl,
    "paircorr": cmd_paircorr,
    "explicit": cmd_explicit,
    "tauberian": cmd_tauberian,
    "selftest": cmd_selftest,
}

HELP = {
    "coeffs": "build and cache the normalized prime coefficients up to P",
    "variance": "exact variance curve with the main-term overlay",
    "predict": "main terms only (grid values, plus the pair-correlation sum when T is set)",
    "hl": "singular series and autocorrelation at shift k",
    "paircorr": "form factors of a zero list against the predicted main terms",
    "explicit": "explicit-formula residuals at random (x, delta)",
    "tauberian": "kernel lemma checks",
    "selftest": "independent-oracle checks",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="selberg-lab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", help="key = value file; flags override it")
        p.add_argument("--kind", help="riemann_zeta | ramanujan_delta | elliptic_curve | external_table (or zeta, delta, ec, table)")
        p.add_argument("--name")
        p.add_argument("--a-invariants", dest="a_invariants", help="a1,a2,a3,a4,a6")
        p.add_argument("--conductor")
        p.add_argument("--path", help="external coefficient table")
        p.add_argument("--degree")
        p.add_argument("--root-number", dest="root_number")
        p.add_argument("--pole-order", dest="pole_order")
        p.add_argument("--bad-primes", dest="bad_primes")
        p.add_argument("--X")
        p.add_argument("--grid", help="r:lo:hi:count (log(X/h) or log(1/delta) evenly spaced) or a comma list")
        p.add_argument("--grid-kind", dest="grid_kind", help="tilde | delta")
        p.add_argument("--N")
        p.add_argument("--P")
        p.add_argument("--L")
        p.add_argument("--eps")
        p.add_argument("--T")
        p.add_argument("--Z")
        p.add_argument("--k")
        p.add_argument("--zeros", help="comma-separated zero files")
        p.add_argument("--reflect")
        p.add_argument("--samples")
        p.add_argument("--seed")
        p.add_argument("--out")
    return parser


def run_subcommand(name: str, cfg: ExperimentConfig) -> int:
    if name not in COMMANDS:
        raise ConfigError("subcommand", f"unknown subcommand {name!r}; expected one of {SUBCOMMANDS}")
    out = Path(cfg.out)
    start = time.time()
    status, outputs, extra = COMMANDS[name](cfg, out)
    write_manifest(out / f"{name}.manifest.json", name, cfg, start, outputs, status, extra)
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("selberg-lab: error: a subcommand is required", file=sys.stderr)
        return USAGE
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = load_config(args.config, overrides)
        return run_subcommand(args.command, cfg)
    except ConfigError as exc:
        print(f"selberg-lab: invalid configuration: {exc}", file=sys.stderr)
        return USAGE
    except BudgetError as exc:
        print(f"selberg-lab: {exc}", file=sys.stderr)
        return USAGE
    except ValueError as exc:
        print(f"selberg-lab: invalid input: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
