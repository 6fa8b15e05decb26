"""Command-line front end: fit user data, run recovery simulations, benchmark runtime.

Exit codes: 0 success, 2 usage/config error, 3 data error. Config precedence
is flags > config file > built-in defaults; the effective configuration is
echoed to a sidecar file next to the output for provenance.

The simulate results CSV is fully deterministic for a fixed master seed
(its timing columns are reported as 0 unless --timing is given); runtime
measurement is the benchmark subcommand's job.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from .data import SplicingConfig, make_dataset
from .harness import METHODS, run_experiment
from .ranks import rank_response
from .selection import default_s_max, rank_abess
from .simgen import SimDesign

SIM_COLUMNS = ["n", "p", "sparsity", "signal", "cov", "rho", "link", "error",
               "method", "reps", "active_cover", "inactive_cover", "exact",
               "mean_time_s", "q05_time_s", "q95_time_s", "failures"]
BENCH_COLUMNS = ["sweep_var", "value", "method", "mean_time_s", "q05", "q95"]

_SIM_KEYS = {"n", "p", "sparsity", "signal", "cov", "rho", "link", "error",
             "method", "reps", "seed", "threads", "out", "timing"}
_BENCH_KEYS = {"sweep", "values", "n", "p", "sparsity", "signal", "cov", "rho",
               "link", "error", "method", "reps", "seed", "out"}


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _fmt(v) -> str:
    return format(float(v), ".6g")


def _fmt_time(v) -> str:
    return format(float(v), ".4f")


def _read_config_file(path, allowed):
    """Parse a UTF-8 key=value file; unknown keys are rejected."""
    cfg = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise CliError(f"{path}:{lineno}: expected key=value", 2)
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in allowed:
                    raise CliError(f"{path}:{lineno}: unknown config key {key!r}", 2)
                cfg[key] = value.strip()
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}", 2)
    return cfg


def _write_sidecar(out_path, effective):
    side = out_path + ".config"
    with open(side, "w", encoding="utf-8") as fh:
        for key in sorted(effective):
            fh.write(f"{key}={effective[key]}\n")


def _threads_default():
    env = os.environ.get("RANKSUBSET_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise CliError(f"RANKSUBSET_THREADS={env!r} is not an integer", 2)
    return 1


# ---------------------------------------------------------------- fit

def _read_fit_csv(path, response):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise CliError(f"{path}: empty file", 2)
            rows = list(reader)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", 2)
    if response not in header:
        raise CliError(f"{path}: no column named {response!r} in header", 2)
    width = len(header)
    y_col = header.index(response)
    names = [h for i, h in enumerate(header) if i != y_col]
    if not names:
        raise CliError(f"{path}: no predictor columns besides {response!r}", 2)

    y = np.empty(len(rows))
    x = np.empty((len(rows), width - 1))
    for r, row in enumerate(rows):
        if len(row) != width:
            raise CliError(f"{path}: row {r + 2} has {len(row)} fields, expected {width}", 2)
        k = 0
        for c, cell in enumerate(row):
            try:
                val = float(cell)
            except ValueError:
                raise CliError(
                    f"{path}: non-numeric cell at row {r + 2}, column {header[c]!r}", 3)
            if c == y_col:
                y[r] = val
            else:
                x[r, k] = val
                k += 1
    return x, y, names


def cmd_fit(args) -> int:
    x, y, names = _read_fit_csv(args.input, args.response)
    try:
        dataset = make_dataset(x, y, standardize=args.standardize)
    except ValueError as exc:
        raise CliError(f"invalid data: {exc}", 3)
    pseudo = rank_response(dataset.y)

    constant = [names[j] for j in range(dataset.p)
                if not np.any(dataset.x[:, j])]
    for name in constant:
        print(f"warning: predictor {name!r} is constant and excluded from "
              f"candidacy", file=sys.stderr)
    usable = dataset.p - len(constant)
    if usable < 1:
        raise CliError("no non-constant predictor columns", 3)

    s_max = args.smax if args.smax is not None else default_s_max(dataset.n, dataset.p)
    s_max = min(s_max, usable, dataset.n - 1)
    factory = lambda s: SplicingConfig(support_size=s, k_max=min(args.kmax, s)
                                       if args.kmax is not None else None,
                                       tau=args.tau)
    report = rank_abess(dataset, pseudo, s_max=s_max, config_factory=factory)

    sel = report.selected
    # report coefficients on the original predictor scale
    scales = dataset.column_scales[sel.active.as_array()]
    coefs = sel.coefficients / scales
    print("selected support:")
    for j, b in zip(sel.active, coefs):
        print(f"  {names[j]}\t{_fmt(b)}")
    if len(sel.active) == 0:
        print("  (empty)")
    print("gic path:")
    for entry in report.gic_path:
        print(f"  s={entry.support_size}\tgic={_fmt(entry.gic_value)}"
              f"\tloss={_fmt(entry.model.loss)}")
    print(f"wall time: {_fmt_time(report.wall_time)} s")

    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["variable", "coefficient"])
            for j, b in zip(sel.active, coefs):
                writer.writerow([names[j], _fmt(b)])
    return 0


# ---------------------------------------------------------------- simulate

def _parse_int_list(text):
    try:
        return [int(v) for v in str(text).split(",") if v != ""]
    except ValueError:
        raise CliError(f"expected a comma-separated integer list, got {text!r}", 2)


def _resolve(flag_value, cfg, key, default, convert):
    if flag_value is not None:
        return flag_value
    if key in cfg:
        try:
            return convert(cfg[key])
        except (ValueError, CliError) as exc:
            if isinstance(exc, CliError):
                raise
            raise CliError(f"bad config value for {key!r}: {cfg[key]!r}", 2)
    return default


def _sim_designs(args, cfg):
    n_values = _resolve(args.n, cfg, "n", None,
                        _parse_int_list)
    if n_values is None:
        raise CliError("simulate requires n (flag --n or config)", 2)
    if isinstance(n_values, int):
        n_values = [n_values]
    p = _resolve(args.p, cfg, "p", 500, int)
    sparsity = _resolve(args.sparsity, cfg, "sparsity", 5, int)
    signal = _resolve(args.signal, cfg, "signal", 2.0, float)
    cov = _resolve(args.cov, cfg, "cov", "independent", str)
    rho = _resolve(args.rho, cfg, "rho", 0.0, float)
    link = _resolve(args.link, cfg, "link", "linear", str)
    error = _resolve(args.error, cfg, "error", "gaussian", str)
    seed = _resolve(args.seed, cfg, "seed", 0, int)
    designs = []
    for n in n_values:
        try:
            designs.append(SimDesign(n=n, p=p, sparsity=sparsity, signal=signal,
                                     covariance=cov, rho=rho, link=link,
                                     error=error, seed=seed))
        except ValueError as exc:
            raise CliError(f"invalid design: {exc}", 2)
    return designs


def _methods_from(args, cfg):
    methods = args.method or None
    if methods is None and "method" in cfg:
        methods = [m.strip() for m in cfg["method"].split(",") if m.strip()]
    if not methods:
        raise CliError("no methods given (use --method)", 2)
    for m in methods:
        if m not in METHODS:
            raise CliError(f"unknown method {m!r}; known: {', '.join(METHODS)}", 2)
    return methods


def cmd_simulate(args) -> int:
    cfg = _read_config_file(args.config, _SIM_KEYS) if args.config else {}
    designs = _sim_designs(args, cfg)
    methods = _methods_from(args, cfg)
    reps = _resolve(args.reps, cfg, "reps", 10, int)
    threads = args.threads
    if threads is None and "threads" in cfg:
        threads = int(cfg["threads"])
    if threads is None:
        threads = _threads_default()
    out = _resolve(args.out, cfg, "out", None, str)
    timing = args.timing or cfg.get("timing", "").lower() in ("1", "true", "yes")

    rows = [SIM_COLUMNS]
    for design in designs:
        records = run_experiment(design, methods, reps, threads=threads)
        for rec in records:
            d = rec.design
            times = ((_fmt_time(rec.mean_time), _fmt_time(rec.q05_time),
                      _fmt_time(rec.q95_time)) if timing
                     else (_fmt_time(0), _fmt_time(0), _fmt_time(0)))
            rows.append([d.n, d.p, d.sparsity, _fmt(d.signal), d.covariance,
                         _fmt(d.rho), d.link, d.error, rec.method,
                         rec.replications, _fmt(rec.active_cover),
                         _fmt(rec.inactive_cover), _fmt(rec.exact),
                         *times, rec.failures])

    _emit_csv(rows, out)
    if out:
        d0 = designs[0]
        _write_sidecar(out, {
            "n": ",".join(str(d.n) for d in designs), "p": d0.p,
            "sparsity": d0.sparsity, "signal": _fmt(d0.signal),
            "cov": d0.covariance, "rho": _fmt(d0.rho), "link": d0.link,
            "error": d0.error, "method": ",".join(methods), "reps": reps,
            "seed": d0.seed, "threads": threads,
            "timing": str(bool(timing)).lower(),
        })
    return 0


# ---------------------------------------------------------------- benchmark

def cmd_benchmark(args) -> int:
    cfg = _read_config_file(args.config, _BENCH_KEYS) if args.config else {}
    sweep = _resolve(args.sweep, cfg, "sweep", None, str)
    if sweep not in ("n", "p"):
        raise CliError("benchmark requires --sweep n or --sweep p", 2)
    values = _resolve(args.values, cfg, "values", None, _parse_int_list)
    if isinstance(values, str):
        values = _parse_int_list(values)
    if not values:
        raise CliError("benchmark requires --values", 2)
    methods = _methods_from(args, cfg)
    reps = _resolve(args.reps, cfg, "reps", 5, int)
    n = _resolve(args.n, cfg, "n", 200, int)
    p = _resolve(args.p, cfg, "p", 2000, int)
    sparsity = _resolve(args.sparsity, cfg, "sparsity", 5, int)
    signal = _resolve(args.signal, cfg, "signal", 2.0, float)
    cov = _resolve(args.cov, cfg, "cov", "independent", str)
    rho = _resolve(args.rho, cfg, "rho", 0.0, float)
    link = _resolve(args.link, cfg, "link", "linear", str)
    error = _resolve(args.error, cfg, "error", "cauchy", str)
    seed = _resolve(args.seed, cfg, "seed", 0, int)
    out = _resolve(args.out, cfg, "out", None, str)

    rows = [BENCH_COLUMNS]
    for value in values:
        kw = dict(n=n, p=p)
        kw[sweep] = value
        try:
            design = SimDesign(sparsity=sparsity, signal=signal, covariance=cov,
                               rho=rho, link=link, error=error, seed=seed, **kw)
        except ValueError as exc:
            raise CliError(f"invalid design: {exc}", 2)
        # timing fits run single-threaded so measurements reflect algorithmic cost
        records = run_experiment(design, methods, reps, threads=1)
        for rec in records:
            rows.append([sweep, value, rec.method, _fmt_time(rec.mean_time),
                         _fmt_time(rec.q05_time), _fmt_time(rec.q95_time)])

    _emit_csv(rows, out)
    if out:
        _write_sidecar(out, {"sweep": sweep,
                             "values": ",".join(str(v) for v in values),
                             "n": n, "p": p, "sparsity": sparsity,
                             "signal": _fmt(signal), "cov": cov,
                             "rho": _fmt(rho), "link": link, "error": error,
                             "method": ",".join(methods), "reps": reps,
                             "seed": seed})
    return 0


def _emit_csv(rows, out_path):
    if out_path:
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            csv.writer(fh).writerows(rows)
    else:
        csv.writer(sys.stdout).writerows(rows)


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ranksubset",
        description="Best subset selection for single index models "
                    "via rank-based splicing.")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="select a subset on user data from a CSV")
    fit.add_argument("input", help="CSV file with a header row")
    fit.add_argument("--response", default="y", help="response column name")
    fit.add_argument("--smax", type=int, default=None)
    fit.add_argument("--kmax", type=int, default=None)
    fit.add_argument("--tau", type=float, default=None)
    fit.add_argument("--standardize", action="store_true")
    fit.add_argument("--out", default=None, help="write coefficients CSV here")
    fit.set_defaults(func=cmd_fit)

    sim = sub.add_parser("simulate", help="replicated recovery experiments")
    sim.add_argument("--config", default=None, help="key=value config file")
    sim.add_argument("--n", type=str, default=None,
                     help="sample size(s), comma separated")
    sim.add_argument("--p", type=int, default=None)
    sim.add_argument("--sparsity", type=int, default=None)
    sim.add_argument("--signal", type=float, default=None)
    sim.add_argument("--cov", default=None,
                     choices=["independent", "exponential", "equicorrelated"])
    sim.add_argument("--rho", type=float, default=None)
    sim.add_argument("--link", default=None, choices=["linear", "exponential"])
    sim.add_argument("--error", default=None, choices=["gaussian", "cauchy"])
    sim.add_argument("--method", action="append", default=None)
    sim.add_argument("--reps", type=int, default=None)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--threads", type=int, default=None)
    sim.add_argument("--timing", action="store_true",
                     help="record wall-clock times (makes output nondeterministic)")
    sim.add_argument("--out", default=None)
    sim.set_defaults(func=cmd_simulate)

    bench = sub.add_parser("benchmark", help="runtime scaling sweeps")
    bench.add_argument("--config", default=None)
    bench.add_argument("--sweep", default=None, choices=["n", "p"])
    bench.add_argument("--values", type=str, default=None)
    bench.add_argument("--n", type=int, default=None)
    bench.add_argument("--p", type=int, default=None)
    bench.add_argument("--sparsity", type=int, default=None)
    bench.add_argument("--signal", type=float, default=None)
    bench.add_argument("--cov", default=None,
                       choices=["independent", "exponential", "equicorrelated"])
    bench.add_argument("--rho", type=float, default=None)
    bench.add_argument("--link", default=None, choices=["linear", "exponential"])
    bench.add_argument("--error", default=None, choices=["gaussian", "cauchy"])
    bench.add_argument("--method", action="append", default=None)
    bench.add_argument("--reps", type=int, default=None)
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--out", default=None)
    bench.set_defaults(func=cmd_benchmark)
    return parser


def _fix_sim_n(args):
    if getattr(args, "command", None) == "simulate" and args.n is not None:
        args.n = _parse_int_list(args.n)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        _fix_sim_n(args)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
