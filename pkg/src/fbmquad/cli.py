"""Command-line front end.

Subcommands: ``constants``, ``simulate``, ``integrate``, ``clt``, ``rate``,
``diverge``, ``selftest``.  Results go to stdout as canonical JSON (CSV with
--csv where applicable); progress and timing go to stderr.  Exit codes:
0 success and all verdicts pass, 1 verdict failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from .constants import beta_terms
from .covariance import HurstGrid, floor_index
from .experiments import (
    DEFAULT_MASTER_SEED,
    ExperimentConfig,
    ExperimentReport,
    canonical_json,
    run_clt_experiment,
    run_divergence_probe,
    run_rate_experiment,
)
from .hermite import SUPPORTED_POWERS, hermite_eval, power_to_hermite
from .pathgen import FbmPath, GeneratorKind, generate, write_path_csv
from .schemes import (
    Polynomial,
    SchemeKind,
    parse_test_function,
    riemann_sum,
    simpson_error_decomposition,
)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"run 'fbmquad {args.command} --help' for usage", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbmquad",
        description="Riemann-sum stochastic integration against fractional "
        "Brownian motion: constants, simulation, integration, and "
        "Monte Carlo verification experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="limit constants kappa3, kappa5, beta")
    p.add_argument("--H", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(handler=_cmd_constants)

    p = sub.add_parser("simulate", help="sample one trajectory")
    _grid_flags(p)
    p.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED)
    p.add_argument("--out", help="write CSV (t,B) here instead of JSON to stdout")
    p.add_argument("--csv", action="store_true", help="emit CSV on stdout")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("integrate", help="one Riemann sum on one sampled path")
    _grid_flags(p)
    p.add_argument("--t", type=float, default=None, help="upper time (default T)")
    p.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED)
    p.add_argument("--scheme", choices=[s.value for s in SchemeKind], default="simpson")
    p.add_argument("--f", default="0,0,0,0,0,1/120", help="polynomial coeffs or cos[:a,w]")
    p.set_defaults(handler=_cmd_integrate)

    for name, help_text in (
        ("clt", "critical-case distributional experiment"),
        ("rate", "squared-residual decay-rate experiment"),
        ("diverge", "residual variance probe at/below the critical exponent"),
    ):
        p = sub.add_parser(name, help=help_text)
        _experiment_flags(p, name)
        p.set_defaults(handler=_cmd_experiment)

    p = sub.add_parser("selftest", help="fast deterministic exact-identity suite")
    p.set_defaults(handler=_cmd_selftest)
    return parser


def _grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--generator", choices=[g.value for g in GeneratorKind], default="circulant")


def _experiment_flags(p: argparse.ArgumentParser, name: str) -> None:
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("--H", type=float)
    p.add_argument("--n", type=int, action="append", help="repeatable for sweeps")
    p.add_argument("--t", type=float)
    p.add_argument("--M", type=int, help="replications")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--f", help="polynomial coeffs lowest degree first, or cos[:a,w]")
    p.add_argument("--generator", choices=[g.value for g in GeneratorKind])
    p.add_argument("--threads", type=int, help="worker pool cap (default: all cores)")
    p.add_argument("--tol", type=float, help="constants tolerance")
    p.add_argument("--out", help="write per-replication CSV here")
    p.add_argument("--csv", action="store_true", help="emit per-replication CSV on stdout")
    if name == "rate":
        p.add_argument("--scheme", choices=[s.value for s in SchemeKind])
        p.add_argument("--slope-tol", dest="slope_tol", type=float)
    if name == "diverge":
        p.add_argument("--scheme", choices=[s.value for s in SchemeKind])


# ---------------------------------------------------------------------------
# handlers
# ---------------------------------------------------------------------------


def _cmd_constants(args) -> int:
    k5, k3 = beta_terms(args.H, args.tol)
    beta_sq = 120.0 / 32.0 * k5.value + 75.0 * k3.value
    if beta_sq <= 0.0:
        raise ValueError(f"variance constant came out nonpositive: {beta_sq}")
    payload = {
        "H": args.H,
        "kappa3": k3.value,
        "kappa5": k5.value,
        "beta": math.sqrt(beta_sq),
        "tol": args.tol,
        "truncation_P": max(k3.truncation_P, k5.truncation_P),
        "tail_bound_kappa3": k3.tail_bound,
        "tail_bound_kappa5": k5.tail_bound,
    }
    print(canonical_json(payload))
    return 0


def _make_path(args, T: float) -> FbmPath:
    grid = HurstGrid(args.H, args.n, T=T)
    return generate(grid, GeneratorKind(args.generator), args.seed)


def _cmd_simulate(args) -> int:
    started = time.perf_counter()
    path = _make_path(args, args.T)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_path_csv(path, fh)
        payload = {
            "H": args.H,
            "n": args.n,
            "T": args.T,
            "seed": args.seed,
            "generator": args.generator,
            "rows": len(path.values),  # data rows, one per grid point
            "out": args.out,
        }
        print(canonical_json(payload))
    elif args.csv:
        write_path_csv(path, sys.stdout)
    else:
        payload = {
            "H": args.H,
            "n": args.n,
            "T": args.T,
            "seed": args.seed,
            "generator": args.generator,
            "t": [float(x) for x in path.grid.times()],
            "B": [float(x) for x in path.values],
        }
        print(canonical_json(payload))
    _log_timing("simulate", started)
    return 0


def _cmd_integrate(args) -> int:
    started = time.perf_counter()
    t = args.t if args.t is not None else args.T
    path = _make_path(args, args.T)
    f = parse_test_function(args.f)
    scheme = SchemeKind(args.scheme)
    value = riemann_sum(path, f, scheme, t)
    from .covariance import floor_index

    end_level = float(path.values[min(path.grid.num_increments, floor_index(args.n, t))])
    increment_of_f = float(f(end_level) - f(0.0))
    payload = {
        "H": args.H,
        "n": args.n,
        "t": t,
        "seed": args.seed,
        "scheme": scheme.value,
        "f": f.spec(),
        "generator": args.generator,
        "riemann_sum": value,
        "increment_of_f": increment_of_f,
        "residual": value - increment_of_f,
    }
    if scheme is SchemeKind.SIMPSON and f.degree is not None and f.degree <= 10:
        d = simpson_error_decomposition(path, f, t)
        payload["decomposition"] = {
            "main": d.main,
            "term5": d.term5,
            "term7": d.term7,
            "term9": d.term9,
        }
    print(canonical_json(payload))
    _log_timing("integrate", started)
    return 0


def _cmd_experiment(args) -> int:
    started = time.perf_counter()
    config = _config_from_args(args)
    runner = {
        "clt": run_clt_experiment,
        "rate": run_rate_experiment,
        "diverge": run_divergence_probe,
    }[args.command]
    report: ExperimentReport = runner(config)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            report.write_csv(fh)
    if args.csv:
        sys.stdout.write(report.csv_text())
    else:
        print(report.to_json())
    _log_timing(args.command, started)
    return 0 if report.overall_pass else 1


def _config_from_args(args) -> ExperimentConfig:
    base = ExperimentConfig.from_file(args.config) if args.config else None
    overrides = {}
    if args.H is not None:
        overrides["H"] = args.H
    if args.n:
        overrides["n_values"] = tuple(args.n)
    if args.t is not None:
        overrides["t"] = args.t
    if args.M is not None:
        overrides["replications"] = args.M
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.f is not None:
        overrides["f"] = parse_test_function(args.f)
    if args.generator is not None:
        overrides["generator"] = GeneratorKind(args.generator)
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.tol is not None:
        overrides["constants_tol"] = args.tol
    if getattr(args, "scheme", None) is not None:
        overrides["scheme"] = SchemeKind(args.scheme)
    if getattr(args, "slope_tol", None) is not None:
        overrides["slope_tol"] = args.slope_tol
    if base is None:
        if "H" not in overrides or "n_values" not in overrides:
            raise ValueError("either --config or both --H and --n are required")
        return ExperimentConfig(**overrides)
    for key, value in overrides.items():
        setattr(base, key, value)
    base.__post_init__()
    return base


def _cmd_selftest(args) -> int:
    started = time.perf_counter()
    checks = []

    rng = np.random.Generator(np.random.Philox(2026))
    xs = rng.uniform(-5.0, 5.0, 100)
    ok = True
    for r in SUPPORTED_POWERS:
        recon = power_to_hermite(r).reconstruct(xs)
        ok &= bool(np.all(np.abs(recon - xs**r) <= 1e-9 * np.maximum(1.0, np.abs(xs) ** r)))
    checks.append({"name": "hermite_reconstruction", "pass": ok})

    checks.append(
        {
            "name": "hermite_small_values",
            "pass": hermite_eval(3, 2.0) == 2.0
            and hermite_eval(5, 1.0) == 6.0
            and hermite_eval(2, 0.0) == -1.0,
        }
    )

    grid = HurstGrid(0.3, 64, T=1.0)
    exact_pairs = {
        SchemeKind.MIDPOINT: 2,
        SchemeKind.TRAPEZOID: 2,
        SchemeKind.SIMPSON: 4,
        SchemeKind.MILNE: 6,
    }
    ok = True
    for seed in range(3):
        path = generate(grid, GeneratorKind.CIRCULANT_EMBEDDING, seed)
        end = float(path.values[-1])
        for scheme, degree in exact_pairs.items():
            f = Polynomial([0] * degree + [1])
            expected = f(end) - f(0.0)
            got = riemann_sum(path, f, scheme, 1.0)
            ok &= abs(got - expected) <= 1e-10 * max(1.0, abs(expected))
    checks.append({"name": "quadrature_exactness", "pass": ok})

    ok = True
    for seed in range(3):
        path = generate(grid, GeneratorKind.CIRCULANT_EMBEDDING, 100 + seed)
        for f in (Polynomial([0, 0, 0, 0, 0, "1/120"]), Polynomial([1, -2, 0, 3, 0, 0, 0, 1, 0, 1, 2])):
            d = simpson_error_decomposition(path, f, 1.0)
            expected = f(float(path.values[-1])) - f(0.0)
            ok &= abs(d.telescoped() - expected) <= 1e-9 * max(1.0, abs(expected))
    checks.append({"name": "simpson_telescoping", "pass": ok})

    all_pass = all(c["pass"] for c in checks)
    print(canonical_json({"checks": checks, "all_pass": all_pass}))
    _log_timing("selftest", started)
    return 0 if all_pass else 1


def _log_timing(command: str, started: float) -> None:
    print(f"[fbmquad] {command} finished in {time.perf_counter() - started:.2f}s", file=sys.stderr)


if __name__ == "__main__":
    entrypoint()
