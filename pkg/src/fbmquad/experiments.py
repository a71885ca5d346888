"""Seeded Monte Carlo experiments probing the quadrature limit theory.

Three experiments, all deterministic functions of their configuration:

- ``run_clt_experiment``: at the Simpson-critical Hurst exponent the quintic
  error statistic converges in law to an independent centered Gaussian with
  variance beta^2 integral f^(5)(B_s)^2 ds; checked through its variance, a
  KS test, correlation with the terminal level, and a mean gate.
- ``run_rate_experiment``: above a scheme's critical exponent the squared
  residual decays like n^{1 - 2rH} with r the scheme's leading error power;
  checked by a log-log slope fit.
- ``run_divergence_probe``: at or below the critical exponent the raw
  residual variance stops vanishing (plateau at the critical point, growth
  below it); checked against the predicted plateau level.

Replication r of the sweep's n_index-th grid draws from the Philox stream
keyed by (master_seed, n_index * M + r), so results are bit-identical for any
worker pool size.  Reduction happens in replication order on fixed-size
chunks.
"""

from __future__ import annotations

import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constants import beta_terms
from .covariance import HurstGrid, cov, floor_index, rho
from .hermite import power_to_hermite
from .pathgen import GeneratorKind, generate_batch, replication_seeds
from .schemes import Polynomial, SchemeKind, TestFunction, parse_test_function
from .stats import correlation, fit_loglog_slope, ks_test_normal, summarize

#: Replications per work item; fixed so thread count cannot affect results.
_CHUNK = 64

#: Default master seed for CLI runs and the shipped acceptance configuration.
DEFAULT_MASTER_SEED = 12

_DEFAULT_F = Polynomial((0, 0, 0, 0, 0, Fraction(1, 120)))


@dataclass
class ExperimentConfig:
    """Declarative description of one Monte Carlo run."""

    H: float
    n_values: tuple[int, ...]
    replications: int = 2000
    t: float = 1.0
    master_seed: int = DEFAULT_MASTER_SEED
    scheme: SchemeKind = SchemeKind.SIMPSON
    f: TestFunction = field(default_factory=lambda: _DEFAULT_F)
    generator: GeneratorKind = GeneratorKind.CIRCULANT_EMBEDDING
    threads: int | None = None
    # verdict thresholds (engineering choices; the limit theory is asymptotic)
    variance_rel_tol: float = 0.15
    ks_alpha: float = 0.01
    sigma_gate: float = 4.0
    slope_tol: float = 0.35
    plateau_fraction: float = 0.5
    decrease_factor: float = 4.0
    constants_tol: float = 1e-9

    def __post_init__(self) -> None:
        self.n_values = tuple(int(n) for n in self.n_values)
        if not self.n_values:
            raise ValueError("n_values must be nonempty")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValueError(f"n_values must be strictly increasing, got {self.n_values}")
        if self.replications < 100:
            raise ValueError(f"need at least 100 replications, got {self.replications}")
        if not self.t > 0.0:
            raise ValueError(f"t must be positive, got {self.t}")

    def echo(self) -> dict:
        """Round-trippable configuration echo for reports."""
        return {
            "H": float(self.H),
            "n_values": list(self.n_values),
            "replications": int(self.replications),
            "t": float(self.t),
            "master_seed": int(self.master_seed),
            "scheme": self.scheme.value,
            "f": self.f.spec(),
            "generator": self.generator.value,
            "variance_rel_tol": float(self.variance_rel_tol),
            "ks_alpha": float(self.ks_alpha),
            "sigma_gate": float(self.sigma_gate),
            "slope_tol": float(self.slope_tol),
            "plateau_fraction": float(self.plateau_fraction),
            "decrease_factor": float(self.decrease_factor),
            "constants_tol": float(self.constants_tol),
        }

    @classmethod
    def from_file(cls, path_or_stream) -> "ExperimentConfig":
        """Parse the ``key = value`` config format (same keys as the CLI flags)."""
        if hasattr(path_or_stream, "read"):
            text = path_or_stream.read()
        else:
            with open(path_or_stream, "r", encoding="utf-8") as fh:
                text = fh.read()
        raw: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno} is not 'key = value': {line!r}")
            key, _, value = line.partition("=")
            raw[key.strip()] = value.strip()
        return cls.from_mapping(raw)

    @classmethod
    def from_mapping(cls, raw: dict) -> "ExperimentConfig":
        known = {
            "H": ("H", float),
            "n": ("n_values", lambda v: tuple(int(x) for x in str(v).split(","))),
            "M": ("replications", int),
            "t": ("t", float),
            "seed": ("master_seed", int),
            "scheme": ("scheme", SchemeKind),
            "f": ("f", parse_test_function),
            "generator": ("generator", GeneratorKind),
            "threads": ("threads", int),
            "variance_rel_tol": ("variance_rel_tol", float),
            "ks_alpha": ("ks_alpha", float),
            "sigma_gate": ("sigma_gate", float),
            "slope_tol": ("slope_tol", float),
            "plateau_fraction": ("plateau_fraction", float),
            "decrease_factor": ("decrease_factor", float),
            "tol": ("constants_tol", float),
        }
        kwargs = {}
        for key, value in raw.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            name, conv = known[key]
            kwargs[name] = conv(value)
        if "H" not in kwargs or "n_values" not in kwargs:
            raise ValueError("config must define at least H and n")
        return cls(**kwargs)


@dataclass
class ExperimentReport:
    """Canonical JSON payload plus the per-replication table behind it.

    Wall-clock time is kept out of the payload so that reports with equal
    configurations are byte-identical; the CLI logs timing to stderr.
    """

    payload: dict
    rows: list[tuple]
    wall_seconds: float

    @property
    def overall_pass(self) -> bool:
        return bool(self.payload["overall_pass"])

    def to_json(self) -> str:
        return canonical_json(self.payload)

    def write_csv(self, stream) -> None:
        stream.write("replication,seed,n,B_t,statistic\n")
        for rep, seed, n, b_t, stat in self.rows:
            stream.write(f"{rep},{seed},{n},{b_t!r},{stat!r}\n")

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def canonical_json(payload) -> str:
    """Fixed-order, round-trip-stable JSON (floats in shortest lossless form)."""
    return json.dumps(payload, indent=2, allow_nan=False)


# ---------------------------------------------------------------------------
# exact second-moment targets
# ---------------------------------------------------------------------------


def predicted_error_variance(H: float, n: int, t: float, c: float = 1.0) -> float:
    """Exact Var(c * sum_j dB_j^5) at finite n, via the chaos decomposition.

    Splitting the fifth power over the Hermite basis gives pairwise moments
    E[X^5 Y^5] = sum_p C(5,p)^2 q_p! Cov^{q_p} Var^{5-q_p} with q_p = 5 - 2p,
    so the variance reduces to lag sums of the increment autocovariance.
    """
    m = floor_index(n, t)
    lags = np.arange(-(m - 1), m)
    weights = (m - np.abs(lags)).astype(np.float64)
    half_rho = rho(lags, H) / 2.0
    v = float(n) ** (-2.0 * H)
    total = 0.0
    for p, coeff in enumerate(power_to_hermite(5).coeffs):
        q = 5 - 2 * p
        lag_sum = float(np.sum(weights * half_rho**q))
        total += coeff**2 * math.factorial(q) * v ** (5 - q) * v**q * lag_sum
    return c * c * total


def partial_interval_second_moment(grid: HurstGrid, f: TestFunction, t: float) -> float:
    """E[(f(B_t) - f(B_s))^2] for s = floor(nt)/n, by 2-d Gauss-Hermite quadrature.

    Exact for polynomial f up to degree 10 (integrand degree <= 20 < 2 * 24).
    Returns 0 when t falls on the grid.
    """
    m = floor_index(grid.n, t)
    s = m / grid.n
    if s >= t:
        return 0.0
    var_s = cov(grid, s, s)
    var_t = cov(grid, t, t)
    cov_st = cov(grid, s, t)
    l11 = math.sqrt(var_s)
    l21 = cov_st / l11
    l22 = math.sqrt(max(var_t - l21**2, 0.0))
    nodes, weights = np.polynomial.hermite_e.hermegauss(24)
    weights = weights / math.sqrt(2.0 * math.pi)
    u, v = np.meshgrid(nodes, nodes, indexing="ij")
    w = np.outer(weights, weights)
    b_s = l11 * u
    b_t = l21 * u + l22 * v
    return float(np.sum(w * (f(b_t) - f(b_s)) ** 2))


# ---------------------------------------------------------------------------
# replication engine
# ---------------------------------------------------------------------------


def _resolve_threads(threads: int | None) -> int:
    if threads is None or threads <= 0:
        return os.cpu_count() or 1
    return threads


def _run_replicated(config: ExperimentConfig, grid: HurstGrid, n_index: int, per_chunk):
    """Generate all replications for one grid and apply per_chunk to each batch.

    per_chunk(values) maps a (chunk, floor(nT)+1) matrix of paths to a dict of
    per-replication arrays.  Chunks are fixed-size and reassembled in
    replication order, so the thread count never changes the output.
    """
    M = config.replications
    bounds = [(lo, min(lo + _CHUNK, M)) for lo in range(0, M, _CHUNK)]

    def worker(lo: int, hi: int):
        seeds = replication_seeds(config.master_seed, n_index * M + lo, n_index * M + hi)
        values = generate_batch(grid, config.generator, seeds)
        out = per_chunk(values)
        out["seed"] = seeds
        return out

    threads = _resolve_threads(config.threads)
    if threads <= 1 or len(bounds) == 1:
        pieces = [worker(lo, hi) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pieces = list(pool.map(lambda b: worker(*b), bounds))
    return {key: np.concatenate([p[key] for p in pieces]) for key in pieces[0]}


def _batch_riemann_sum(values: np.ndarray, f: TestFunction, kind: SchemeKind) -> np.ndarray:
    """Row-wise Riemann sums over full paths; matches schemes.riemann_sum exactly."""
    left = values[:, :-1]
    db = np.diff(values, axis=1)
    fprime = f.derivative(1)
    acc = np.zeros_like(db)
    for offset, weight in zip(kind.offsets, kind.weights):
        acc += float(weight) * fprime(left + float(offset) * db)
    return np.sum(acc * db, axis=1)


def _batch_error_statistic(values: np.ndarray, f: TestFunction) -> np.ndarray:
    """Row-wise sum f^(5)(mid) dB^5; matches schemes.error_statistic exactly."""
    db = np.diff(values, axis=1)
    mid = 0.5 * (values[:, :-1] + values[:, 1:])
    return np.sum(f.derivative(5)(mid) * db**5, axis=1)


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


def run_clt_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Distributional check of the critical-case Gaussian limit.

    The statistic is n^{(10H-1)/2} sum_j f^(5)(mid_j) dB_j^5 (the exponent is
    zero at the critical H = 1/10).  With constant f^(5) = c the limit is an
    unconditional N(0, c^2 beta^2 t); otherwise only the variance is compared,
    against beta^2 times the Monte Carlo mean of integral f^(5)(B_s)^2 ds.
    """
    if config.scheme is not SchemeKind.SIMPSON:
        raise ValueError("the critical-case experiment is defined for the Simpson scheme")
    if not 0.0 < config.H <= 0.5:
        raise ValueError(f"H must lie in (0, 1/2], got {config.H}")
    started = time.perf_counter()
    k5, k3 = beta_terms(config.H, config.constants_tol)
    beta_sq = 120.0 / 32.0 * k5.value + 75.0 * k3.value
    f5 = config.f.derivative(5)
    constant_f5 = f5.degree == 0 if isinstance(f5, Polynomial) else False
    c = float(f5.coeffs[0]) if constant_f5 and f5.coeffs else (0.0 if constant_f5 else None)
    degenerate = constant_f5 and c == 0.0

    results = []
    rows: list[tuple] = []
    ratio_errors = []
    sigma2 = None
    for i, n in enumerate(config.n_values):
        grid = HurstGrid(config.H, n, T=config.t)
        scale = float(n) ** ((10.0 * config.H - 1.0) / 2.0)

        def per_chunk(values: np.ndarray) -> dict:
            out = {
                "stat": scale * _batch_error_statistic(values, config.f),
                "b_end": values[:, -1].copy(),
            }
            if not constant_f5:
                mid = 0.5 * (values[:, :-1] + values[:, 1:])
                out["f5_sq_integral"] = np.sum(f5(mid) ** 2, axis=1) / n
            return out

        data = _run_replicated(config, grid, i, per_chunk)
        stat, b_end = data["stat"], data["b_end"]
        summary = summarize(stat)
        if constant_f5:
            sigma2 = c * c * beta_sq * config.t
            predicted = scale * scale * predicted_error_variance(config.H, n, config.t, c)
        else:
            sigma2 = beta_sq * float(np.mean(data["f5_sq_integral"]))
            predicted = None
        entry = {
            "n": int(n),
            "count": summary.count,
            "mean": summary.mean,
            "variance": summary.variance,
            "variance_se": summary.variance_se,
            "skewness": summary.skewness,
            "excess_kurtosis": summary.excess_kurtosis,
            "target_variance": float(sigma2),
            "predicted_variance_exact": predicted,
            "partial_interval_second_moment": partial_interval_second_moment(
                grid, config.f, config.t
            ),
        }
        if degenerate or summary.variance == 0.0:
            entry.update({"degenerate": True, "ks_p_value": None, "corr_with_level": None})
            ratio_errors.append(0.0)
        else:
            entry["degenerate"] = False
            if constant_f5:
                ks = ks_test_normal(stat, sigma2)
                entry["ks_statistic"] = ks.statistic
                entry["ks_p_value"] = ks.p_value
            else:
                entry["ks_statistic"] = None
                entry["ks_p_value"] = None
            entry["corr_with_level"] = correlation(stat, b_end)
            ratio_errors.append(abs(summary.variance / sigma2 - 1.0))
        entry["variance_ratio_error"] = ratio_errors[-1]
        results.append(entry)
        rows.extend(
            (r, int(data["seed"][r]), int(n), float(b_end[r]), float(stat[r]))
            for r in range(config.replications)
        )

    last = results[-1]
    M = config.replications
    gate = config.sigma_gate / math.sqrt(M)
    if degenerate or last["degenerate"]:
        verdicts = {
            "variance_final": True,
            "variance_trend": True,
            "ks_final": True,
            "corr_final": True,
            "mean_final": True,
        }
    else:
        var_tol = max(config.variance_rel_tol, 3.0 * last["variance_se"] / last["target_variance"])
        verdicts = {
            "variance_final": ratio_errors[-1] <= var_tol,
            "variance_trend": all(
                b <= a + 1e-15 for a, b in zip(ratio_errors, ratio_errors[1:])
            ),
            "ks_final": (last["ks_p_value"] is None) or (last["ks_p_value"] > config.ks_alpha),
            "corr_final": abs(last["corr_with_level"]) < gate,
            "mean_final": abs(last["mean"]) < config.sigma_gate * math.sqrt(last["variance"] / M),
        }
    payload = {
        "experiment": "clt",
        "config": config.echo(),
        "constants": {
            "kappa3": k3.value,
            "kappa5": k5.value,
            "beta": math.sqrt(beta_sq),
            "beta_squared": beta_sq,
        },
        "statistic_scale_exponent": (10.0 * config.H - 1.0) / 2.0,
        "results": results,
        "verdicts": verdicts,
        "overall_pass": all(verdicts.values()),
        "notes": [
            "verdict thresholds are engineering choices; the limit law is asymptotic "
            "and finite-n agreement is trend plus tolerance",
        ],
    }
    return ExperimentReport(payload, rows, time.perf_counter() - started)


def run_rate_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Decay-rate check E[(riemann_sum - increment of f)^2] ~ n^{1 - 2rH}."""
    threshold = float(config.scheme.critical_hurst)
    if config.H <= threshold:
        raise ValueError(
            f"rate experiment needs H above the {config.scheme.value} threshold "
            f"{threshold:.6g}; the probe below handles H <= threshold"
        )
    started = time.perf_counter()
    exact = config.f.degree is not None and config.f.degree <= config.scheme.exact_degree
    results, rows, moments = _residual_sweep(config)
    target = 1.0 - 2.0 * config.scheme.error_power * config.H
    if exact:
        verdicts = {"exact": True, "slope": True}
        slope_entry = {"exact": True, "slope": None, "stderr": None, "target": target}
    else:
        fit = fit_loglog_slope(list(zip(config.n_values, moments)))
        verdicts = {
            "exact": True,
            "slope": abs(fit.slope - target) <= config.slope_tol,
        }
        slope_entry = {
            "exact": False,
            "slope": fit.slope,
            "stderr": fit.stderr,
            "target": target,
        }
    payload = {
        "experiment": "rate",
        "config": config.echo(),
        "results": results,
        "fit": slope_entry,
        "verdicts": verdicts,
        "overall_pass": all(verdicts.values()),
        "notes": [],
    }
    return ExperimentReport(payload, rows, time.perf_counter() - started)


def run_divergence_probe(config: ExperimentConfig) -> ExperimentReport:
    """Behavior of the raw residual variance at and below the critical exponent."""
    started = time.perf_counter()
    threshold = float(config.scheme.critical_hurst)
    results, rows, _ = _residual_sweep(config, center=True)
    variances = [r["variance"] for r in results]
    ses = [r["variance_se"] for r in results]
    notes = []
    if config.H < threshold - 1e-12:
        regime = "below-threshold"
        steps_ok = all(
            variances[i + 1] >= variances[i] - math.hypot(ses[i], ses[i + 1])
            for i in range(len(variances) - 1)
        )
        verdicts = {"non_vanishing": steps_ok}
    elif abs(config.H - threshold) <= 1e-12:
        regime = "critical"
        plateau = _plateau_level(config)
        notes.append(f"predicted residual variance plateau {plateau!r}")
        verdicts = {"non_vanishing": variances[-1] >= config.plateau_fraction * plateau}
    else:
        regime = "above-threshold"  # control case: the residual must vanish
        verdicts = {
            "vanishing": variances[0] >= config.decrease_factor * variances[-1]
        }
    payload = {
        "experiment": "divergence",
        "config": config.echo(),
        "regime": regime,
        "results": results,
        "verdicts": verdicts,
        "overall_pass": all(verdicts.values()),
        "notes": notes,
    }
    return ExperimentReport(payload, rows, time.perf_counter() - started)


def _residual_sweep(config: ExperimentConfig, center: bool = False):
    """Monte Carlo of the scheme residual across n; returns results, rows, moments."""
    f0 = float(config.f(0.0))
    results = []
    rows: list[tuple] = []
    moments = []
    for i, n in enumerate(config.n_values):
        grid = HurstGrid(config.H, n, T=config.t)

        def per_chunk(values: np.ndarray) -> dict:
            b_end = values[:, -1]
            residual = _batch_riemann_sum(values, config.f, config.scheme) - (
                config.f(b_end) - f0
            )
            return {"residual": residual, "b_end": b_end.copy()}

        data = _run_replicated(config, grid, i, per_chunk)
        residual, b_end = data["residual"], data["b_end"]
        second_moment = float(np.mean(residual**2))
        summary = summarize(residual)
        results.append(
            {
                "n": int(n),
                "count": summary.count,
                "mean": summary.mean,
                "variance": summary.variance,
                "variance_se": summary.variance_se,
                "second_moment": second_moment,
                "second_moment_se": float(np.std(residual**2, ddof=1))
                / math.sqrt(config.replications),
                "partial_interval_second_moment": partial_interval_second_moment(
                    grid, config.f, config.t
                ),
            }
        )
        moments.append(summary.variance if center else second_moment)
        rows.extend(
            (r, int(data["seed"][r]), int(n), float(b_end[r]), float(residual[r]))
            for r in range(config.replications)
        )
    return results, rows, moments


def _plateau_level(config: ExperimentConfig) -> float:
    """Predicted critical-case residual variance: (c beta / 2880)^2 t for constant f^(5)."""
    f5 = config.f.derivative(5)
    if not (isinstance(f5, Polynomial) and f5.degree == 0):
        raise ValueError("the critical divergence probe needs constant f^(5)")
    c = float(f5.coeffs[0]) if f5.coeffs else 0.0
    k5, k3 = beta_terms(config.H, config.constants_tol)
    beta_sq = 120.0 / 32.0 * k5.value + 75.0 * k3.value
    return c * c * beta_sq * config.t / 2880.0**2
