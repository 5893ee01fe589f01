"""Seeded Monte Carlo harness: paired trials, CDF/sweep aggregation, CSV output.

Every trial derives its scenario from (master_seed, trial_index) alone, so all
methods and regularization values inside a trial share one channel realization
(paired comparison) and any worker count reproduces identical results.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .baselines import fast_antenna_selection, fixed_array_positions
from .channel import (
    AntennaPositions,
    PathSet,
    PositionGrid,
    channel_matrix,
    sample_paths,
    trial_seed,
    wavelength_from_carrier,
)
from .flex_omp import RefinementParams, flexible_precoding
from .precoding import normalize_precoder, rzf_dual, sum_rate

METHODS = ("flexible", "fast_as", "fixed")

RAW_HEADER = ("trial", "method", "alpha", "G", "L", "sum_rate_bps_hz", "wall_ms")
AGG_HEADER = ("sweep_var", "value", "method", "alpha", "mean", "stderr", "trials")
CDF_HEADER = ("method", "alpha", "sum_rate_bps_hz", "cdf")


@dataclass(frozen=True)
class ExperimentConfig:
    num_users: int = 4
    num_antennas: int = 4
    num_paths: int = 15
    grid_nx: int = 6
    grid_nz: int = 6
    carrier_hz: float = 3e9
    alpha_list: tuple[float, ...] = (1e-2, 1.0, 1e2)
    noise_power: float = 1.0
    total_power: float = 1.0
    trials: int = 500
    master_seed: int = 20240803
    methods: tuple[str, ...] = METHODS
    refinement: RefinementParams = field(default_factory=RefinementParams)
    fixed_nx: int = 2
    fixed_nz: int = 2

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.grid_nx * self.grid_nz < self.num_antennas:
            raise ValueError("movable region is smaller than the antenna count")
        if self.fixed_nx * self.fixed_nz != self.num_antennas:
            raise ValueError("fixed_nx * fixed_nz must equal num_antennas")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")

    @property
    def wavelength(self) -> float:
        return wavelength_from_carrier(self.carrier_hz)

    @property
    def grid(self) -> PositionGrid:
        return PositionGrid(self.grid_nx, self.grid_nz, self.wavelength)


@dataclass
class TrialResult:
    trial_index: int
    method: str
    alpha: float
    sum_rate: float
    positions: AntennaPositions | None
    wall_time: float
    scenario_digest: str
    error: str | None = None
    trace: list | None = None


def run_method(config: ExperimentConfig, paths: PathSet, method: str, alpha: float,
               trace: list | None = None) -> tuple[AntennaPositions, np.ndarray]:
    """Positions and normalized precoder for one method on one scenario."""
    wavelength = config.wavelength
    if method == "flexible":
        return flexible_precoding(paths, config.grid, config.num_antennas, alpha,
                                  config.refinement, config.total_power, trace)
    if method == "fast_as":
        positions = fast_antenna_selection(paths, config.grid, config.num_antennas,
                                           config.noise_power)
    elif method == "fixed":
        positions = fixed_array_positions(config.fixed_nx, config.fixed_nz, wavelength)
    else:
        raise ValueError(f"unknown method '{method}'; choose from {METHODS}")
    H = channel_matrix(paths, positions, wavelength)
    return positions, normalize_precoder(rzf_dual(H, alpha), config.total_power)


def run_trial(config: ExperimentConfig, trial_index: int, method: str, alpha: float,
              collect_trace: bool = False) -> TrialResult:
    """One (trial, method, alpha) cell; failures are recorded, never dropped."""
    if method not in METHODS:
        raise ValueError(f"unknown method '{method}'; choose from {METHODS}")
    seed = trial_seed(config.master_seed, trial_index)
    paths = sample_paths(seed, config.num_users, config.num_paths)
    digest = paths.digest()
    trace: list | None = [] if collect_trace and method == "flexible" else None
    start = time.perf_counter()
    try:
        positions, F = run_method(config, paths, method, alpha, trace)
        H = channel_matrix(paths, positions, config.wavelength)
        rate = sum_rate(H, F, config.noise_power)
    except Exception as err:
        return TrialResult(trial_index, method, float(alpha), float("nan"), None,
                           time.perf_counter() - start, digest,
                           error=f"{type(err).__name__}: {err}")
    return TrialResult(trial_index, method, float(alpha), rate, positions,
                       time.perf_counter() - start, digest, trace=trace)


def _trial_job(args) -> TrialResult:
    config, method, alpha, trial_index, collect_trace = args
    return run_trial(config, trial_index, method, alpha, collect_trace)


def run_monte_carlo(config: ExperimentConfig, workers: int = 1,
                    collect_trace: bool = False) -> list[TrialResult]:
    """All (method, alpha, trial) cells, ordered by (method, alpha, trial_index)."""
    jobs = [(config, method, alpha, t, collect_trace)
            for method in config.methods
            for alpha in config.alpha_list
            for t in range(config.trials)]
    if workers <= 1:
        return [_trial_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(jobs) // (workers * 8))
        return list(pool.map(_trial_job, jobs, chunksize=chunk))


def error_summary(results: list[TrialResult]) -> str | None:
    failed = [r for r in results if r.error is not None]
    if not failed:
        return None
    first = failed[0]
    return (f"{len(failed)}/{len(results)} trials failed; first: trial {first.trial_index} "
            f"method={first.method} alpha={first.alpha}: {first.error}")


def cdf_points(results: list[TrialResult], method: str,
               alpha: float) -> list[tuple[float, float]]:
    """Empirical CDF of sum rate for one (method, alpha) slice."""
    rates = sorted(r.sum_rate for r in results
                   if r.method == method and r.alpha == alpha and r.error is None)
    if not rates:
        raise ValueError(f"no results for method={method}, alpha={alpha}")
    n = len(rates)
    return [(rate, (i + 1) / n) for i, rate in enumerate(rates)]


def _config_for_value(config: ExperimentConfig, variable: str, value: int) -> ExperimentConfig:
    if variable == "G":
        side = round(np.sqrt(value))
        if side * side != value:
            raise ValueError(
                f"region sweep values must be perfect squares (grids are square); got G={value}")
        return replace(config, grid_nx=side, grid_nz=side)
    if variable == "L":
        return replace(config, num_paths=value)
    raise ValueError(f"unknown sweep variable '{variable}'; use 'G' or 'L'")


def sweep(config: ExperimentConfig, variable: str, values: list[int],
          workers: int = 1) -> list[tuple]:
    """Mean/stderr sum rate per (value, method, alpha); rows match AGG_HEADER."""
    rows = []
    for value in values:
        cfg = _config_for_value(config, variable, value)
        results = run_monte_carlo(cfg, workers)
        for method in cfg.methods:
            for alpha in cfg.alpha_list:
                rates = [r.sum_rate for r in results
                         if r.method == method and r.alpha == alpha and r.error is None]
                mean = float(np.mean(rates)) if rates else float("nan")
                stderr = (float(np.std(rates, ddof=1) / np.sqrt(len(rates)))
                          if len(rates) > 1 else 0.0)
                rows.append((variable, value, method, alpha, mean, stderr, len(rates)))
    return rows


def write_raw_csv(path, results: list[TrialResult], config: ExperimentConfig,
                  timing: bool = False) -> None:
    """Per-trial rows. wall_ms is 0 unless timing is requested, keeping files reproducible."""
    G = config.grid_nx * config.grid_nz
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RAW_HEADER)
        for r in results:
            wall_ms = r.wall_time * 1e3 if timing else 0.0
            writer.writerow([r.trial_index, r.method, r.alpha, G, config.num_paths,
                             r.sum_rate, wall_ms])


def write_cdf_csv(path, results: list[TrialResult], config: ExperimentConfig) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CDF_HEADER)
        for method in config.methods:
            for alpha in config.alpha_list:
                for rate, prob in cdf_points(results, method, alpha):
                    writer.writerow([method, alpha, rate, prob])


def write_agg_csv(path, rows: list[tuple]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(AGG_HEADER)
        writer.writerows(rows)


# --- flat key = value config files -------------------------------------------

def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got '{text}'")


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _parse_names(text: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


_CONFIG_PARSERS = {
    "num_users": int,
    "num_antennas": int,
    "num_paths": int,
    "grid_nx": int,
    "grid_nz": int,
    "carrier_hz": float,
    "alpha_list": _parse_floats,
    "noise_power": float,
    "total_power": float,
    "trials": int,
    "master_seed": int,
    "methods": _parse_names,
    "fixed_nx": int,
    "fixed_nz": int,
    "refine_max_iters": int,
    "refine_gamma_max": float,
    "refine_bisection_tol": float,
    "refine_step_tol": float,
    "refine_final_sweep": _parse_bool,
}

_REFINE_FIELDS = {
    "refine_max_iters": "max_refine_iters",
    "refine_gamma_max": "gamma_max",
    "refine_bisection_tol": "bisection_tol",
    "refine_step_tol": "step_tol",
    "refine_final_sweep": "final_sweep",
}


def config_from_dict(values: dict) -> ExperimentConfig:
    values = dict(values)
    refine_kwargs = {attr: values.pop(key)
                     for key, attr in _REFINE_FIELDS.items() if key in values}
    unknown = set(values) - (set(_CONFIG_PARSERS) - set(_REFINE_FIELDS))
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(refinement=RefinementParams(**refine_kwargs), **values)


def load_config(path) -> ExperimentConfig:
    """Parse a flat 'key = value' config file; unknown keys are an error."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got '{raw.strip()}'")
        key, _, value = line.partition("=")
        key = key.strip()
        parser = _CONFIG_PARSERS.get(key)
        if parser is None:
            raise ValueError(f"{path}:{lineno}: unknown config key '{key}'")
        try:
            values[key] = parser(value.strip())
        except ValueError as err:
            raise ValueError(f"{path}:{lineno}: bad value for '{key}': {err}") from err
    return config_from_dict(values)
