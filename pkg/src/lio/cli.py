"""Command-line front end.

Subcommands::

    lio run CONFIG [--dry-run] [--surface]
    lio demo-bisection N
    lio benchmarks list

Exit codes: 0 success, 2 configuration or usage error, 3 oracle error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import shlex
import subprocess
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .acquisition import F3_MODES, ObjectiveBounds, ObjectiveWeights
from .benchmarks import REGISTRY, get_benchmark, noisy_oracle
from .errors import LioError, OracleError
from .gp_core import DEDUP_TOL, Dataset, Domain, GPModel, KernelConfig, predict
from .information import bisection_demo
from .sampling import as_points
from .search_loop import METHODS, GridSampler, LoopConfig, MonteCarloSampler, RunTrace, fit_primary, run

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_ORACLE, EXIT_IO = 0, 2, 3, 4
SEED_ENV = "LIO_SEED"
DEFAULT_NOISE_VAR = 0.01


class ConfigError(LioError):
    """A run configuration is missing a key or has an out-of-range value."""


@dataclass(frozen=True)
class RunConfig:
    """A parsed configuration file: loop settings plus the oracle binding."""

    loop: LoopConfig
    benchmark: str | None = None
    oracle_cmd: str | None = None
    initial_points: list | None = None
    output_dir: str = "lio-run"
    extras: dict = field(default_factory=dict)


def _fmt(v: float) -> str:
    return f"{v:.9g}"


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _number(raw: dict, key: str, default=None, *, lo=None, lo_open=False, integer=False):
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(f"{key!r} must be an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key!r} must be finite, got {value!r}")
    if lo is not None and (value <= lo if lo_open else value < lo):
        rel = ">" if lo_open else ">="
        raise ConfigError(f"{key!r} must be {rel} {lo}, got {value!r}")
    return int(value) if integer else float(value)


def _vector(value, key: str, dim: int | None = None) -> list[float]:
    if not isinstance(value, list) or not value or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise ConfigError(f"{key!r} must be a non-empty list of numbers, got {value!r}")
    if dim is not None and len(value) != dim:
        raise ConfigError(f"{key!r} must have {dim} entries, got {len(value)}")
    return [float(v) for v in value]


def config_from_dict(raw: dict) -> RunConfig:
    """Validate a configuration mapping and apply defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    benchmark, oracle_cmd = raw.get("benchmark"), raw.get("oracle_cmd")
    if (benchmark is None) == (oracle_cmd is None):
        raise ConfigError("exactly one of 'benchmark' and 'oracle_cmd' must be set")
    if benchmark is not None and benchmark not in REGISTRY:
        raise ConfigError(f"'benchmark' must be one of {sorted(REGISTRY)}, got {benchmark!r}")
    if oracle_cmd is not None and (not isinstance(oracle_cmd, str) or not oracle_cmd.strip()):
        raise ConfigError("'oracle_cmd' must be a non-empty string")
    spec = get_benchmark(benchmark) if benchmark else None

    if "domain" in raw:
        dom = raw["domain"]
        if not isinstance(dom, dict):
            raise ConfigError("'domain' must be an object with 'lower' and 'upper'")
        lower = _vector(dom.get("lower"), "domain.lower")
        upper = _vector(dom.get("upper"), "domain.upper", len(lower))
        try:
            domain = Domain(lower, upper)
        except LioError as exc:
            raise ConfigError(f"'domain': {exc}") from None
    elif spec is not None:
        domain = spec.domain
    else:
        raise ConfigError("missing required key 'domain'")

    smp = raw.get("sampler")
    if smp is None:
        if spec is None:
            raise ConfigError("missing required key 'sampler'")
        sampler = GridSampler(spec.reference_grid_step)
    elif not isinstance(smp, dict) or smp.get("type") not in ("grid", "monte_carlo"):
        raise ConfigError("'sampler.type' must be 'grid' or 'monte_carlo'")
    elif smp["type"] == "grid":
        step = _number(smp, "step", lo=0, lo_open=True)
        if np.any(step > domain.upper - domain.lower):
            raise ConfigError(f"'sampler.step' must not exceed the domain width, got {step}")
        sampler = GridSampler(step)
    else:
        count = _number(smp, "count", lo=1, integer=True)
        seed = _number(smp, "seed", 0, integer=True)
        if os.environ.get(SEED_ENV):
            try:
                seed = int(os.environ[SEED_ENV])
            except ValueError:
                raise ConfigError(f"{SEED_ENV} must be an integer, got {os.environ[SEED_ENV]!r}") from None
        sampler = MonteCarloSampler(count, seed)

    weights_raw = raw.get("weights", [1.0, 1.0, 1.0])
    weights_list = _vector(weights_raw, "weights", 3)
    if any(w < 0 for w in weights_list) or sum(weights_list) <= 0:
        raise ConfigError(f"'weights' must be nonnegative and not all zero, got {weights_raw!r}")
    bounds_raw = raw.get("bounds", {"b1": 0.5, "b2": 0.2})
    if not isinstance(bounds_raw, dict):
        raise ConfigError("'bounds' must be an object with 'b1' and 'b2'")
    b1 = _number(bounds_raw, "b1", 0.5, lo=0, lo_open=True)
    b2 = _number(bounds_raw, "b2", 0.2, lo=0, lo_open=True)

    method = raw.get("method", "weighted")
    if method not in METHODS:
        raise ConfigError(f"'method' must be one of {list(METHODS)}, got {method!r}")
    f3_mode = raw.get("f3_mode", "variance")
    if f3_mode not in F3_MODES:
        raise ConfigError(f"'f3_mode' must be one of {list(F3_MODES)}, got {f3_mode!r}")
    center = raw.get("center_values", True)
    if not isinstance(center, bool):
        raise ConfigError(f"'center_values' must be true or false, got {center!r}")

    loop = LoopConfig(
        domain=domain,
        sampler=sampler,
        kernel_f=KernelConfig(_number(raw, "kernel_f_var", 0.1, lo=0, lo_open=True)),
        kernel_e=KernelConfig(_number(raw, "kernel_e_var", 0.1, lo=0, lo_open=True)),
        noise_var=_number(raw, "noise_var", DEFAULT_NOISE_VAR, lo=0),
        method=method,
        weights=ObjectiveWeights(*weights_list),
        bounds=ObjectiveBounds(b1, b2),
        f3_mode=f3_mode,
        budget=_number(raw, "budget", lo=1, integer=True),
        center_values=center,
        eta=_number(raw, "eta", 0.0, lo=0),
        dedup_tol=_number(raw, "dedup_tol", DEDUP_TOL, lo=0),
    )

    initial = raw.get("initial_points")
    if initial is not None:
        if not isinstance(initial, list):
            raise ConfigError("'initial_points' must be a list of points")
        initial = [_vector(p, "initial_points[]", domain.dim) for p in initial]
        for p in initial:
            if not domain.contains(p, tol=1e-9):
                raise ConfigError(f"'initial_points' entry {p} lies outside the domain")

    output_dir = raw.get("output_dir", "lio-run")
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("'output_dir' must be a non-empty string")
    return RunConfig(loop, benchmark, oracle_cmd, initial, output_dir)


def parse_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return config_from_dict(raw)


def config_to_dict(cfg: RunConfig) -> dict:
    loop = cfg.loop
    if isinstance(loop.sampler, GridSampler):
        sampler = {"type": "grid", "step": loop.sampler.step}
    else:
        sampler = {"type": "monte_carlo", "count": loop.sampler.count, "seed": loop.sampler.seed}
    out = {}
    if cfg.benchmark is not None:
        out["benchmark"] = cfg.benchmark
    else:
        out["oracle_cmd"] = cfg.oracle_cmd
    out.update(
        domain={"lower": loop.domain.lower.tolist(), "upper": loop.domain.upper.tolist()},
        sampler=sampler,
        kernel_f_var=loop.kernel_f.length_scale_sq,
        kernel_e_var=loop.kernel_e.length_scale_sq,
        noise_var=loop.noise_var,
        method=loop.method,
        weights=loop.weights.as_array().tolist(),
        bounds={"b1": loop.bounds.b1, "b2": loop.bounds.b2},
        f3_mode=loop.f3_mode,
        budget=loop.budget,
        center_values=loop.center_values,
        eta=loop.eta,
        dedup_tol=loop.dedup_tol,
    )
    if cfg.initial_points is not None:
        out["initial_points"] = [list(p) for p in cfg.initial_points]
    out["output_dir"] = cfg.output_dir
    return out


# ---------------------------------------------------------------------------
# external oracle
# ---------------------------------------------------------------------------

class SubprocessOracle:
    """Line protocol over a child process's stdin/stdout.

    Each query is written as one line of space-separated coordinates; the
    child answers with one line holding a single number.
    """

    def __init__(self, cmd: str):
        self.cmd = cmd
        self._proc = None

    def _start(self):
        try:
            self._proc = subprocess.Popen(
                shlex.split(self.cmd), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, bufsize=1,
            )
        except OSError as exc:
            raise OracleError(f"cannot start oracle {self.cmd!r}: {exc}") from None

    def __call__(self, x) -> float:
        if self._proc is None:
            self._start()
        query = " ".join(repr(float(v)) for v in np.atleast_1d(x))
        try:
            self._proc.stdin.write(query + "\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise OracleError(f"oracle process failed on query {query!r}: {exc}") from None
        if not line:
            raise OracleError(f"oracle process closed its output on query {query!r}")
        try:
            value = float(line.strip())
        except ValueError:
            raise OracleError(f"oracle replied with non-numeric line {line.rstrip()!r}") from None
        if not math.isfinite(value):
            raise OracleError(f"oracle replied with non-finite value {line.rstrip()!r}")
        return value

    def close(self):
        if self._proc is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
            self._proc = None


# ---------------------------------------------------------------------------
# outputs
# ---------------------------------------------------------------------------

def emit_trace_csv(trace: RunTrace, path) -> None:
    if not trace.records:
        raise ValueError("trace has no iterations to write")
    d = trace.config_echo.domain.dim
    header = (
        ["iter"] + [f"x_{i}" for i in range(d)]
        + ["observed_y", "f1", "f2", "f3", "fallback"]
        + [f"best_x_{i}" for i in range(d)]
        + ["best_est", "mean_variance", "mean_entropy", "agg_entropy"]
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in trace.records:
            ov = r.objective_values
            writer.writerow(
                [r.iter] + [_fmt(v) for v in r.chosen_point]
                + [_fmt(r.observed_value), _fmt(ov.f1), _fmt(ov.f2), _fmt(ov.f3), int(r.fallback_used)]
                + [_fmt(v) for v in r.best_est_point]
                + [_fmt(r.best_est_value), _fmt(r.info.mean_variance),
                   _fmt(r.info.mean_entropy), _fmt(r.info.aggregate_entropy)]
            )


def emit_surface_dump(model: GPModel, candidates, path) -> None:
    pts = as_points(candidates)
    mean, var = predict(model, pts)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x_{i}" for i in range(pts.shape[1])] + ["mean", "variance"])
        for p, m, v in zip(pts, mean, var):
            writer.writerow([_fmt(c) for c in p] + [_fmt(m), _fmt(v)])


def summary_dict(trace: RunTrace, cfg: RunConfig) -> dict:
    def vec(p):
        return None if p is None else [float(v) for v in p]

    def num(v):
        return None if v is None or not math.isfinite(v) else float(v)

    return {
        "best_point": vec(trace.best_point),
        "best_est_value": num(trace.best_est_value),
        "best_observed_point": vec(trace.best_observed_point),
        "best_observed_value": num(trace.best_observed_value),
        "n_observations": len(trace.records),
        "n_data_points": len(trace.final_dataset),
        "fallback_count": sum(r.fallback_used for r in trace.records),
        "stop_reason": trace.stop_reason,
        "error": trace.error,
        "config_echo": config_to_dict(cfg),
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _initial_data(cfg: RunConfig, oracle) -> Dataset | None:
    if cfg.initial_points is None:
        return None
    loop = cfg.loop
    data = Dataset.empty(loop.domain.dim)
    for p in cfg.initial_points:
        y = oracle(np.asarray(p))
        if not math.isfinite(y):
            raise OracleError(f"oracle returned non-finite value at initial point {p}")
        data = data.append(p, y, loop.noise_var, 0.0)
    return data


def cmd_run(config_path, dry_run: bool = False, surface: bool = False, out=None) -> int:
    out = out or sys.stdout
    try:
        cfg = parse_config(config_path)
    except (ConfigError, LioError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if dry_run:
        print(f"config OK: {config_path}", file=out)
        return EXIT_OK

    outdir = Path(cfg.output_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        if not os.access(outdir, os.W_OK):
            raise PermissionError(f"{outdir} is not writable")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    oracle = noisy_oracle(cfg.benchmark) if cfg.benchmark else SubprocessOracle(cfg.oracle_cmd)
    try:
        try:
            trace = run(cfg.loop, oracle, _initial_data(cfg, oracle))
        except OracleError as exc:
            print(f"oracle error: {exc}", file=sys.stderr)
            return EXIT_ORACLE
        except LioError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    finally:
        if isinstance(oracle, SubprocessOracle):
            oracle.close()

    try:
        if trace.records:
            emit_trace_csv(trace, outdir / "trace.csv")
        with open(outdir / "summary.json", "w") as fh:
            json.dump(summary_dict(trace, cfg), fh, indent=2, sort_keys=True)
            fh.write("\n")
        if surface and len(trace.final_dataset):
            model = fit_primary(trace.final_dataset, cfg.loop)
            emit_surface_dump(model, cfg.loop.sampler.sample(cfg.loop.domain, 0), outdir / "surface.csv")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    if trace.stop_reason == "oracle_error":
        print(f"oracle error: {trace.error}", file=sys.stderr)
        return EXIT_ORACLE
    if trace.best_point is not None:
        point = ", ".join(_fmt(v) for v in trace.best_point)
        print(f"best point: ({point})  estimated value: {_fmt(trace.best_est_value)}", file=out)
    return EXIT_OK


def cmd_demo_bisection(n: int, out=None) -> int:
    out = out or sys.stdout
    if n < 2:
        print("usage error: demo-bisection needs N >= 2", file=sys.stderr)
        return EXIT_CONFIG
    bits, split = bisection_demo(n)
    print(f"initial entropy: {bits:.3f} bits", file=out)
    print(f"optimal split: {split:.6f}", file=out)
    return EXIT_OK


def cmd_benchmarks_list(out=None) -> int:
    out = out or sys.stdout
    for name, spec in REGISTRY.items():
        dom = " x ".join(f"[{lo:g}, {hi:g}]" for lo, hi in zip(spec.domain.lower, spec.domain.upper))
        optima = "; ".join(
            "(" + ", ".join(f"{c:.4g}" for c in p) + f") -> {v:.4f}" for p, v in spec.true_optima
        )
        print(f"{name:<20} d={spec.domain.dim}  {dom}  grid step {spec.reference_grid_step:g}  optima: {optima}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lio", description="Optimization of expensive black-box functions.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log every iteration")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an optimization from a JSON config")
    p_run.add_argument("config")
    p_run.add_argument("--dry-run", action="store_true", help="validate the config and exit")
    p_run.add_argument("--surface", action="store_true", help="also write surface.csv")

    p_bis = sub.add_parser("demo-bisection", help="entropy of a uniform guess and its best split")
    p_bis.add_argument("n", type=int)

    p_bench = sub.add_parser("benchmarks", help="built-in test functions")
    p_bench.add_argument("action", choices=["list"])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "run":
        return cmd_run(args.config, args.dry_run, args.surface)
    if args.command == "demo-bisection":
        return cmd_demo_bisection(args.n)
    return cmd_benchmarks_list()


if __name__ == "__main__":
    sys.exit(main())
