"""Command-line front end: one subcommand per analysis surface.

Every run is driven by an ExperimentConfig, which serializes to a plain
key=value text file; the sha256 of that canonical text is embedded in
every output file, so identical configs produce byte-identical files.

Exit codes: 0 success, 2 invalid configuration, 3 numeric guard or
capacity violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from ._util import fmt17
from .additive import (
    AdditiveFunctionSpec,
    congruence_spec,
    constant_spec,
    omega_spec,
    prime_mean,
    sampler_spec,
    two_value_spec,
)
from .converse import converse_check, forward_check, moments_from_coeffs
from .distributions import StepDistribution
from .errors import AdditiveTailsError
from .levy import mc_tail, sample
from .prime_side import prime_measure
from .saddle import tilt_gap
from .series import tilt_coeffs
from .sieve import cached_factor_table, get_table

CACHE_ENV = "ADDTAILS_CACHE_DIR"

_SPEC_CATALOG = [
    ("omega", "g(p) = 1 (number of distinct prime factors)"),
    ("constant:VALUE", "g(p) = VALUE for every prime"),
    ("two-value:A,B,SELECTOR", "g = A on one prime-index parity class, B on the other (SELECTOR odd|even)"),
    ("congruence:MODULUS,RESIDUE", "g(p) = 1 when p = RESIDUE (mod MODULUS), else 0"),
    ("sampler:TARGET", "atom values assigned to primes so the prime-side law converges to TARGET"),
]
_TARGET_CATALOG = [
    ("delta:LOCATION", "unit step at LOCATION (value 1/2 at the jump)"),
    ("atoms:LOC=MASS,...", "finite atomic law; masses must sum to 1"),
]


@dataclass
class ExperimentConfig:
    """Everything a run needs; field order is the file format."""

    command: str = ""
    spec: str = "omega"
    x: int = 1_000_000
    x_grid: str = "10000,100000,1000000"
    target: str = "delta:1"
    deltas: str = "0.5:3:0.25"
    kmax: int = 20
    mc_n: int = 100_000
    seed: int = 1
    u: float = 4.0
    n: int = 100_000
    thresholds: str = "0:3:0.5"
    output: str = ""
    format: str = "csv"
    threads: int = 1

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if f.type == "float" or isinstance(value, float):
                value = fmt17(value)
            lines.append(f"{f.name}={value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected key=value, got {raw!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            if key not in known:
                raise ValueError(f"config line {lineno}: unknown key {key!r}")
            caster = {"int": int, "float": float, "str": str}[known[key].type]
            kwargs[key] = caster(value.strip())
        return cls(**kwargs)

    def hash(self) -> str:
        """Identifies the experiment: every field except the output path
        and the worker cap (neither can change computed values)."""
        lines = [
            line
            for line in self.to_text().splitlines()
            if not line.startswith(("output=", "threads="))
        ]
        return hashlib.sha256("\n".join(lines).encode()).hexdigest()


def parse_target(text: str) -> StepDistribution:
    kind, _, rest = text.partition(":")
    if kind == "delta":
        return StepDistribution.delta(float(rest))
    if kind == "atoms":
        locations, masses = [], []
        for pair in rest.split(","):
            loc, _, mass = pair.partition("=")
            locations.append(float(loc))
            masses.append(float(mass))
        return StepDistribution(np.array(locations), np.array(masses))
    raise ValueError(f"unknown target {text!r} (want delta:... or atoms:...)")


def parse_spec(text: str) -> AdditiveFunctionSpec:
    kind, _, rest = text.partition(":")
    if kind == "omega":
        return omega_spec()
    if kind == "constant":
        return constant_spec(float(rest))
    if kind == "two-value":
        parts = rest.split(",")
        if len(parts) == 2:
            return two_value_spec(float(parts[0]), float(parts[1]))
        if len(parts) == 3:
            return two_value_spec(float(parts[0]), float(parts[1]), parts[2])
        raise ValueError(f"two-value wants A,B[,SELECTOR], got {rest!r}")
    if kind == "sampler":
        return sampler_spec(parse_target(rest))
    if kind == "congruence":
        modulus, residue = rest.split(",")
        return congruence_spec(int(modulus), int(residue))
    raise ValueError(f"unknown spec {text!r}")


def parse_grid(text: str) -> np.ndarray:
    """start:stop:step, inclusive of stop up to roundoff."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid wants start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"bad grid {text!r}")
    return np.arange(start, stop + 0.5 * step, step)

def parse_x_grid(text: str) -> list[int]:
    return [int(float(part)) for part in text.split(",")]


def _meta_lines(config: ExperimentConfig, extra: dict | None = None) -> list[str]:
    lines = [f"# additive-tails v{__version__}", f"# config_hash={config.hash()}"]
    for key, value in (extra or {}).items():
        lines.append(f"# {key}={value}")
    return lines


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return fmt17(float(value))


def _write_csv(config: ExperimentConfig, columns: list[str], rows, extra=None) -> None:
    lines = _meta_lines(config, extra)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_format_cell(cell) for cell in row))
    with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(config: ExperimentConfig, payload: dict) -> None:
    document = {
        "schema_version": 1,
        "tool_version": __version__,
        "config_hash": config.hash(),
        "config": {f.name: getattr(config, f.name) for f in fields(config)},
    }
    document.update(payload)
    with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(document, fh, indent=2)
        fh.write("\n")


def _target_payload(target: StepDistribution) -> dict:
    return {
        "locations": target.locations.tolist(),
        "masses": target.masses.tolist(),
        "alpha": target.alpha,
    }


def _run_sieve_stats(config: ExperimentConfig) -> int:
    table = get_table(config.x)
    spec = parse_spec(config.spec)
    mu = prime_mean(spec, config.x, table)
    measure = prime_measure(spec, config.x, table)
    factor = cached_factor_table(config.x, os.environ.get(CACHE_ENV))
    spf_primes = int(
        np.count_nonzero(factor.spf[2:] == np.arange(2, factor.limit + 1, dtype=np.uint32))
    )
    cut = int(np.searchsorted(table.primes, config.x, side="right"))
    row = [config.x, cut, int(table.primes[cut - 1]), mu, measure.total_mass, spf_primes]
    _write_csv(config, ["x", "primes", "last_prime", "mu", "b2", "spf_prime_count"], [row])
    return 0


def _run_tails(config: ExperimentConfig, as_json: bool) -> int:
    spec = parse_spec(config.spec)
    target = parse_target(config.target)
    deltas = parse_grid(config.deltas)
    report = forward_check(
        spec,
        config.x,
        target,
        deltas,
        mc_n=config.mc_n,
        seed=config.seed,
        kmax=config.kmax,
        threads=config.threads,
    )
    columns = [
        "delta",
        "empirical",
        "arith_series",
        "arith_saddle",
        "levy_series",
        "levy_saddle",
        "mc_estimate",
        "mc_ci_lo",
        "mc_ci_hi",
        "ratio_emp_levy_saddle",
        "ratio_mc_levy_saddle",
        "skipped",
    ]
    arrays = [getattr(report, name if name != "delta" else "deltas") for name in columns]
    if as_json:
        payload = {
            "report": "forward",
            "inputs": {
                "spec": spec.name,
                "x": report.x,
                "target": _target_payload(target),
                "mc_n": report.mc_n,
                "seed": report.seed,
                "kmax": config.kmax,
            },
            "mu": report.mu,
            "b2": report.b2,
            "kolmogorov_distance": report.kolmogorov,
            "columns": {name: np.asarray(col).tolist() for name, col in zip(columns, arrays)},
        }
        _write_json(config, payload)
    else:
        rows = list(zip(*arrays))
        extra = {
            "x": report.x,
            "mu": fmt17(report.mu),
            "b2": fmt17(report.b2),
            "kolmogorov_distance": fmt17(report.kolmogorov),
            "mc_n": report.mc_n,
            "seed": report.seed,
        }
        _write_csv(config, columns, rows, extra)
    return 0


def _run_coeffs(config: ExperimentConfig) -> int:
    spec = parse_spec(config.spec)
    target = parse_target(config.target)
    table = get_table(config.x)
    measure = prime_measure(spec, config.x, table)
    lam = tilt_coeffs(measure, config.kmax)
    big_lam = tilt_coeffs(target, config.kmax)
    rows = [
        [k, lam[k], big_lam[k], lam[k] - big_lam[k]]
        for k in range(config.kmax + 1)
    ]
    _write_csv(
        config,
        ["k", "lambda", "Lambda", "diff"],
        rows,
        {"x": config.x, "b2": fmt17(measure.total_mass)},
    )
    return 0


def _run_moments(config: ExperimentConfig) -> int:
    spec = parse_spec(config.spec)
    table = get_table(config.x)
    measure = prime_measure(spec, config.x, table)
    coeffs = tilt_coeffs(measure, config.kmax)
    recovered = moments_from_coeffs(coeffs, config.kmax)
    rows = []
    for k in range(config.kmax):
        direct = measure.moment(k)
        rows.append([k, direct, recovered[k], recovered[k] - direct])
    _write_csv(config, ["k", "moment", "from_coeffs", "diff"], rows, {"x": config.x})
    return 0


def _run_saddle(config: ExperimentConfig) -> int:
    spec = parse_spec(config.spec)
    target = parse_target(config.target)
    table = get_table(config.x)
    measure = prime_measure(spec, config.x, table)
    gaps = tilt_gap(measure, target, parse_grid(config.deltas))
    rows = list(zip(gaps.delta, gaps.eta, gaps.rho, gaps.gap, gaps.b2_gap))
    _write_csv(
        config,
        ["delta", "eta", "rho", "gap", "b2_gap"],
        rows,
        {"x": config.x, "b2": fmt17(measure.total_mass)},
    )
    return 0


def _run_sample_levy(config: ExperimentConfig) -> int:
    target = parse_target(config.target)
    batch = sample(target, config.u, config.n, config.seed, threads=config.threads)
    rows = []
    for threshold in parse_grid(config.thresholds):
        estimate, half = mc_tail(batch, threshold)
        rows.append([threshold, estimate, estimate - half, estimate + half, config.n, config.seed])
    _write_csv(
        config,
        ["threshold", "estimate", "ci_lo", "ci_hi", "n", "seed"],
        rows,
        {"u": fmt17(config.u)},
    )
    return 0


def _run_converse(config: ExperimentConfig) -> int:
    spec = parse_spec(config.spec)
    target = parse_target(config.target)
    x_grid = parse_x_grid(config.x_grid)
    report = converse_check(spec, x_grid, target, kmax=config.kmax)
    convergence = report.convergence
    distances = report.distances.tolist()
    payload = {
        "report": "converse",
        "inputs": {
            "spec": spec.name,
            "x_grid": report.x_grid.tolist(),
            "target": _target_payload(target),
            "kmax": report.kmax,
            "margin": report.margin,
        },
        "distances": distances,
        "reconstructions": [_target_payload(r) for r in report.reconstructions],
        "convergence": {
            "k_range": convergence.k_range.tolist(),
            "coefficient_gaps": convergence.deltas.tolist(),
            "predicted_rates": convergence.predicted_rates.tolist(),
            "moments_roundtrip_error": convergence.moments_roundtrip_error.tolist(),
            "moment_amplification": convergence.moment_amplification.tolist(),
            "b_values": convergence.b_values.tolist(),
        },
        "verdicts": {
            "distance_decreasing": bool(np.all(np.diff(report.distances) < 0)),
            "final_distance": distances[-1],
        },
    }
    _write_json(config, payload)
    return 0


def _run_list_specs(config: ExperimentConfig) -> int:
    print("additive function families:")
    for name, description in _SPEC_CATALOG:
        print(f"  {name:30s} {description}")
    print("targets:")
    for name, description in _TARGET_CATALOG:
        print(f"  {name:30s} {description}")
    return 0


_RUNNERS = {
    "sieve-stats": _run_sieve_stats,
    "tails": lambda cfg: _run_tails(cfg, as_json=cfg.format == "json"),
    "coeffs": _run_coeffs,
    "moments": _run_moments,
    "saddle": _run_saddle,
    "sample-levy": _run_sample_levy,
    "converse": _run_converse,
    "forward": lambda cfg: _run_tails(cfg, as_json=True),
    "list-specs": _run_list_specs,
}


def run(config: ExperimentConfig) -> int:
    """Execute a fully assembled config; returns the process exit code."""
    if config.command not in _RUNNERS:
        print(f"unknown command {config.command!r}", file=sys.stderr)
        return 2
    if config.command != "list-specs" and not config.output:
        print("an --output path is required", file=sys.stderr)
        return 2
    try:
        return _RUNNERS[config.command](config)
    except AdditiveTailsError as exc:
        print(f"addtails {config.command}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"addtails {config.command}: {exc}", file=sys.stderr)
        return 2


_FLAGS: dict[str, list[str]] = {
    "sieve-stats": ["spec", "x", "output", "format"],
    "tails": ["spec", "x", "target", "deltas", "kmax", "mc_n", "seed", "output", "format", "threads"],
    "coeffs": ["spec", "x", "target", "kmax", "output", "format"],
    "moments": ["spec", "x", "kmax", "output", "format"],
    "saddle": ["spec", "x", "target", "deltas", "output", "format"],
    "sample-levy": ["target", "u", "n", "seed", "thresholds", "output", "format", "threads"],
    "converse": ["spec", "x_grid", "target", "kmax", "output", "format"],
    "forward": ["spec", "x", "target", "deltas", "kmax", "mc_n", "seed", "output", "format", "threads"],
    "list-specs": [],
}

_REQUIRED: dict[str, list[str]] = {
    "sieve-stats": ["x", "output"],
    "tails": ["x", "output"],
    "coeffs": ["output"],
    "moments": ["output"],
    "saddle": ["x", "target", "output"],
    "sample-levy": ["target", "u", "output"],
    "converse": ["target", "output"],
    "forward": ["x", "target", "output"],
    "list-specs": [],
}

_HELP = {
    "spec": "additive function family (see list-specs)",
    "x": "evaluation limit",
    "x_grid": "comma-separated evaluation limits",
    "target": "target law (see list-specs)",
    "deltas": "delta grid start:stop:step",
    "kmax": "series truncation degree",
    "mc_n": "Monte Carlo sample count",
    "seed": "random seed",
    "u": "intensity of the sampled law",
    "n": "sample count",
    "thresholds": "threshold grid start:stop:step",
    "output": "output file path",
    "format": "output format (csv or json)",
    "threads": "worker cap for sampling chunks (never changes results)",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="addtails",
        description="Tail statistics of strongly additive arithmetic functions",
    )
    parser.add_argument("--version", action="version", version=f"additive-tails {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    types = {f.name: {"int": int, "float": float, "str": str}[f.type] for f in fields(ExperimentConfig)}
    for command, flag_names in _FLAGS.items():
        sub = subparsers.add_parser(command)
        sub.add_argument("--config", help="key=value config file; flags override it")
        for name in flag_names:
            flag = "--" + name.replace("_", "-")
            sub.add_argument(flag, dest=name, type=types[name], default=None, help=_HELP[name])
    return parser


def assemble_config(args: argparse.Namespace) -> ExperimentConfig:
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            config = ExperimentConfig.from_text(fh.read())
    else:
        config = ExperimentConfig()
    config.command = args.command
    for f in fields(ExperimentConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(config, f.name, value)
    missing = [name for name in _REQUIRED[args.command] if not getattr(config, name)]
    if missing:
        raise ValueError(f"missing required flags: {', '.join('--' + m for m in missing)}")
    if config.format not in ("csv", "json"):
        raise ValueError(f"unknown format {config.format!r}")
    return config


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = assemble_config(args)
    except (ValueError, OSError) as exc:
        print(f"addtails: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
