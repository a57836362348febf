"""Command-line driver for the experiment suite.

Each subcommand resolves its parameters from built-in defaults, then an
optional flat ``key = value`` config file, then explicit flags, runs the
experiment, and writes ``<outdir>/<experiment>.csv`` plus a ``manifest.txt``
that can itself be passed back via ``--config`` to reproduce the run.
"""

from __future__ import annotations

import argparse
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from . import noise as noise_mod
from .errors import InvalidParameterError, UnsupportedConfigurationError
from .integrator import SimConfig, evolve_paths
from .model import GaugeKind, GaugeParams
from .oracle import collapse_envelope, exact_X_rotating, fock_moments
from .samplers import (BranchingRunConfig, MetropolisRunConfig,
                       StochasticRunConfig, _unit_rng, run_branching,
                       run_metropolis, run_stochastic)

__version__ = "0.1.0"

_SIM_KEYS = {
    "nbar": (float, 100.0),
    "gauge_a": (float, 2.0),
    "lam": (float, 0.5),
    "total_time": (float, 0.1),
    "dt": (float, 1e-4),
    "save_stride": (int, 10),
}

_COMMANDS = {
    "stochastic": {
        **_SIM_KEYS,
        "n_trajectories": (int, 100000),
        "n_groups": (int, 10),
        "seed": (int, 1),
    },
    "metropolis": {
        **_SIM_KEYS,
        "n_chains": (int, 20),
        "samples_per_chain": (int, 1000),
        "burn_in": (int, 1000),
        "mutate_fraction": (float, 0.1),
        "n_targets": (int, 20),
        "target_spacing": (float, 0.005),
        "seed": (int, 1),
    },
    "branching": {
        **_SIM_KEYS,
        "n_pop": (int, 1000),
        "n_populations": (int, 10),
        "branch_interval": (float, 1e-3),
        "seed": (int, 1),
    },
    "weight-spread": {
        **_SIM_KEYS,
        "gauge": (str, "real"),
        "k_trajectories": (int, 3),
        "seed": (int, 1),
    },
    "noise-scan": {
        **{**_SIM_KEYS, "total_time": (float, 0.05)},
        "trials_per_bin": (int, 100),
        "all_channels": (bool, False),
        "seed": (int, 1),
    },
    "oracle": {
        "nbar": (float, 100.0),
        "total_time": (float, 0.1),
        "n_points": (int, 100),
        "seed": (int, 1),  # accepted for interface uniformity; unused
    },
}


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _parse_value(kind, raw: str):
    if kind is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return kind(raw)


def read_config(path: Path, schema: dict) -> dict:
    values = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidParameterError("cannot read config file: %s" % exc)
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(
                "%s:%d: expected 'key = value'" % (path, lineno))
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in schema:
            print("warning: ignoring unknown config key %r" % key,
                  file=sys.stderr)
            continue
        try:
            values[key] = _parse_value(schema[key][0], raw)
        except ValueError:
            raise InvalidParameterError(
                "%s:%d: bad value for %s: %r" % (path, lineno, key, raw))
    return values


def _resolve_params(command: str, args: argparse.Namespace) -> dict:
    schema = _COMMANDS[command]
    params = {key: default for key, (_, default) in schema.items()}
    if args.config is not None:
        params.update(read_config(Path(args.config), schema))
    for key in schema:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            params[key] = value
    return params


def _version_string() -> str:
    try:
        desc = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5)
        suffix = desc.stdout.strip() if desc.returncode == 0 else ""
    except OSError:
        suffix = ""
    return "kerrmc-%s%s" % (__version__, "+g" + suffix if suffix else "")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _write_manifest(outdir: Path, command: str, params: dict,
                    duration: float, extra: dict | None = None) -> None:
    lines = ["# kerrmc manifest for subcommand: %s" % command,
             "# version: %s" % _version_string(),
             "# duration_s: %.3f" % duration]
    for key, value in extra.items() if extra else ():
        lines.append("# %s: %s" % (key, value))
    for key in _COMMANDS[command]:
        lines.append("%s = %s" % (key, _fmt(params[key])))
    (outdir / "manifest.txt").write_text("\n".join(lines) + "\n")


def _sim_config(params: dict, kind: GaugeKind = GaugeKind.REAL,
                total_time: float | None = None) -> SimConfig:
    gauge = GaugeParams(kind=kind, A=params["gauge_a"], lam=params["lam"],
                        nbar_frame=params["nbar"])
    return SimConfig(nbar=params["nbar"],
                     total_time=params["total_time"]
                     if total_time is None else total_time,
                     dt=params["dt"], gauge=gauge,
                     save_stride=params["save_stride"])


def _series_rows(series):
    for j, tau in enumerate(series.times):
        x = series.moments["X"][j]
        n = series.moments["n"][j]
        om = series.omega_mean[j]
        yield (tau, x.mean, x.stderr, n.mean, n.stderr, om.mean, om.stderr)


_SERIES_HEADER = ["tau", "mean_X", "err_X", "mean_n", "err_n",
                  "mean_omega", "err_omega"]


def cmd_stochastic(params: dict, outdir: Path, workers: int) -> dict:
    cfg = StochasticRunConfig(sim=_sim_config(params),
                              n_trajectories=params["n_trajectories"],
                              n_groups=params["n_groups"],
                              seed=params["seed"])
    series = run_stochastic(cfg, workers=workers)
    _write_csv(outdir / "stochastic.csv", _SERIES_HEADER, _series_rows(series))
    return {}


def cmd_metropolis(params: dict, outdir: Path, workers: int) -> dict:
    rows = []
    rates = []
    for j in range(1, params["n_targets"] + 1):
        target = j * params["target_spacing"]
        cfg = MetropolisRunConfig(
            sim=_sim_config(params, total_time=target),
            target_time=target, n_chains=params["n_chains"],
            samples_per_chain=params["samples_per_chain"],
            burn_in=params["burn_in"],
            mutate_fraction=params["mutate_fraction"],
            seed=params["seed"] + j)
        result = run_metropolis(cfg, workers=workers)
        x, n = result.estimates["X"], result.estimates["n"]
        rows.append((target, x.mean, x.stderr, n.mean, n.stderr,
                     result.acceptance_rate))
        rates.append(result.acceptance_rate)
    _write_csv(outdir / "metropolis.csv",
               ["tau", "mean_X", "err_X", "mean_n", "err_n",
                "acceptance_rate"], rows)
    return {"acceptance_rates": " ".join("%.4f" % r for r in rates)}


def cmd_branching(params: dict, outdir: Path, workers: int) -> dict:
    cfg = BranchingRunConfig(sim=_sim_config(params),
                             n_pop=params["n_pop"],
                             n_populations=params["n_populations"],
                             branch_interval=params["branch_interval"],
                             seed=params["seed"])
    result = run_branching(cfg, workers=workers)
    _write_csv(outdir / "branching.csv", _SERIES_HEADER,
               _series_rows(result.series))
    sizes = result.population_sizes
    return {"population_size_range": "%d..%d" % (sizes.min(), sizes.max())}


def cmd_weight_spread(params: dict, outdir: Path, workers: int) -> dict:
    kind = GaugeKind(params["gauge"])
    if kind is GaugeKind.NONE:
        raise InvalidParameterError("weight-spread requires a real or complex gauge")
    sim = _sim_config(params, kind=kind)
    k = params["k_trajectories"]
    columns = []
    for i in range(k):
        rng = _unit_rng(params["seed"], i)
        values = rng.standard_normal((1, sim.n_channels, sim.n_steps))
        times, _, _, om = evolve_paths(values, sim)
        columns.append(np.exp(np.real(om[0])))
    header = ["tau"] + ["omega_%d" % (i + 1) for i in range(k)]
    rows = [(t, *[col[j] for col in columns]) for j, t in enumerate(times)]
    _write_csv(outdir / "weight_spread.csv", header, rows)
    return {}


def cmd_noise_scan(params: dict, outdir: Path, workers: int) -> dict:
    sim = _sim_config(params)
    base_rng = _unit_rng(params["seed"], 0)
    base = noise_mod.sample(sim.n_channels, sim.n_steps, base_rng)
    channels = range(sim.n_channels) if params["all_channels"] else [3]
    n_bins = noise_mod.n_independent_bins(sim.n_steps)
    rows = []
    for channel in channels:
        for b in range(n_bins):
            rng = np.random.Generator(np.random.PCG64(
                np.random.SeedSequence(params["seed"],
                                       spawn_key=(1 + channel, b))))
            sigma = noise_mod.sensitivity_scan(
                base, sim, b, params["trials_per_bin"], rng, channel=channel)
            rows.append((channel + 1, b, sigma))
    _write_csv(outdir / "noise_scan.csv", ["channel", "bin", "sigma_omega"],
               rows)
    return {}


def cmd_oracle(params: dict, outdir: Path, workers: int) -> dict:
    nbar, total = params["nbar"], params["total_time"]
    rows = []
    for j in range(params["n_points"] + 1):
        tau = j * total / params["n_points"]
        _, n_mean, _ = fock_moments(nbar, tau)
        rows.append((tau, exact_X_rotating(nbar, tau),
                     collapse_envelope(nbar, tau), n_mean))
    _write_csv(outdir / "oracle.csv", ["tau", "X_exact", "envelope", "n_exact"],
               rows)
    return {}


_HANDLERS = {
    "stochastic": cmd_stochastic,
    "metropolis": cmd_metropolis,
    "branching": cmd_branching,
    "weight-spread": cmd_weight_spread,
    "noise-scan": cmd_noise_scan,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kerrmc",
        description="Monte Carlo sampling of weighted stochastic-gauge "
                    "trajectories for the Kerr oscillator")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, schema in _COMMANDS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", default=None, help="flat key=value file")
        p.add_argument("--outdir", default=".", help="output directory")
        p.add_argument("--workers", type=int, default=1)
        for key, (kind, default) in schema.items():
            flag = "--" + key.replace("_", "-")
            if kind is bool:
                p.add_argument(flag, default=None,
                               action=argparse.BooleanOptionalAction)
            else:
                p.add_argument(flag, type=kind, default=None,
                               help="default: %s" % _fmt(default))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    try:
        params = _resolve_params(command, args)
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        started = time.monotonic()
        extra = _HANDLERS[command](params, outdir, args.workers)
        _write_manifest(outdir, command, params,
                        time.monotonic() - started, extra)
    except (InvalidParameterError, UnsupportedConfigurationError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print("error: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
