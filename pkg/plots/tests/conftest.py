"""Generate a small set of kerrmc CSVs once per session via the primary CLI."""

import subprocess
import sys

import pytest

FAST = ["--nbar", "100", "--total-time", "0.005", "--dt", "1e-4", "--seed",
        "5"]

COMMANDS = {
    "stochastic": [*FAST, "--n-trajectories", "200", "--n-groups", "2"],
    "metropolis": [*FAST, "--n-chains", "2", "--samples-per-chain", "10",
                   "--burn-in", "5", "--n-targets", "3",
                   "--target-spacing", "0.001"],
    "branching": [*FAST, "--n-pop", "50", "--n-populations", "2",
                  "--branch-interval", "1e-3"],
    "weight-spread": [*FAST, "--k-trajectories", "3"],
    "noise-scan": ["--total-time", "0.002", "--dt", "1e-4",
                   "--trials-per-bin", "3", "--seed", "5"],
    "oracle": ["--n-points", "40"],
}


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("csvs")
    for command, args in COMMANDS.items():
        proc = subprocess.run(
            [sys.executable, "-m", "kerrmc.cli", command,
             "--outdir", str(outdir), *args],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    return outdir
