"""Figure renderers for the kerrmc CSV outputs.

Each renderer reads one experiment CSV (plus the oracle table where an
analytic overlay is drawn) and writes a single raster image.  Rendering is
a pure function of the CSV contents: timestamps and writer metadata are
suppressed so identical inputs produce identical image bytes.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


class MissingColumnError(ValueError):
    """A required CSV column is absent."""


class MissingInputError(FileNotFoundError):
    """A required CSV file is absent."""


def read_table(path: Path, columns: list[str]) -> dict[str, np.ndarray]:
    """Load the named columns of a CSV into float arrays."""
    if not path.is_file():
        raise MissingInputError("missing input file: %s" % path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for name in columns:
            if name not in header:
                raise MissingColumnError(
                    "%s: missing column %r (found: %s)"
                    % (path, name, ", ".join(header)))
        rows = list(reader)
    return {name: np.array([float(r[name]) for r in rows])
            for name in columns}


def _save(fig, out_path: Path) -> None:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150, metadata={"Software": None})
    plt.close(fig)


def _oracle_overlay(ax, data_dir: Path, envelope: bool = False) -> None:
    table = read_table(data_dir / "oracle.csv",
                       ["tau", "X_exact", "envelope"])
    ax.plot(table["tau"], table["X_exact"], "k--", lw=1.0, label="exact")
    if envelope:
        ax.plot(table["tau"], table["envelope"], "k:", lw=1.0,
                label="envelope")


def render_weight_spread(data_dir: Path, out_path: Path) -> None:
    """One line per trajectory, log-scaled weight axis."""
    path = data_dir / "weight_spread.csv"
    if not path.is_file():
        raise MissingInputError("missing input file: %s" % path)
    with open(path, newline="") as fh:
        header = next(csv.reader(fh))
    weight_cols = [c for c in header if c.startswith("omega_")]
    if header[:1] != ["tau"] or not weight_cols:
        raise MissingColumnError(
            "%s: expected columns tau, omega_1, ... (found: %s)"
            % (path, ", ".join(header)))
    table = read_table(path, ["tau", *weight_cols])
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in weight_cols:
        ax.semilogy(table["tau"], table[name], lw=1.0,
                    label=name.replace("omega_", "trajectory "))
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$\Omega$")
    ax.set_title("Spreading of trajectory weights")
    ax.legend(frameon=False, fontsize=8)
    _save(fig, out_path)


def _render_series_band(data_dir: Path, out_path: Path, stem: str,
                        title: str) -> None:
    table = read_table(data_dir / ("%s.csv" % stem),
                       ["tau", "mean_X", "err_X"])
    fig, ax = plt.subplots(figsize=(6, 4))
    mean, err = table["mean_X"], table["err_X"]
    ax.fill_between(table["tau"], mean - err, mean + err, alpha=0.35,
                    label="sampled $\\pm$ stderr")
    ax.plot(table["tau"], mean, lw=1.0)
    _oracle_overlay(ax, data_dir)
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$\langle X \rangle$")
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    _save(fig, out_path)


def render_stochastic(data_dir: Path, out_path: Path) -> None:
    """Shaded error band of the plain stochastic ensemble vs the exact curve."""
    _render_series_band(data_dir, out_path, "stochastic",
                        "Plain stochastic sampling")


def render_branching(data_dir: Path, out_path: Path) -> None:
    """Shaded error band of the branching sampler vs the exact curve."""
    _render_series_band(data_dir, out_path, "branching",
                        "Branching (cloning) sampling")


def render_metropolis(data_dir: Path, out_path: Path) -> None:
    """Point markers with error bars at each Metropolis target time."""
    table = read_table(data_dir / "metropolis.csv",
                       ["tau", "mean_X", "err_X"])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(table["tau"], table["mean_X"], yerr=table["err_X"],
                fmt="x", ms=5, capsize=2, lw=1.0, label="Metropolis")
    _oracle_overlay(ax, data_dir)
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$\langle X \rangle$")
    ax.set_title("Metropolis-Hastings sampling")
    ax.legend(frameon=False, fontsize=8)
    _save(fig, out_path)


def render_noise_scan(data_dir: Path, out_path: Path) -> None:
    """Per-bin weight sensitivity on a log axis, one series per channel."""
    table = read_table(data_dir / "noise_scan.csv",
                       ["channel", "bin", "sigma_omega"])
    fig, ax = plt.subplots(figsize=(6, 4))
    for channel in np.unique(table["channel"]):
        mask = table["channel"] == channel
        ax.semilogy(table["bin"][mask], table["sigma_omega"][mask], lw=1.0,
                    label=r"$\xi_%d$" % int(channel))
    ax.set_xlabel("frequency bin")
    ax.set_ylabel(r"$\sigma(\Omega_{\rm final})$")
    ax.set_title("Weight sensitivity per noise frequency")
    ax.legend(frameon=False, fontsize=8)
    _save(fig, out_path)


def render_oracle(data_dir: Path, out_path: Path) -> None:
    """Exact collapse curve with its Gaussian envelope."""
    table = read_table(data_dir / "oracle.csv",
                       ["tau", "X_exact", "envelope"])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(table["tau"], table["X_exact"], lw=1.2, label="exact")
    ax.plot(table["tau"], table["envelope"], "k:", lw=1.0, label="envelope")
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$\langle X \rangle$")
    ax.set_title("Exact quadrature collapse")
    ax.legend(frameon=False, fontsize=8)
    _save(fig, out_path)


RENDERERS = {
    "weight-spread": render_weight_spread,
    "stochastic": render_stochastic,
    "noise-scan": render_noise_scan,
    "metropolis": render_metropolis,
    "branching": render_branching,
    "oracle": render_oracle,
}


def render(figure_name: str, data_dir: Path, out_path: Path) -> None:
    """Render one named figure from the CSVs in ``data_dir``."""
    try:
        renderer = RENDERERS[figure_name]
    except KeyError:
        raise ValueError("unknown figure %r (choose from: %s)"
                         % (figure_name, ", ".join(sorted(RENDERERS))))
    renderer(Path(data_dir), Path(out_path))
