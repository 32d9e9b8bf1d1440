"""Figure rendering and table formatting for benchmark result directories.

Reads the delimited outputs written by the harness (summary.csv plus
trajectories/*.csv) and renders matplotlib figures next to them: one
gap-vs-iteration curve set per instance and two summary bar charts.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_METHOD_COLORS = {
    "agentq": "tab:blue",
    "random": "tab:gray",
    "uniform": "tab:brown",
    "beta-pure": "tab:green",
    "beta-mixture": "tab:olive",
    "beta-stratified": "tab:red",
    "beta-best": "tab:purple",
}


def load_summary(results_dir) -> list[dict[str, str]]:
    with (Path(results_dir) / "summary.csv").open(newline="") as fh:
        return list(csv.DictReader(fh))


def load_trajectory(path) -> tuple[list[str], dict[str, list[float]]]:
    """Columns and per-column gap series; footer comments are skipped."""
    with Path(path).open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    header = rows[0][1:]
    series: dict[str, list[float]] = {name: [] for name in header}
    for row in rows[1:]:
        for name, cell in zip(header, row[1:]):
            series[name].append(float(cell))
    return header, series


def format_summary_table(rows: list[dict[str, str]]) -> str:
    """Fixed-width text table of the paired summary."""
    headers = ("method", "mean_residual", "std_residual", "median_improvement_pct",
               "success_prob", "mean_conv_latency", "mean_time_s", "n_paired")
    display = [headers]
    for row in rows:
        cells = []
        for key in headers:
            value = row.get(key, "")
            if key != "method" and value not in ("", None):
                number = float(value)
                cells.append(f"{number:.4g}" if key != "n_paired" else str(int(number)))
            else:
                cells.append(value or "-")
        display.append(tuple(cells))
    widths = [max(len(r[i]) for r in display) for i in range(len(headers))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in display]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _bar_chart(rows, value_key, error_key, title, ylabel, path):
    methods = [r["method"] for r in rows]
    values = [float(r[value_key]) for r in rows]
    errors = [float(r[error_key]) for r in rows] if error_key else None
    colors = [_METHOD_COLORS.get(m, "tab:cyan") for m in methods]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(methods, values, yerr=errors, color=colors, capsize=3)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report(results_dir, out_dir=None, max_trajectories: int | None = None) -> list[Path]:
    """Render summary and trajectory figures; returns the written paths."""
    results = Path(results_dir)
    out = Path(out_dir) if out_dir is not None else results / "figures"
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    rows = load_summary(results)
    residual_path = out / "summary_residual.png"
    _bar_chart(rows, "mean_residual", "std_residual",
               "Mean residual energy gap per method", "mean final gap",
               residual_path)
    written.append(residual_path)
    success_path = out / "summary_success.png"
    _bar_chart(rows, "success_prob", None,
               "Success probability per method", "fraction of paired runs",
               success_path)
    written.append(success_path)

    traj_files = sorted((results / "trajectories").glob("*.csv"))
    if max_trajectories is not None:
        traj_files = traj_files[:max_trajectories]
    for traj in traj_files:
        columns, series = load_trajectory(traj)
        fig, ax = plt.subplots(figsize=(7, 4))
        for name in columns:
            base = name.split("_seed")[0]
            ax.semilogy(series[name], label=name,
                        color=_METHOD_COLORS.get(base, "tab:cyan"))
        ax.set_xlabel("iteration")
        ax.set_ylabel("energy gap")
        ax.set_title(traj.stem)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out / f"trajectory_{traj.stem}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
