"""Text, CSV and PNG rendering of correctness tables and benchmark timings."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .noise import EXPONENT_CAP, TableRow  # noqa: E402


def table_header(rows: list[TableRow]) -> list[str]:
    log_t = rows[0].log_t if rows else []
    return (["preset"] + [f"t=2^{k}" for k in log_t] + [f"affine t=2^{k}" for k in log_t]
            + ["key_share"])


def table_records(rows: list[TableRow]) -> list[list[str]]:
    return [[r.preset] + [c.render() for c in r.bootstrap] + [c.render() for c in r.affine]
            + [f"{100 * r.key_share:.0f}%"] for r in rows]


def render_text(rows: list[TableRow]) -> str:
    header = table_header(rows)
    body = table_records(rows)
    widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]
    lines = []
    for line in [header] + body:
        lines.append("  ".join(cell.ljust(w) if i == 0 else cell.rjust(w)
                               for i, (cell, w) in enumerate(zip(line, widths))))
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines) + "\n"


def render_csv(rows: list[TableRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table_header(rows))
    writer.writerows(table_records(rows))
    return buf.getvalue()


def render_budget_csv(rows: list[TableRow]) -> str:
    """Per-preset variance terms, one row each."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    keys = list(rows[0].budget.as_dict()) if rows else []
    writer.writerow(["preset"] + keys)
    for r in rows:
        d = r.budget.as_dict()
        writer.writerow([r.preset] + [f"{d[k]:.6g}" for k in keys])
    return buf.getvalue()


def plot_table(rows: list[TableRow], path) -> Path:
    """Error exponent against log2(t), one line per preset (capped cells drawn at the cap)."""
    path = Path(path)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, column, title in ((axes[0], "bootstrap", "bootstrap only"),
                              (axes[1], "affine", "after 784-term affine map")):
        for r in rows:
            cells = getattr(r, column)
            ys = [min(c.exponent, EXPONENT_CAP) for c in cells]
            style = "-o" if r.preset.startswith("FDFB") else "--s"
            ax.plot(r.log_t, ys, style, label=r.preset, markersize=4)
        ax.set_title(title)
        ax.set_xlabel("log2 t")
        ax.grid(True, alpha=0.3)
    axes[0].set_ylabel("-log2 error probability")
    axes[0].set_yscale("symlog", linthresh=8)
    axes[1].legend(fontsize=7, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_bench(preset: str, times: list[float], threads: int) -> str:
    total = sum(times)
    mean = total / len(times) if times else 0.0
    return (f"preset {preset}\nthreads {threads}\ntrials {len(times)}\n"
            f"mean_seconds_per_bootstrap {mean:.4f}\n"
            f"min_seconds {min(times, default=0.0):.4f}\nmax_seconds {max(times, default=0.0):.4f}\n")


def plot_bench(times: list[float], path) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.hist(times, bins=min(20, max(1, len(times))))
    ax.set_xlabel("seconds per bootstrap")
    ax.set_ylabel("count")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
